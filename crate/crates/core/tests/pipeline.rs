use std::io::Write;

use bumpscan::io::{load_dataset, parse_dataset, plot_text, RunReport};
use bumpscan::{scan, DiscrepancyKind, Mode, ScanConfig};

fn grid_csv(hot: impl Fn(usize, usize) -> bool) -> String {
    let mut s = String::from("x,y,m,b\n");
    for i in 0..8 {
        for j in 0..8 {
            s += &format!("{},{},{},8\n", i as f64 * 0.5, j, if hot(i, j) { 7 } else { 2 });
        }
    }
    s
}

#[test]
fn file_scan_report_round_trip() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(grid_csv(|i, j| (3..6).contains(&i) && (2..4).contains(&j)).as_bytes()).unwrap();
    let store = load_dataset(file.path()).unwrap();
    assert_eq!(store.len(), 64);

    let config = ScanConfig { epsilon: 0.05, one_sided: true, ..ScanConfig::default() };
    let result = scan::max_discrepancy_approx(&store, &config).unwrap().unwrap();
    assert!(result.bounds.contains(2.0, 2.0) && result.bounds.contains(2.5, 3.0));
    assert!(!result.bounds.contains(0.0, 0.0));

    let exact = scan::max_discrepancy_exact(&store, &ScanConfig { exact_cap: 64, ..config.clone() }).unwrap().unwrap();
    assert!(result.value_lower <= exact.achieved_value + 1e-12);
    assert!(exact.achieved_value <= result.value_upper + 1e-12);

    let report = RunReport::new(&config, store.len(), false, false, Some(&result));
    assert_eq!(RunReport::from_text(&report.to_text()).unwrap(), report);
    assert_eq!(serde_json::from_str::<RunReport>(&report.to_json()).unwrap(), report);

    let plot = plot_text(&store, &result);
    let inside = plot.lines().filter(|l| l.ends_with("inside")).count();
    let by_bounds = store.points().iter().filter(|p| result.bounds.contains(p.x, p.y)).count();
    assert_eq!(inside, by_bounds);
}

#[test]
fn every_function_and_mode_certifies_its_answer() {
    let store = parse_dataset(grid_csv(|i, j| i < 3 && j > 4).as_bytes(), "grid.csv").unwrap();
    for function in [DiscrepancyKind::Kulldorff, DiscrepancyKind::Gaussian, DiscrepancyKind::Bernoulli] {
        for mode in [Mode::Additive, Mode::Relative] {
            let config = ScanConfig { function: function.clone(), mode, epsilon: 0.1, ..ScanConfig::default() };
            let r = scan::max_discrepancy_approx(&store, &config).unwrap().unwrap();
            assert!(r.value_lower <= r.achieved_value + 1e-12, "{function:?} {mode:?}");
            assert!(r.achieved_value <= r.value_upper + 1e-12, "{function:?} {mode:?}");
        }
    }
}
