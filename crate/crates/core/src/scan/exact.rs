use crate::data::PointStore;
use crate::error::{Error, Result};
use crate::exp_family::NormalizedPair;
use crate::linear_max::{RankGrid, RankRect};

use super::engine::{apply_one_sided, bounds, tighten, Problem};
use super::{ScanConfig, ScanResult};

/// Exhaustive convex oracle: evaluates the discrepancy on every rank
/// rectangle (and, for prospective scans, every time suffix).
fn exact(store: &PointStore, config: &ScanConfig, prospective: bool) -> Result<Option<ScanResult>> {
    let n = store.len();
    if n > config.exact_cap {
        return Err(Error::TooLarge { n, cap: config.exact_cap });
    }
    if prospective && !store.has_time() {
        return Err(Error::Config("prospective scan needs timestamps".into()));
    }
    let Some(problem) = Problem::new(store, config)? else { return Ok(None) };
    let thresholds: Vec<Option<u32>> = if prospective {
        (0..store.ts().len() as u32).map(Some).collect()
    } else {
        vec![None]
    };
    let mut best: Option<(RankRect, Option<u32>, NormalizedPair, f64)> = None;
    for tau in thresholds {
        let cells = store.points().iter().enumerate().filter_map(|(i, p)| {
            let keep = tau.map_or(true, |t| store.t_rank(i).is_some_and(|ti| ti >= t));
            keep.then(|| (store.x_rank(i), store.y_rank(i), [p.m, p.b]))
        });
        let grid: RankGrid<2> = RankGrid::new(store.xs().len(), store.ys().len(), cells);
        grid.for_each_rect(|r| {
            let [m, b] = grid.sum(&r);
            if !problem.support.meets(problem.support_of(m, b)) {
                return;
            }
            let pair = NormalizedPair::new(m / problem.totals[0], b / problem.totals[1]);
            let kept = if config.one_sided { apply_one_sided([(pair, ())]) } else { vec![(pair, ())] };
            if kept.is_empty() {
                return;
            }
            if let Ok(d) = problem.f.eval(pair) {
                if best.map_or(true, |(.., bd)| d > bd) {
                    best = Some((r, tau, pair, d));
                }
            }
        });
    }
    Ok(best.map(|(r, tau, pair, d)| {
        let rect = tighten(store, r, tau);
        ScanResult {
            rect,
            bounds: bounds(store, &rect),
            m_frac: pair.m,
            b_frac: pair.b,
            value_lower: d,
            value_upper: d,
            achieved_value: d,
            winning_plane: None,
            p_value: None,
            time_threshold: tau.map(|t| store.ts()[t as usize]),
            family_size: 0,
        }
    }))
}

/// Exact maximum over all rectangles meeting the support.
pub fn max_discrepancy_exact(store: &PointStore, config: &ScanConfig) -> Result<Option<ScanResult>> {
    exact(store, config, false)
}

/// Exact maximum over all (rectangle, time suffix) pairs.
pub fn max_discrepancy_exact_prospective(store: &PointStore, config: &ScanConfig) -> Result<Option<ScanResult>> {
    exact(store, config, true)
}
