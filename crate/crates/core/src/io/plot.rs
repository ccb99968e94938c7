use std::fmt::Write as _;
use std::path::Path;

use crate::data::PointStore;
use crate::error::{Error, Result};
use crate::scan::ScanResult;

/// Plot data as text: one `x y m b [inside]` line per point, then
/// `RECT x_lo y_lo x_hi y_hi`. Numbers use the same formatting as reports.
pub fn plot_text(store: &PointStore, result: &ScanResult) -> String {
    let t_min = result
        .time_threshold
        .map(|t| store.ts().partition_point(|&v| v < t) as u32);
    let mut out = String::new();
    for (i, p) in store.points().iter().enumerate() {
        let in_time = t_min.map_or(true, |t| store.t_rank(i).is_some_and(|ti| ti >= t));
        let inside = in_time && result.rect.contains(store.x_rank(i), store.y_rank(i));
        let _ = write!(out, "{:?} {:?} {:?} {:?}", p.x, p.y, p.m, p.b);
        out.push_str(if inside { " inside\n" } else { "\n" });
    }
    let b = &result.bounds;
    let _ = writeln!(out, "RECT {:?} {:?} {:?} {:?}", b.x_lo, b.y_lo, b.x_hi, b.y_hi);
    out
}

pub fn emit_plot(store: &PointStore, result: &ScanResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, plot_text(store, result)).map_err(|source| Error::File { path: path.to_owned(), source })
}
