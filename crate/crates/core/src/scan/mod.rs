//! The scan pipeline: tangent family, one exact sweep per plane, certified
//! answer, plus the exhaustive oracle and randomization p-values.

mod config;
mod engine;
mod exact;
mod pvalue;
mod result;

pub use crate::tangent_family::Mode;
pub use config::{ScanConfig, EXACT_CAP};
pub use engine::apply_one_sided;
pub use exact::{max_discrepancy_exact, max_discrepancy_exact_prospective};
pub use pvalue::p_value;
pub use result::{PlaneRecord, RectBounds, ScanResult};

use crate::data::PointStore;
use crate::error::Result;
use crate::tangent_family::ApproxFamily;

use engine::{scan_prepared, Prepared};

fn run(store: &PointStore, config: &ScanConfig, prospective: bool) -> Result<Option<ScanResult>> {
    let Some(prep) = Prepared::new(store, config)? else { return Ok(None) };
    let Some(mut result) = scan_prepared(&prep, store, config, prospective, true)? else {
        return Ok(None);
    };
    if config.replicas > 0 {
        result.p_value = Some(pvalue::p_value_prepared(&prep, store, config, result.achieved_value, prospective)?);
    }
    Ok(Some(result))
}

/// Approximately maximizes the configured discrepancy over rectangles.
///
/// Returns `None` when no rectangle meets the support. The result carries
/// `value_lower ≤ achieved_value ≤ optimum ≤ value_upper`; in one-sided mode
/// the bounds refer to the best region with `m_R > b_R`.
pub fn max_discrepancy_approx(store: &PointStore, config: &ScanConfig) -> Result<Option<ScanResult>> {
    run(store, config, false)
}

/// As [`max_discrepancy_approx`] over (rectangle, time suffix) pairs. Masses
/// are fractions of the totals over all points.
pub fn max_discrepancy_prospective(store: &PointStore, config: &ScanConfig) -> Result<Option<ScanResult>> {
    run(store, config, true)
}

/// The tangent family a scan of `store` would use.
pub fn family_for(store: &PointStore, config: &ScanConfig) -> Result<Option<ApproxFamily>> {
    Ok(Prepared::new(store, config)?.map(|p| p.family))
}
