use crate::error::{Error, Result};
use crate::exp_family::DiscrepancyKind;
use crate::tangent_family::{Mode, DEFAULT_RELATIVE_FLOOR};

/// Largest point count accepted by the exact convex oracle.
pub const EXACT_CAP: usize = 48;

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub function: DiscrepancyKind,
    /// Positive multiplier applied to the discrepancy.
    pub scale: f64,
    pub epsilon: f64,
    pub mode: Mode,
    /// Support constant `C`: regions need `m_R, b_R ∈ [C/n, 1 − C/n]`.
    pub support_c: f64,
    pub one_sided: bool,
    /// Randomization replicas for the p-value; 0 disables it.
    pub replicas: usize,
    pub seed: u64,
    /// Relative mode claims `1 + ε` only above this discrepancy value.
    pub relative_floor: f64,
    /// Overrides the number of inner family levels.
    pub levels: Option<usize>,
    /// Overrides the interval-tree chain capacity.
    pub chain_capacity: Option<usize>,
    /// Restricts families to the mass-ratio wedge implied by the data.
    pub use_wedge: bool,
    pub exact_cap: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            function: DiscrepancyKind::Kulldorff,
            scale: 1.0,
            epsilon: 0.05,
            mode: Mode::Additive,
            support_c: 1.0,
            one_sided: false,
            replicas: 0,
            seed: 0,
            relative_floor: DEFAULT_RELATIVE_FLOOR,
            levels: None,
            chain_capacity: None,
            use_wedge: true,
            exact_cap: EXACT_CAP,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.support_c > 0.0 && self.support_c.is_finite()) {
            return Err(Error::Config(format!("support constant must be positive, got {}", self.support_c)));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::Config(format!("scale must be positive, got {}", self.scale)));
        }
        if self.mode == Mode::Relative && !(self.relative_floor > 0.0) {
            return Err(Error::Config("relative floor must be positive".into()));
        }
        Ok(())
    }
}
