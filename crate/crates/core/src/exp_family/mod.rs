//! Exponential-family calculus and the concrete convex discrepancy functions.

mod curvature;
mod function;
mod spec;

pub use curvature::{f_max, lambda_star, BOUNDARY_SAMPLES, INTERIOR_GRID, SAFETY_FACTOR};
pub use function::{DiscrepancyFunction, DiscrepancyKind, DOMAIN_GUARD};
pub use spec::{generic_discrepancy, mle_estimate, ExpFamilySpec, SufficientSummary};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fractions `(m_R, b_R)` of the total measurement and baseline inside a region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedPair {
    pub m: f64,
    pub b: f64,
}

impl NormalizedPair {
    pub const fn new(m: f64, b: f64) -> Self {
        Self { m, b }
    }

    /// Checked constructor: both fractions must lie in `[0, 1]`.
    pub fn try_new(m: f64, b: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&m) || !(0.0..=1.0).contains(&b) {
            return Err(Error::Domain(format!("pair ({m}, {b}) outside the unit square")));
        }
        Ok(Self { m, b })
    }

    pub fn as_array(self) -> [f64; 2] {
        [self.m, self.b]
    }
}

impl From<[f64; 2]> for NormalizedPair {
    fn from(p: [f64; 2]) -> Self {
        Self { m: p[0], b: p[1] }
    }
}

/// Symmetric 2×2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Sym2 {
    pub const fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Self { xx, xy, yy }
    }

    pub fn scaled(self, c: f64) -> Self {
        Self::new(c * self.xx, c * self.xy, c * self.yy)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        max_eigenvalue(self)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let mean = 0.5 * (self.xx + self.yy);
        mean - (0.5 * (self.xx - self.yy)).hypot(self.xy)
    }
}

/// Larger root of `λ² − tr·λ + det = 0`.
pub fn max_eigenvalue(h: &Sym2) -> f64 {
    let mean = 0.5 * (h.xx + h.yy);
    mean + (0.5 * (h.xx - h.yy)).hypot(h.xy)
}
