use serde::{Deserialize, Serialize};

use crate::linear_max::RankRect;
use crate::tangent_family::TangentPlane;

/// Closed rectangle in original coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectBounds {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl RectBounds {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.x_lo..=self.x_hi).contains(&x) && (self.y_lo..=self.y_hi).contains(&y)
    }
}

/// The plane whose sweep produced the reported rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneRecord {
    pub index: usize,
    pub plane: TangentPlane,
    /// Plane value on its own best rectangle.
    pub plane_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub rect: RankRect,
    pub bounds: RectBounds,
    pub m_frac: f64,
    pub b_frac: f64,
    /// Certified lower bound on the optimum.
    pub value_lower: f64,
    /// Certified upper bound on the optimum.
    pub value_upper: f64,
    /// Discrepancy of the reported rectangle.
    pub achieved_value: f64,
    pub winning_plane: Option<PlaneRecord>,
    pub p_value: Option<f64>,
    /// Start of the time window for prospective scans.
    pub time_threshold: Option<f64>,
    pub family_size: usize,
}
