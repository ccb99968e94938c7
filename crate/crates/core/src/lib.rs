//! Maximum-discrepancy rectangles for convex scan statistics.
//!
//! Given weighted planar points (a measurement `m` and a baseline `b` per
//! point), the crate finds the axis-parallel rectangle whose normalized
//! masses `(m_R, b_R)` maximize a convex discrepancy such as the Kulldorff
//! scan statistic. The convex objective is replaced by a family of tangent
//! planes; each plane is a linear discrepancy that the slab sweep in
//! [`linear_max`] maximizes exactly, and the best plane value certifies the
//! answer to within an additive `ε` (or a relative factor `1 + ε`).
//!
//! ```
//! use bumpscan::{scan, Point, PointStore, ScanConfig};
//!
//! let mut points = Vec::new();
//! for i in 0..6 {
//!     for j in 0..6 {
//!         let hot = i < 2 && j < 2;
//!         points.push(Point::new(i as f64, j as f64, if hot { 4.0 } else { 1.0 }, 1.0));
//!     }
//! }
//! let store = PointStore::new(points).unwrap();
//! let config = ScanConfig { epsilon: 0.1, ..ScanConfig::default() };
//! let result = scan::max_discrepancy_approx(&store, &config).unwrap().unwrap();
//! assert!(result.value_lower <= result.achieved_value);
//! assert!(result.achieved_value <= result.value_upper);
//! ```

pub mod data;
pub mod error;
pub mod exp_family;
pub mod io;
pub mod linear_max;
pub mod region;
pub mod scan;
pub mod tangent_family;

pub use data::{Point, PointStore};
pub use error::{Error, Result};
pub use exp_family::{DiscrepancyFunction, DiscrepancyKind, ExpFamilySpec, NormalizedPair};
pub use linear_max::{LinearFunction, RankRect, SupportConstraint, WeightedPoint};
pub use scan::{Mode, ScanConfig, ScanResult};
pub use tangent_family::{ApproxFamily, TangentPlane};
