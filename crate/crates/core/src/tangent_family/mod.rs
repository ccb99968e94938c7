//! Families of tangent planes whose upper envelope approximates a convex
//! discrepancy within an additive `ε` or a relative factor `1 + ε`.

mod family;
mod schedule;

pub use family::{
    build_additive_family, build_family, build_relative_family, family_size, DataWedge, FamilyParams,
    DEFAULT_RELATIVE_FLOOR,
};
pub use schedule::{default_k, grid_schedule, grid_schedule_with_k, GridSchedule};

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exp_family::{DiscrepancyFunction, NormalizedPair};
use crate::linear_max::LinearFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Additive,
    Relative,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Additive => "additive",
            Mode::Relative => "relative",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "additive" => Ok(Mode::Additive),
            "relative" => Ok(Mode::Relative),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

/// The plane `a1·m + a2·b + a3` tangent to `f` at `anchor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentPlane {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub anchor: NormalizedPair,
}

impl TangentPlane {
    pub fn at(f: &DiscrepancyFunction, anchor: NormalizedPair) -> Result<Self> {
        let v = f.eval(anchor)?;
        let [a1, a2] = f.gradient(anchor)?;
        Ok(Self { a1, a2, a3: v - a1 * anchor.m - a2 * anchor.b, anchor })
    }

    /// The constant plane at height 0, touching every function here along `m = b`.
    pub fn floor() -> Self {
        Self { a1: 0.0, a2: 0.0, a3: 0.0, anchor: NormalizedPair::new(0.5, 0.5) }
    }

    pub fn value(&self, p: NormalizedPair) -> f64 {
        self.a1 * p.m + self.a2 * p.b + self.a3
    }

    pub fn linear(&self) -> LinearFunction {
        LinearFunction::new(self.a1, self.a2, self.a3)
    }
}

/// A set of tangent planes with its approximation contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxFamily {
    pub planes: Vec<TangentPlane>,
    pub mode: Mode,
    pub epsilon: f64,
    /// When set, the last plane is [`TangentPlane::floor`].
    pub includes_floor_plane: bool,
    /// Value below which relative guarantees are not claimed.
    pub relative_floor: f64,
}

impl ApproxFamily {
    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }

    /// Planes that need a sweep; the floor plane is constant.
    pub fn swept_planes(&self) -> &[TangentPlane] {
        let n = self.planes.len() - usize::from(self.includes_floor_plane && !self.planes.is_empty());
        &self.planes[..n]
    }

    /// Upper envelope `l^U(p)`.
    pub fn envelope(&self, p: NormalizedPair) -> f64 {
        self.planes.iter().map(|pl| pl.value(p)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Certified upper bound on `f` given an envelope (or plane) value `lower`.
    pub fn upper_bound(&self, lower: f64) -> f64 {
        match self.mode {
            Mode::Additive => lower + self.epsilon,
            Mode::Relative => (1.0 + self.epsilon) * lower.max(self.relative_floor),
        }
    }

    /// Line format: `#` metadata lines, then one `a1 a2 a3 anchor_m anchor_b`
    /// line per plane.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# mode {}", self.mode);
        let _ = writeln!(out, "# epsilon {}", self.epsilon);
        let _ = writeln!(out, "# floor_plane {}", self.includes_floor_plane);
        let _ = writeln!(out, "# relative_floor {}", self.relative_floor);
        for p in &self.planes {
            let _ = writeln!(out, "{} {} {} {} {}", p.a1, p.a2, p.a3, p.anchor.m, p.anchor.b);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut fam = ApproxFamily {
            planes: Vec::new(),
            mode: Mode::Additive,
            epsilon: 0.0,
            includes_floor_plane: false,
            relative_floor: 0.0,
        };
        let bad = |line: usize, msg: String| Error::Parse { path: "<family>".into(), line, msg };
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if let Some(meta) = line.strip_prefix('#') {
                let mut it = meta.split_whitespace();
                let (Some(key), Some(val)) = (it.next(), it.next()) else { continue };
                let num = |v: &str| v.parse::<f64>().map_err(|e| bad(line_no, e.to_string()));
                match key {
                    "mode" => fam.mode = val.parse()?,
                    "epsilon" => fam.epsilon = num(val)?,
                    "relative_floor" => fam.relative_floor = num(val)?,
                    "floor_plane" => {
                        fam.includes_floor_plane = val.parse().map_err(|_| bad(line_no, format!("bad flag {val}")))?
                    }
                    _ => {}
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let v: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| bad(line_no, e.to_string()))?;
            if v.len() != 5 {
                return Err(bad(line_no, format!("expected 5 fields, found {}", v.len())));
            }
            fam.planes.push(TangentPlane {
                a1: v[0],
                a2: v[1],
                a3: v[2],
                anchor: NormalizedPair::new(v[3], v[4]),
            });
        }
        Ok(fam)
    }
}
