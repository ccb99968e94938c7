//! Exact maximization of linear discrepancies over axis-parallel rectangles.
//!
//! A plane `a1·m_R + a2·b_R + a3` turns into a per-point weight
//! `χ(p) = a1·m(p)/M + a2·b(p)/B`, so the best rectangle is a maximum-weight
//! rectangle subject to minimum (and optionally maximum) support. The sweep
//! fixes a bottom y-level, activates levels upwards in an interval tree over
//! the x-ranks and reads the best feasible x-interval off the root.

mod brute;
mod chain;
mod kernel;
mod sweep;
mod tree;

pub use brute::RankGrid;
pub use chain::{merge_into, ChainEntry, IntervalNode, Merged, NodeRef};
pub use kernel::{DenseSlab, IntervalHit, Kernel, KernelKind, DENSE_SLOT_LIMIT};
pub use sweep::{sweep, sweep_prospective, ProspectiveLayout, SweepHit, SweepLayout};
pub use tree::IntervalTree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest point count accepted by [`brute_force_max`].
pub const ORACLE_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub x_rank: u32,
    pub y_rank: u32,
    pub t_rank: Option<u32>,
    pub m: f64,
    pub b: f64,
}

impl WeightedPoint {
    pub fn new(x_rank: u32, y_rank: u32, m: f64, b: f64) -> Self {
        Self { x_rank, y_rank, t_rank: None, m, b }
    }
}

/// The plane `a1·m_R + a2·b_R + a3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFunction {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl LinearFunction {
    pub const fn new(a1: f64, a2: f64, a3: f64) -> Self {
        Self { a1, a2, a3 }
    }

    /// Per-point weight `χ(p)` for totals `M`, `B`.
    pub fn weight(&self, m: f64, b: f64, total_m: f64, total_b: f64) -> f64 {
        self.a1 * m / total_m + self.a2 * b / total_b
    }

    pub fn at(&self, m_frac: f64, b_frac: f64) -> f64 {
        self.a1 * m_frac + self.a2 * b_frac + self.a3
    }
}

/// Raw-mass bounds on the two support measures of a candidate range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportConstraint {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl SupportConstraint {
    /// At least `c > 0` of each mass, no upper bound.
    pub fn new(c: f64) -> Result<Self> {
        Self::bounded([c, c], [f64::INFINITY; 2])
    }

    pub fn bounded(min: [f64; 2], max: [f64; 2]) -> Result<Self> {
        if !(min[0] > 0.0 && min[1] > 0.0) || min.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(format!("support minimum {min:?} must be positive")));
        }
        if !(max[0] >= min[0] && max[1] >= min[1]) {
            return Err(Error::Config(format!("support maximum {max:?} below minimum {min:?}")));
        }
        Ok(Self { min, max })
    }

    pub fn meets_lower(&self, s0: f64, s1: f64) -> bool {
        s0 >= self.min[0] && s1 >= self.min[1]
    }

    pub fn meets(&self, s: [f64; 2]) -> bool {
        self.meets_lower(s[0], s[1]) && s[0] <= self.max[0] && s[1] <= self.max[1]
    }
}

/// Closed rectangle in rank space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RankRect {
    pub x_lo: u32,
    pub x_hi: u32,
    pub y_lo: u32,
    pub y_hi: u32,
}

impl RankRect {
    pub fn contains(&self, x: u32, y: u32) -> bool {
        (self.x_lo..=self.x_hi).contains(&x) && (self.y_lo..=self.y_hi).contains(&y)
    }

    /// Lexicographic key `(y_lo, y_hi, x_lo, x_hi)` used for tie-breaking.
    pub fn key(&self) -> (u32, u32, u32, u32) {
        (self.y_lo, self.y_hi, self.x_lo, self.x_hi)
    }

    /// Shrinks to the bounding box of the selected points inside.
    /// Returns `self` unchanged when nothing is inside.
    pub fn tighten(&self, ranks: impl Iterator<Item = (u32, u32)>) -> RankRect {
        let mut out: Option<RankRect> = None;
        for (x, y) in ranks.filter(|&(x, y)| self.contains(x, y)) {
            out = Some(match out {
                None => RankRect { x_lo: x, x_hi: x, y_lo: y, y_hi: y },
                Some(r) => RankRect {
                    x_lo: r.x_lo.min(x),
                    x_hi: r.x_hi.max(x),
                    y_lo: r.y_lo.min(y),
                    y_hi: r.y_hi.max(y),
                },
            });
        }
        out.unwrap_or(*self)
    }
}

fn totals(points: &[WeightedPoint]) -> (f64, f64) {
    points.iter().fold((0.0, 0.0), |(m, b), p| (m + p.m, b + p.b))
}

fn weights(points: &[WeightedPoint], f: &LinearFunction) -> Vec<f64> {
    let (tm, tb) = totals(points);
    points.iter().map(|p| f.weight(p.m, p.b, tm, tb)).collect()
}

fn n_slots(points: &[WeightedPoint]) -> usize {
    points.iter().map(|p| p.x_rank as usize + 1).max().unwrap_or(1)
}

fn layout(points: &[WeightedPoint], keep: impl Fn(usize) -> bool) -> SweepLayout {
    let xr: Vec<u32> = points.iter().map(|p| p.x_rank).collect();
    let yr: Vec<u32> = points.iter().map(|p| p.y_rank).collect();
    let s: Vec<[f64; 2]> = points.iter().map(|p| [p.m, p.b]).collect();
    SweepLayout::new(n_slots(points), &xr, &yr, &s, keep)
}

/// Best support-feasible rectangle for `f`, with its plane value
/// `a1·m_R + a2·b_R + a3`. `None` when no rectangle meets the support.
pub fn max_rectangle(
    points: &[WeightedPoint],
    f: &LinearFunction,
    support: &SupportConstraint,
) -> Result<Option<(RankRect, f64)>> {
    max_rectangle_with(points, f, support, KernelKind::Auto, None)
}

/// [`max_rectangle`] with an explicit kernel and tree chain capacity.
pub fn max_rectangle_with(
    points: &[WeightedPoint],
    f: &LinearFunction,
    support: &SupportConstraint,
    kind: KernelKind,
    k_max: Option<usize>,
) -> Result<Option<(RankRect, f64)>> {
    let l = layout(points, |_| true);
    let k = k_max.unwrap_or_else(|| l.default_k_max(support));
    let mut kernel = Kernel::new(kind, l.n_slots(), k, support.clone());
    let w = weights(points, f);
    Ok(sweep(&l, &w, &mut kernel)?.map(|hit| {
        let rect = hit.rect.tighten(points.iter().map(|p| (p.x_rank, p.y_rank)));
        (rect, hit.value + f.a3)
    }))
}

/// Best pair of rectangle and suffix time window `t ≥ threshold`, returned as
/// `(rectangle, threshold t-rank, value)`. Masses stay fractions of the
/// totals over all points.
pub fn max_prospective(
    points: &[WeightedPoint],
    f: &LinearFunction,
    support: &SupportConstraint,
) -> Result<Option<(RankRect, u32, f64)>> {
    let t = time_ranks(points)?;
    let xr: Vec<u32> = points.iter().map(|p| p.x_rank).collect();
    let yr: Vec<u32> = points.iter().map(|p| p.y_rank).collect();
    let s: Vec<[f64; 2]> = points.iter().map(|p| [p.m, p.b]).collect();
    let pl = ProspectiveLayout::new(n_slots(points), &xr, &yr, &t, &s);
    let mut kernel = Kernel::new(KernelKind::Auto, n_slots(points), pl.default_k_max(support), support.clone());
    let w = weights(points, f);
    Ok(sweep_prospective(&pl, &w, &mut kernel)?.map(|(hit, tau)| {
        let inside = points.iter().zip(&t).filter(|(_, &tr)| tr >= tau).map(|(p, _)| (p.x_rank, p.y_rank));
        (hit.rect.tighten(inside), tau, hit.value + f.a3)
    }))
}

fn time_ranks(points: &[WeightedPoint]) -> Result<Vec<u32>> {
    points
        .iter()
        .map(|p| p.t_rank.ok_or_else(|| Error::Config("prospective scan needs timestamps on every point".into())))
        .collect()
}

fn brute_grid(points: &[WeightedPoint], f: &LinearFunction, keep: impl Fn(usize) -> bool) -> RankGrid<3> {
    let nx = n_slots(points);
    let ny = points.iter().map(|p| p.y_rank as usize + 1).max().unwrap_or(1);
    let w = weights(points, f);
    RankGrid::new(
        nx,
        ny,
        points
            .iter()
            .zip(&w)
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, (p, &w))| (p.x_rank, p.y_rank, [p.m, p.b, w])),
    )
}

fn brute_best(grid: &RankGrid<3>, support: &SupportConstraint) -> Option<(RankRect, f64)> {
    let mut best: Option<(RankRect, f64)> = None;
    grid.for_each_rect(|r| {
        let [m, b, v] = grid.sum(&r);
        if support.meets([m, b]) && best.map_or(true, |(_, bv)| v > bv) {
            best = Some((r, v));
        }
    });
    best
}

fn check_cap(n: usize) -> Result<()> {
    if n > ORACLE_CAP {
        return Err(Error::TooLarge { n, cap: ORACLE_CAP });
    }
    Ok(())
}

/// Reference maximizer enumerating every rank rectangle.
pub fn brute_force_max(
    points: &[WeightedPoint],
    f: &LinearFunction,
    support: &SupportConstraint,
) -> Result<Option<(RankRect, f64)>> {
    check_cap(points.len())?;
    let grid = brute_grid(points, f, |_| true);
    Ok(brute_best(&grid, support).map(|(r, v)| {
        (r.tighten(points.iter().map(|p| (p.x_rank, p.y_rank))), v + f.a3)
    }))
}

/// Reference prospective maximizer over every (rectangle, time suffix) pair.
pub fn brute_force_prospective(
    points: &[WeightedPoint],
    f: &LinearFunction,
    support: &SupportConstraint,
) -> Result<Option<(RankRect, u32, f64)>> {
    check_cap(points.len())?;
    let t = time_ranks(points)?;
    let mut taus = t.clone();
    taus.sort_unstable();
    taus.dedup();
    let mut best: Option<(RankRect, u32, f64)> = None;
    for tau in taus {
        let grid = brute_grid(points, f, |i| t[i] >= tau);
        if let Some((r, v)) = brute_best(&grid, support) {
            if best.map_or(true, |(_, _, bv)| v > bv) {
                best = Some((r, tau, v));
            }
        }
    }
    Ok(best.map(|(r, tau, v)| {
        let inside = points.iter().zip(&t).filter(|(_, &tr)| tr >= tau).map(|(p, _)| (p.x_rank, p.y_rank));
        (r.tighten(inside), tau, v + f.a3)
    }))
}
