//! Slab sweep over y-levels driving a per-slab interval kernel.

use crate::error::Result;

use super::kernel::{IntervalHit, Kernel};
use super::{RankRect, SupportConstraint};

/// Points ordered for the sweep: grouped by y-level, with their support masses.
///
/// Weights are supplied per sweep so one layout serves every linear function.
#[derive(Debug, Clone)]
pub struct SweepLayout {
    n_slots: usize,
    index: Vec<u32>,
    x: Vec<u32>,
    s: Vec<[f64; 2]>,
    level_start: Vec<usize>,
    level_y: Vec<u32>,
    level_s: Vec<[f64; 2]>,
}

impl SweepLayout {
    /// Lays out the points `i` with `keep(i)`. `support[i]` holds the two
    /// masses that the support constraint is checked against.
    pub fn new(
        n_slots: usize,
        x_rank: &[u32],
        y_rank: &[u32],
        support: &[[f64; 2]],
        keep: impl Fn(usize) -> bool,
    ) -> Self {
        let mut index: Vec<u32> = (0..x_rank.len() as u32).filter(|&i| keep(i as usize)).collect();
        index.sort_by_key(|&i| (y_rank[i as usize], x_rank[i as usize], i));
        let x = index.iter().map(|&i| x_rank[i as usize]).collect();
        let s: Vec<[f64; 2]> = index.iter().map(|&i| support[i as usize]).collect();
        let mut level_start = Vec::new();
        let mut level_y = Vec::new();
        let mut level_s: Vec<[f64; 2]> = Vec::new();
        for (pos, &i) in index.iter().enumerate() {
            let y = y_rank[i as usize];
            if level_y.last() != Some(&y) {
                level_start.push(pos);
                level_y.push(y);
                level_s.push([0.0; 2]);
            }
            let acc = level_s.last_mut().expect("level pushed above");
            acc[0] += s[pos][0];
            acc[1] += s[pos][1];
        }
        level_start.push(index.len());
        Self { n_slots, index, x, s, level_start, level_y, level_s }
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn levels(&self) -> usize {
        self.level_y.len()
    }

    /// Smallest strictly positive support mass per coordinate.
    pub fn min_positive_support(&self) -> [f64; 2] {
        let mut out = [f64::INFINITY; 2];
        for s in &self.s {
            for k in 0..2 {
                if s[k] > 0.0 {
                    out[k] = out[k].min(s[k]);
                }
            }
        }
        out
    }

    /// Chain capacity that pruned chains can never exceed: each kept entry
    /// strictly raises a capped support coordinate, which can happen at most
    /// `⌈min_k / μ_k⌉` times per coordinate.
    pub fn default_k_max(&self, support: &SupportConstraint) -> usize {
        let mu = self.min_positive_support();
        let steps = |k: usize| {
            if mu[k].is_finite() {
                (support.min[k] / mu[k]).ceil().max(0.0) as usize
            } else {
                0
            }
        };
        steps(0) + steps(1) + 1
    }
}

/// Best rectangle of one sweep, with the raw weight sum (offset excluded).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepHit {
    pub rect: RankRect,
    pub value: f64,
    pub support: [f64; 2],
}

fn exceeds(s: [f64; 2], max: [f64; 2]) -> bool {
    s[0] > max[0] || s[1] > max[1]
}

/// Exhaustive interval search over the current leaves, used for slabs whose
/// totals break an upper bound (kernels only track lower bounds).
fn bounded_intervals(kernel: &Kernel, support: &SupportConstraint) -> Option<IntervalHit> {
    let n = kernel.n_slots();
    let leaves: Vec<([f64; 2], f64)> = (0..n).map(|r| kernel.leaf(r)).collect();
    let mut best: Option<IntervalHit> = None;
    for lo in 0..n {
        let (mut s, mut v) = ([0.0; 2], 0.0);
        for (hi, leaf) in leaves.iter().enumerate().skip(lo) {
            s[0] += leaf.0[0];
            s[1] += leaf.0[1];
            v += leaf.1;
            if exceeds(s, support.max) {
                break;
            }
            if support.meets(s) && best.map_or(true, |b| v > b.3) {
                best = Some((lo as u32, hi as u32, s, v));
            }
        }
    }
    best
}

/// Maximizes the summed weight over support-feasible rank rectangles.
///
/// `weights` is indexed by original point index. Returned rectangles are in
/// the sweep's raw form and may have slack around the contained points.
pub fn sweep(layout: &SweepLayout, weights: &[f64], kernel: &mut Kernel) -> Result<Option<SweepHit>> {
    let support = kernel.support().clone();
    let levels = layout.levels();
    // suffix[j] = total support of levels j..; gain[j] bounds any rectangle
    // starting at level j by its positive weight.
    let mut suffix = vec![[0.0; 2]; levels + 1];
    let mut gain = vec![0.0; levels + 1];
    for j in (0..levels).rev() {
        suffix[j] = [suffix[j + 1][0] + layout.level_s[j][0], suffix[j + 1][1] + layout.level_s[j][1]];
        let pos: f64 = (layout.level_start[j]..layout.level_start[j + 1])
            .map(|p| weights[layout.index[p] as usize].max(0.0))
            .sum();
        gain[j] = gain[j + 1] + pos;
    }
    // Rounding allowance for the pruning bounds below.
    let tol = 1e-10 * layout.index.iter().map(|&i| weights[i as usize].abs()).sum::<f64>();
    let mut best: Option<SweepHit> = None;
    for j in 0..levels {
        if !support.meets_lower(suffix[j][0], suffix[j][1]) {
            break;
        }
        // Later starts lose ties, so an unbeatable bound ends the sweep.
        if best.is_some_and(|b| gain[j] <= b.value) {
            break;
        }
        kernel.reset();
        let mut slab = [0.0; 2];
        // Upper bound on every interval of the slab: the last exact
        // unconstrained optimum plus the positive weight added since.
        let mut bound = 0.0f64;
        for k in j..levels {
            bound += gain[k] - gain[k + 1];
            for p in layout.level_start[k]..layout.level_start[k + 1] {
                kernel.activate(layout.x[p] as usize, layout.s[p], weights[layout.index[p] as usize])?;
            }
            slab[0] += layout.level_s[k][0];
            slab[1] += layout.level_s[k][1];
            if !support.meets_lower(slab[0], slab[1]) || best.is_some_and(|b| bound + tol <= b.value) {
                continue;
            }
            let hit = if exceeds(slab, support.max) {
                bounded_intervals(kernel, &support)
            } else {
                let (hit, free) = kernel.best_and_free();
                bound = bound.min(free);
                hit
            };
            if let Some((lo, hi, s, v)) = hit {
                if best.map_or(true, |b| v > b.value) {
                    best = Some(SweepHit {
                        rect: RankRect { x_lo: lo, x_hi: hi, y_lo: layout.level_y[j], y_hi: layout.level_y[k] },
                        value: v,
                        support: s,
                    });
                }
            }
        }
    }
    Ok(best)
}

/// One layout per distinct time threshold, restricted to points at or after it.
#[derive(Debug, Clone)]
pub struct ProspectiveLayout {
    windows: Vec<(u32, SweepLayout)>,
}

impl ProspectiveLayout {
    pub fn new(n_slots: usize, x_rank: &[u32], y_rank: &[u32], t_rank: &[u32], support: &[[f64; 2]]) -> Self {
        let mut ts: Vec<u32> = t_rank.to_vec();
        ts.sort_unstable();
        ts.dedup();
        let windows = ts
            .into_iter()
            .map(|tau| (tau, SweepLayout::new(n_slots, x_rank, y_rank, support, |i| t_rank[i] >= tau)))
            .collect();
        Self { windows }
    }

    pub fn windows(&self) -> impl Iterator<Item = (u32, &SweepLayout)> {
        self.windows.iter().map(|(t, l)| (*t, l))
    }

    pub fn default_k_max(&self, support: &SupportConstraint) -> usize {
        self.windows.first().map_or(1, |(_, l)| l.default_k_max(support))
    }
}

/// Best rectangle over every suffix time window; earlier thresholds win ties.
pub fn sweep_prospective(
    layout: &ProspectiveLayout,
    weights: &[f64],
    kernel: &mut Kernel,
) -> Result<Option<(SweepHit, u32)>> {
    let mut best: Option<(SweepHit, u32)> = None;
    for (tau, l) in layout.windows() {
        if let Some(hit) = sweep(l, weights, kernel)? {
            if best.map_or(true, |(b, _)| hit.value > b.value) {
                best = Some((hit, tau));
            }
        }
    }
    Ok(best)
}
