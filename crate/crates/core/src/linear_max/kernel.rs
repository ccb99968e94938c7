//! Per-slab interval maximizers driven by the sweep.

use crate::error::Result;

use super::tree::IntervalTree;
use super::SupportConstraint;

/// Slot counts up to this use the dense kernel by default. Its queries are
/// linear in the occupied columns but the sweep skips most of them, while
/// the tree pays chain merges on every activation. Past this size the tree's
/// worst case wins out.
pub const DENSE_SLOT_LIMIT: usize = 512;

/// Best interval as `(lo, hi, support, value)`.
pub type IntervalHit = (u32, u32, [f64; 2], f64);

/// Which per-slab maximizer a sweep uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelKind {
    /// Dense up to [`DENSE_SLOT_LIMIT`] slots, tree above.
    #[default]
    Auto,
    Tree,
    Dense,
}

/// Column sums of the active slab with a query linear in the occupied columns.
#[derive(Debug, Clone)]
pub struct DenseSlab {
    support: SupportConstraint,
    s: Vec<[f64; 2]>,
    w: Vec<f64>,
    on: Vec<bool>,
    cols: Vec<u32>,
    prefix_s: Vec<[f64; 2]>,
    prefix_w: Vec<f64>,
}

impl DenseSlab {
    pub fn new(n_slots: usize, support: SupportConstraint) -> Self {
        let n = n_slots.max(1);
        Self {
            support,
            s: vec![[0.0; 2]; n],
            w: vec![0.0; n],
            on: vec![false; n],
            cols: Vec::with_capacity(n),
            prefix_s: vec![[0.0; 2]; n + 1],
            prefix_w: vec![0.0; n + 1],
        }
    }

    pub fn reset(&mut self) {
        for &c in &self.cols {
            let c = c as usize;
            self.s[c] = [0.0; 2];
            self.w[c] = 0.0;
            self.on[c] = false;
        }
        self.cols.clear();
    }

    pub fn activate(&mut self, rank: usize, s: [f64; 2], value: f64) {
        if !self.on[rank] {
            self.on[rank] = true;
            let at = self.cols.partition_point(|&c| (c as usize) < rank);
            self.cols.insert(at, rank as u32);
        }
        self.s[rank][0] += s[0];
        self.s[rank][1] += s[1];
        self.w[rank] += value;
    }

    pub fn leaf(&self, rank: usize) -> ([f64; 2], f64) {
        (self.s[rank], self.w[rank])
    }

    /// Best interval meeting the lower bounds: for each right end the best
    /// left end is the smallest prefix weight among the left ends that still
    /// leave enough support, and that set only grows with the right end.
    ///
    /// Only occupied columns are visited. Reported bounds absorb the empty
    /// slots to the left of the interval, matching the tree's tie rule.
    pub fn best(&mut self) -> Option<IntervalHit> {
        self.best_and_free().0
    }

    /// [`best`](Self::best) together with the best interval value ignoring
    /// support, which upper-bounds the first.
    pub fn best_and_free(&mut self) -> (Option<IntervalHit>, f64) {
        let n = self.cols.len();
        let [min0, min1] = self.support.min;
        let ps = &mut self.prefix_s[..=n];
        let pw = &mut self.prefix_w[..=n];
        let (mut acc, mut acc_w) = ([0.0; 2], 0.0);
        for ((&c, p), q) in self.cols.iter().zip(&mut ps[1..]).zip(&mut pw[1..]) {
            let s = self.s[c as usize];
            acc = [acc[0] + s[0], acc[1] + s[1]];
            acc_w += self.w[c as usize];
            *p = acc;
            *q = acc_w;
        }
        let (ps, pw) = (&*ps, &*pw);
        let mut next = 0usize;
        let (mut min_w, mut min_lo) = (f64::INFINITY, 0usize);
        let mut best: Option<(usize, usize, f64)> = None;
        let (mut free_min, mut free) = (0.0f64, f64::NEG_INFINITY);
        for (hi, (top, top_w)) in ps[1..].iter().zip(&pw[1..]).enumerate() {
            free = free.max(top_w - free_min);
            free_min = free_min.min(*top_w);
            while next <= hi {
                let lo = ps[next];
                if !(top[0] - lo[0] >= min0 && top[1] - lo[1] >= min1) {
                    break;
                }
                if pw[next] < min_w {
                    min_w = pw[next];
                    min_lo = next;
                }
                next += 1;
            }
            if next > 0 {
                let v = top_w - min_w;
                if best.map_or(true, |(_, _, bv)| v > bv) {
                    best = Some((min_lo, hi, v));
                }
            }
        }
        let hit = best.map(|(lo, hi, v)| {
            let sup = [ps[hi + 1][0] - ps[lo][0], ps[hi + 1][1] - ps[lo][1]];
            let slot_lo = if lo == 0 { 0 } else { self.cols[lo - 1] + 1 };
            (slot_lo, self.cols[hi], sup, v)
        });
        (hit, free)
    }
}

/// A per-slab maximizer: either the chained interval tree or dense columns.
#[derive(Debug)]
pub enum Kernel {
    Tree(IntervalTree),
    Dense(DenseSlab),
}

impl Kernel {
    pub fn new(kind: KernelKind, n_slots: usize, k_max: usize, support: SupportConstraint) -> Self {
        let dense = match kind {
            KernelKind::Auto => n_slots <= DENSE_SLOT_LIMIT,
            KernelKind::Tree => false,
            KernelKind::Dense => true,
        };
        if dense {
            Self::Dense(DenseSlab::new(n_slots, support))
        } else {
            Self::Tree(IntervalTree::new(n_slots, k_max, support))
        }
    }

    pub fn support(&self) -> &SupportConstraint {
        match self {
            Self::Tree(t) => t.support(),
            Self::Dense(d) => &d.support,
        }
    }

    pub fn n_slots(&self) -> usize {
        match self {
            Self::Tree(t) => t.n_slots(),
            Self::Dense(d) => d.s.len(),
        }
    }

    pub fn reset(&mut self) {
        match self {
            Self::Tree(t) => t.reset(),
            Self::Dense(d) => d.reset(),
        }
    }

    pub fn activate(&mut self, rank: usize, s: [f64; 2], value: f64) -> Result<()> {
        match self {
            Self::Tree(t) => t.activate(rank, s, value),
            Self::Dense(d) => {
                d.activate(rank, s, value);
                Ok(())
            }
        }
    }

    pub fn leaf(&self, rank: usize) -> ([f64; 2], f64) {
        match self {
            Self::Tree(t) => t.leaf(rank),
            Self::Dense(d) => d.leaf(rank),
        }
    }

    /// Best interval meeting the lower bounds.
    pub fn best(&mut self) -> Option<IntervalHit> {
        self.best_and_free().0
    }

    /// Best interval plus an upper bound on every interval's value, infinite
    /// when the kernel does not track one.
    pub fn best_and_free(&mut self) -> (Option<IntervalHit>, f64) {
        match self {
            Self::Tree(t) => (t.root_best().map(|e| (e.lo, e.hi, e.s, e.value)), f64::INFINITY),
            Self::Dense(d) => d.best_and_free(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dense_matches_tree() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..300 {
            let n = rng.gen_range(1..20);
            let sup = SupportConstraint::new([0.5, 1.0, 2.0, 4.0][rng.gen_range(0..4)]).unwrap();
            let mut tree = Kernel::new(KernelKind::Tree, n, 64, sup.clone());
            let mut dense = Kernel::new(KernelKind::Dense, n, 64, sup);
            for _ in 0..rng.gen_range(1..30) {
                let r = rng.gen_range(0..n);
                let s = [[0.5, 1.0, 2.0][rng.gen_range(0..3)], [0.5, 1.0, 2.0][rng.gen_range(0..3)]];
                let v = rng.gen_range(-4..5) as f64 * 0.25;
                tree.activate(r, s, v).unwrap();
                dense.activate(r, s, v).unwrap();
                let (a, b) = (tree.best(), dense.best());
                assert_eq!(a.map(|h| (h.0, h.1, h.3)), b.map(|h| (h.0, h.1, h.3)));
            }
        }
    }

    #[test]
    fn auto_picks_by_size() {
        let sup = SupportConstraint::new(1.0).unwrap();
        assert!(matches!(Kernel::new(KernelKind::Auto, 10, 4, sup.clone()), Kernel::Dense(_)));
        assert!(matches!(Kernel::new(KernelKind::Auto, DENSE_SLOT_LIMIT + 1, 4, sup), Kernel::Tree(_)));
    }
}
