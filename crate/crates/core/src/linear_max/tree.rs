//! Static interval tree over x-ranks with per-slab activation.

use crate::error::Result;

use super::chain::{merge_into, ChainEntry, NodeRef};
use super::SupportConstraint;

fn view<'a>(h: &Head, left: &'a [ChainEntry], right: &'a [ChainEntry], off: usize) -> NodeRef<'a> {
    NodeRef {
        best: h.best,
        total: h.total,
        left: &left[off..off + h.n_left as usize],
        right: &right[off..off + h.n_right as usize],
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Head {
    best: Option<ChainEntry>,
    total: ChainEntry,
    n_left: u16,
    n_right: u16,
    epoch: u32,
    empty: bool,
}

/// Complete binary tree with one leaf per x-rank.
///
/// Chains live in two flat arenas with `k_max` slots per node. Instead of
/// clearing the tree between slabs, each node carries an epoch; a node from an
/// older epoch is read as the all-zero state of its span.
#[derive(Debug)]
pub struct IntervalTree {
    n_slots: usize,
    size: usize,
    k_max: usize,
    support: SupportConstraint,
    heads: Vec<Head>,
    left: Vec<ChainEntry>,
    right: Vec<ChainEntry>,
    epoch: u32,
    merges: u64,
}

impl IntervalTree {
    /// Builds an inactive tree over `n_slots ≥ 1` leaf positions.
    pub fn new(n_slots: usize, k_max: usize, support: SupportConstraint) -> Self {
        let n_slots = n_slots.max(1);
        let size = n_slots.next_power_of_two();
        let k_max = k_max.max(1);
        let mut heads = vec![Head::default(); 2 * size];
        for (i, h) in heads.iter_mut().enumerate().skip(1) {
            let (lo, hi) = Self::span_of(i, size);
            h.empty = lo >= n_slots;
            h.total = ChainEntry { lo: lo as u32, hi: hi.min(n_slots - 1) as u32, ..Default::default() };
        }
        Self {
            n_slots,
            size,
            k_max,
            support,
            heads,
            left: vec![ChainEntry::default(); 2 * size * k_max],
            right: vec![ChainEntry::default(); 2 * size * k_max],
            epoch: 1,
            merges: 0,
        }
    }

    fn span_of(i: usize, size: usize) -> (usize, usize) {
        let depth = usize::BITS - 1 - i.leading_zeros();
        let width = size >> depth;
        let lo = (i - (1 << depth)) * width;
        (lo, lo + width - 1)
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn support(&self) -> &SupportConstraint {
        &self.support
    }

    /// Number of tree levels above the leaves.
    pub fn depth(&self) -> u32 {
        self.size.trailing_zeros()
    }

    /// Total merges performed since construction.
    pub fn merge_count(&self) -> u64 {
        self.merges
    }

    /// Deactivates every leaf.
    pub fn reset(&mut self) {
        if self.epoch == u32::MAX {
            self.heads.iter_mut().for_each(|h| h.epoch = 0);
            self.epoch = 0;
        }
        self.epoch += 1;
    }

    fn materialize(&mut self, i: usize) {
        let h = &mut self.heads[i];
        if h.empty || h.epoch == self.epoch {
            return;
        }
        let (lo, hi) = (h.total.lo, h.total.hi);
        let zero = ChainEntry { lo, hi: lo, ..Default::default() };
        h.total = ChainEntry { lo, hi, ..Default::default() };
        h.best = self.support.meets_lower(0.0, 0.0).then_some(zero);
        h.n_left = 1;
        h.n_right = 1;
        h.epoch = self.epoch;
        self.left[i * self.k_max] = zero;
        self.right[i * self.k_max] = ChainEntry { lo, hi, ..Default::default() };
    }

    /// Adds support masses `s` and weight `value` to the leaf at `rank` and
    /// recomputes the path to the root.
    pub fn activate(&mut self, rank: usize, s: [f64; 2], value: f64) -> Result<()> {
        debug_assert!(rank < self.n_slots);
        let k = self.k_max;
        let mut i = self.size + rank;
        self.materialize(i);
        {
            let h = &mut self.heads[i];
            h.total.s[0] += s[0];
            h.total.s[1] += s[1];
            h.total.value += value;
            let e = h.total;
            h.best = self.support.meets_lower(e.s[0], e.s[1]).then_some(e);
            self.left[i * k] = e;
            self.right[i * k] = e;
        }
        i /= 2;
        while i >= 1 {
            let (a, b) = (2 * i, 2 * i + 1);
            self.materialize(a);
            self.materialize(b);
            self.merges += 1;
            if self.heads[b].empty {
                let ha = self.heads[a];
                self.left.copy_within(a * k..a * k + ha.n_left as usize, i * k);
                self.right.copy_within(a * k..a * k + ha.n_right as usize, i * k);
                let h = &mut self.heads[i];
                h.best = ha.best;
                h.total = ha.total;
                h.n_left = ha.n_left;
                h.n_right = ha.n_right;
            } else {
                let (ha, hb) = (self.heads[a], self.heads[b]);
                // Children live at 2i and 2i+1, past the parent's slot.
                let (left_parent, left_kids) = self.left.split_at_mut(a * k);
                let (right_parent, right_kids) = self.right.split_at_mut(a * k);
                let m = merge_into(
                    view(&ha, left_kids, right_kids, 0),
                    view(&hb, left_kids, right_kids, k),
                    &self.support,
                    &mut left_parent[i * k..(i + 1) * k],
                    &mut right_parent[i * k..(i + 1) * k],
                )?;
                let h = &mut self.heads[i];
                h.best = m.best;
                h.total = m.total;
                h.n_left = m.n_left as u16;
                h.n_right = m.n_right as u16;
            }
            self.heads[i].epoch = self.epoch;
            i /= 2;
        }
        Ok(())
    }

    /// Best support-feasible interval among the active leaves.
    pub fn root_best(&self) -> Option<ChainEntry> {
        let h = &self.heads[1];
        if h.epoch == self.epoch {
            h.best
        } else {
            None
        }
    }

    /// Current masses and weight of one leaf.
    pub fn leaf(&self, rank: usize) -> ([f64; 2], f64) {
        let h = &self.heads[self.size + rank];
        if h.epoch == self.epoch {
            (h.total.s, h.total.value)
        } else {
            ([0.0; 2], 0.0)
        }
    }

    /// Snapshot of a node's chains, for invariant checks.
    pub fn chains(&self, i: usize) -> Option<(Vec<ChainEntry>, Vec<ChainEntry>)> {
        let h = &self.heads[i];
        if h.empty || h.epoch != self.epoch {
            return None;
        }
        let k = self.k_max;
        Some((
            self.left[i * k..i * k + h.n_left as usize].to_vec(),
            self.right[i * k..i * k + h.n_right as usize].to_vec(),
        ))
    }

    /// Heap index of the leaf holding `rank`.
    pub fn leaf_index(&self, rank: usize) -> usize {
        self.size + rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute(leaves: &[([f64; 2], f64)], sup: &SupportConstraint) -> Option<f64> {
        let mut best: Option<f64> = None;
        for lo in 0..leaves.len() {
            let (mut s, mut v) = ([0.0; 2], 0.0);
            for leaf in &leaves[lo..] {
                s[0] += leaf.0[0];
                s[1] += leaf.0[1];
                v += leaf.1;
                if sup.meets_lower(s[0], s[1]) && best.map_or(true, |b| v > b) {
                    best = Some(v);
                }
            }
        }
        best
    }

    #[test]
    fn single_slot() {
        let sup = SupportConstraint::new(1.0).unwrap();
        let mut t = IntervalTree::new(1, 4, sup);
        assert!(t.root_best().is_none());
        t.activate(0, [1.0, 1.0], 2.0).unwrap();
        assert_eq!(t.root_best().unwrap().value, 2.0);
    }

    #[test]
    fn five_unit_points() {
        let sup = SupportConstraint::new(1.0).unwrap();
        let mut t = IntervalTree::new(5, 4, sup);
        assert_eq!(t.depth(), 3);
        for r in 0..5 {
            t.activate(r, [1.0, 1.0], 1.0).unwrap();
        }
        let b = t.root_best().unwrap();
        assert_eq!((b.lo, b.hi, b.value), (0, 4, 5.0));
    }

    #[test]
    fn first_activation_feasibility() {
        let sup = SupportConstraint::new(2.0).unwrap();
        let mut t = IntervalTree::new(6, 4, sup.clone());
        t.activate(3, [1.0, 5.0], 1.0).unwrap();
        assert!(t.root_best().is_none());
        let mut t = IntervalTree::new(6, 4, sup);
        t.activate(3, [2.0, 5.0], -1.0).unwrap();
        // Empty slots add nothing, so ties resolve to the smallest (lo, hi).
        let b = t.root_best().unwrap();
        assert_eq!((b.lo, b.hi), (0, 3));
    }

    #[test]
    fn duplicate_rank_accumulates() {
        let sup = SupportConstraint::new(2.0).unwrap();
        let mut t = IntervalTree::new(4, 4, sup);
        t.activate(2, [1.0, 1.0], 1.0).unwrap();
        t.activate(2, [1.0, 1.0], 0.5).unwrap();
        let b = t.root_best().unwrap();
        assert_eq!((b.lo, b.hi, b.value), (0, 2, 1.5));
        assert_eq!(t.leaf(2), ([2.0, 2.0], 1.5));
    }

    #[test]
    fn activations_track_oracle_and_merge_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let n = rng.gen_range(3..20);
            let sup = SupportConstraint::new(2.0).unwrap();
            let mut t = IntervalTree::new(n, 16, sup.clone());
            let mut leaves = vec![([0.0; 2], 0.0); n];
            for _ in 0..10 {
                let r = rng.gen_range(0..n);
                let s = [rng.gen_range(0.5..1.5), rng.gen_range(0.5..1.5)];
                let v = rng.gen_range(-2.0..2.0);
                let before = t.merge_count();
                t.activate(r, s, v).unwrap();
                assert!(t.merge_count() - before <= t.depth() as u64);
                leaves[r].0[0] += s[0];
                leaves[r].0[1] += s[1];
                leaves[r].1 += v;
                let got = t.root_best().map(|b| b.value);
                let want = brute(&leaves, &sup);
                assert_eq!(got.is_some(), want.is_some());
                if let (Some(g), Some(w)) = (got, want) {
                    assert!((g - w).abs() < 1e-12);
                }
            }
            t.reset();
            assert!(t.root_best().is_none());
            assert_eq!(t.leaf(0), ([0.0; 2], 0.0));
        }
    }
}
