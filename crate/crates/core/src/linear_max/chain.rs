//! Chained interval nodes and their merge.

use crate::error::{Error, Result};

use super::SupportConstraint;

/// A contiguous run of leaves `lo..=hi` with its support masses and weight.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChainEntry {
    pub lo: u32,
    pub hi: u32,
    pub s: [f64; 2],
    pub value: f64,
}

impl ChainEntry {
    fn join(a: &ChainEntry, b: &ChainEntry) -> ChainEntry {
        ChainEntry {
            lo: a.lo,
            hi: b.hi,
            s: [a.s[0] + b.s[0], a.s[1] + b.s[1]],
            value: a.value + b.value,
        }
    }

    /// Larger value wins; equal values go to the lexicographically smaller span.
    pub fn beats(&self, other: &ChainEntry) -> bool {
        self.value > other.value
            || (self.value == other.value && (self.lo, self.hi) < (other.lo, other.hi))
    }
}

fn capped(e: &ChainEntry, cap: [f64; 2]) -> [f64; 2] {
    [e.s[0].min(cap[0]), e.s[1].min(cap[1])]
}

/// Borrowed view of a node.
#[derive(Debug, Clone, Copy)]
pub struct NodeRef<'a> {
    pub best: Option<ChainEntry>,
    /// Whole node as one entry; `value` is the total weight.
    pub total: ChainEntry,
    pub left: &'a [ChainEntry],
    pub right: &'a [ChainEntry],
}

/// Writes the frontier of boundary-anchored candidates into `out`.
///
/// `longest_first` yields the candidates from the longest span down. An
/// entry is dominated when a longer one has at least its capped support and
/// at least its value: any partner that makes the shorter one feasible makes
/// the longer one feasible too. Among entries with identical capped support
/// only the best survives, preferring the shorter entry when `prefer_short`
/// is set. The frontier is stored shortest first; its length is returned.
fn prune(
    longest_first: impl Iterator<Item = ChainEntry>,
    cap: [f64; 2],
    prefer_short: bool,
    out: &mut [ChainEntry],
) -> Result<usize> {
    let mut len = 0usize;
    let mut best_longer = f64::NEG_INFINITY;
    let mut run: Option<([f64; 2], ChainEntry)> = None;
    let mut flush = |rep: ChainEntry, len: &mut usize, best_longer: &mut f64| -> Result<()> {
        if rep.value >= *best_longer {
            if *len == out.len() {
                return Err(Error::ChainOverflow { len: *len + 1, cap: out.len() });
            }
            *best_longer = rep.value;
            out[*len] = rep;
            *len += 1;
        }
        Ok(())
    };
    for c in longest_first {
        let key = capped(&c, cap);
        match &mut run {
            Some((k, rep)) if *k == key => {
                if c.value > rep.value || (c.value == rep.value && prefer_short) {
                    *rep = c;
                }
            }
            _ => {
                if let Some((_, rep)) = run.take() {
                    flush(rep, &mut len, &mut best_longer)?;
                }
                run = Some((key, c));
            }
        }
    }
    if let Some((_, rep)) = run {
        flush(rep, &mut len, &mut best_longer)?;
    }
    out[..len].reverse();
    Ok(len)
}

/// Best feasible join of a suffix chain `l` with a prefix chain `r`.
///
/// Both chains grow in support and shrink in value with length, so for each
/// suffix the shortest feasible prefix is its best partner, and that prefix
/// only gets shorter as the suffix grows.
fn best_join(l: &[ChainEntry], r: &[ChainEntry], support: &SupportConstraint) -> Option<ChainEntry> {
    let mut best: Option<ChainEntry> = None;
    let mut t = r.len();
    for s in l {
        while t > 0 && support.meets_lower(s.s[0] + r[t - 1].s[0], s.s[1] + r[t - 1].s[1]) {
            t -= 1;
        }
        if t < r.len() {
            let c = ChainEntry::join(s, &r[t]);
            if best.map_or(true, |b| c.beats(&b)) {
                best = Some(c);
            }
        }
    }
    best
}

/// Result of [`merge_into`]: the new chains are the first `n_left` and
/// `n_right` entries of the output slices.
#[derive(Debug, Clone, Copy)]
pub struct Merged {
    pub best: Option<ChainEntry>,
    pub total: ChainEntry,
    pub n_left: usize,
    pub n_right: usize,
}

/// Merges two adjacent nodes, writing the new chains into `out_left` and
/// `out_right`. Their lengths are the chain capacity.
pub fn merge_into(
    l: NodeRef<'_>,
    r: NodeRef<'_>,
    support: &SupportConstraint,
    out_left: &mut [ChainEntry],
    out_right: &mut [ChainEntry],
) -> Result<Merged> {
    let mut best = match (l.best, r.best) {
        (Some(a), Some(b)) => Some(if b.beats(&a) { b } else { a }),
        (a, b) => a.or(b),
    };
    if let Some(c) = best_join(l.right, r.left, support) {
        if best.map_or(true, |b| c.beats(&b)) {
            best = Some(c);
        }
    }
    let total = ChainEntry::join(&l.total, &r.total);
    let cap = support.min;
    let lefts = r.left.iter().rev().map(|p| ChainEntry::join(&l.total, p)).chain(l.left.iter().rev().copied());
    let n_left = prune(lefts, cap, true, out_left)?;
    let rights = l.right.iter().rev().map(|s| ChainEntry::join(s, &r.total)).chain(r.right.iter().rev().copied());
    let n_right = prune(rights, cap, false, out_right)?;
    Ok(Merged { best, total, n_left, n_right })
}

/// Owned interval node, convenient outside the arena tree.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalNode {
    pub best: Option<ChainEntry>,
    pub total: ChainEntry,
    pub left_chain: Vec<ChainEntry>,
    pub right_chain: Vec<ChainEntry>,
    /// True for the identity node covering no leaves.
    pub empty: bool,
}

impl IntervalNode {
    pub fn empty() -> Self {
        Self { empty: true, ..Self::default() }
    }

    /// A single leaf at `rank` holding support masses `s` and weight `value`.
    pub fn leaf(rank: u32, s: [f64; 2], value: f64, support: &SupportConstraint) -> Self {
        let e = ChainEntry { lo: rank, hi: rank, s, value };
        Self {
            best: support.meets_lower(s[0], s[1]).then_some(e),
            total: e,
            left_chain: vec![e],
            right_chain: vec![e],
            empty: false,
        }
    }

    pub fn as_ref(&self) -> NodeRef<'_> {
        NodeRef {
            best: self.best,
            total: self.total,
            left: &self.left_chain,
            right: &self.right_chain,
        }
    }

    pub fn merge(&self, right: &IntervalNode, support: &SupportConstraint, k_max: usize) -> Result<Self> {
        if right.empty {
            return Ok(self.clone());
        }
        if self.empty {
            return Ok(right.clone());
        }
        let mut left_chain = vec![ChainEntry::default(); k_max.max(1)];
        let mut right_chain = left_chain.clone();
        let m = merge_into(self.as_ref(), right.as_ref(), support, &mut left_chain, &mut right_chain)?;
        left_chain.truncate(m.n_left);
        right_chain.truncate(m.n_right);
        Ok(Self { best: m.best, total: m.total, left_chain, right_chain, empty: false })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn support(c: f64) -> SupportConstraint {
        SupportConstraint::new(c).unwrap()
    }

    fn brute(leaves: &[([f64; 2], f64)], sup: &SupportConstraint) -> Option<f64> {
        let mut best: Option<f64> = None;
        for lo in 0..leaves.len() {
            let (mut s0, mut s1, mut v) = (0.0, 0.0, 0.0);
            for leaf in &leaves[lo..] {
                s0 += leaf.0[0];
                s1 += leaf.0[1];
                v += leaf.1;
                if sup.meets_lower(s0, s1) && best.map_or(true, |b| v > b) {
                    best = Some(v);
                }
            }
        }
        best
    }

    fn build(leaves: &[([f64; 2], f64)], sup: &SupportConstraint) -> IntervalNode {
        leaves
            .iter()
            .enumerate()
            .map(|(i, &(s, v))| IntervalNode::leaf(i as u32, s, v, sup))
            .fold(IntervalNode::empty(), |acc, n| acc.merge(&n, sup, 64).unwrap())
    }

    #[test]
    fn empty_is_identity() {
        let sup = support(1.0);
        let x = IntervalNode::leaf(3, [1.0, 2.0], 0.5, &sup);
        assert_eq!(IntervalNode::empty().merge(&x, &sup, 8).unwrap(), x);
        assert_eq!(x.merge(&IntervalNode::empty(), &sup, 8).unwrap(), x);
    }

    #[test]
    fn two_points_only_pair_feasible() {
        let sup = support(2.0);
        let a = IntervalNode::leaf(0, [1.0, 1.0], 2.0, &sup);
        let b = IntervalNode::leaf(1, [1.0, 1.0], -1.0, &sup);
        let m = a.merge(&b, &sup, 8).unwrap();
        let best = m.best.unwrap();
        assert_eq!((best.lo, best.hi, best.value), (0, 1, 1.0));
    }

    #[test]
    fn balanced_merges_match_interval_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sup = support(2.0);
        for _ in 0..100 {
            let leaves: Vec<([f64; 2], f64)> = (0..8)
                .map(|_| {
                    let m = [0.5, 1.0, 2.0][rng.gen_range(0..3)];
                    let b = [0.5, 1.0, 2.0][rng.gen_range(0..3)];
                    ([m, b], rng.gen_range(-3.0..3.0))
                })
                .collect();
            let nodes: Vec<IntervalNode> = leaves
                .iter()
                .enumerate()
                .map(|(i, &(s, v))| IntervalNode::leaf(i as u32, s, v, &sup))
                .collect();
            let mut level = nodes;
            while level.len() > 1 {
                level = level.chunks(2).map(|c| c[0].merge(&c[1], &sup, 64).unwrap()).collect();
            }
            let got = level[0].best.map(|b| b.value);
            let want = brute(&leaves, &sup);
            match (got, want) {
                (Some(g), Some(w)) => assert!((g - w).abs() < 1e-12),
                (g, w) => assert_eq!(g, w),
            }
            assert_eq!(build(&leaves, &sup).best.map(|b| b.value).is_some(), want.is_some());
        }
    }

    #[test]
    fn chains_are_frontiers() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let sup = support(3.0);
        for _ in 0..50 {
            let leaves: Vec<([f64; 2], f64)> = (0..16)
                .map(|_| ([rng.gen_range(0.5..1.5), rng.gen_range(0.5..1.5)], rng.gen_range(-2.0..2.0)))
                .collect();
            let node = build(&leaves, &sup);
            for chain in [&node.left_chain, &node.right_chain] {
                for w in chain.windows(2) {
                    let (a, b) = (&w[0], &w[1]);
                    assert!(a.hi - a.lo < b.hi - b.lo);
                    assert!(a.s[0] <= b.s[0] && a.s[1] <= b.s[1]);
                    assert!(a.value >= b.value);
                    assert!(!sup.meets_lower(a.s[0], a.s[1]), "only the last entry may be sufficient");
                }
                // Each entry's sums agree with the leaves it spans.
                for e in chain.iter() {
                    let span = &leaves[e.lo as usize..=e.hi as usize];
                    let v: f64 = span.iter().map(|l| l.1).sum();
                    assert!((v - e.value).abs() < 1e-12);
                }
                assert!(chain.len() <= 13);
            }
            assert!(node.left_chain.iter().all(|e| e.lo == 0));
            assert!(node.right_chain.iter().all(|e| e.hi == 15));
        }
    }

    #[test]
    fn overflow_is_reported() {
        let sup = support(10.0);
        let a = IntervalNode::leaf(0, [1.0, 1.0], 3.0, &sup);
        let b = IntervalNode::leaf(1, [1.0, 1.0], -1.0, &sup);
        let c = IntervalNode::leaf(2, [1.0, 1.0], -1.0, &sup);
        let ab = a.merge(&b, &sup, 8).unwrap();
        // Prefixes {a}, {a, b}, {a, b, c} have values 3, 2, 1 and are all deficient.
        assert!(matches!(ab.merge(&c, &sup, 1), Err(Error::ChainOverflow { .. })));
    }
}
