use std::collections::HashSet;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exp_family::{lambda_star, DiscrepancyFunction, DiscrepancyKind, NormalizedPair};
use crate::region::ConvexPolygon;

use super::{grid_schedule_with_k, ApproxFamily, Mode, TangentPlane};

/// Default value below which relative guarantees are not claimed.
pub const DEFAULT_RELATIVE_FLOOR: f64 = 0.1;

/// Mass-ratio limits that every region of a data set obeys.
///
/// If each point has `m(p) ≤ ρ·b(p)`, every region and its complement do too,
/// so `m_R ≤ κ·b_R` and `1 − m_R ≤ κ·(1 − b_R)` with `κ = ρ·B/M`. Using
/// `ρ = max m / min b` keeps the wedge unchanged when measurements are
/// permuted.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DataWedge {
    pub m_over_b: Option<f64>,
    pub b_over_m: Option<f64>,
}

impl DataWedge {
    pub fn from_masses(m: &[f64], b: &[f64]) -> Self {
        let total = |v: &[f64]| v.iter().sum::<f64>();
        let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
        let (tm, tb) = (total(m), total(b));
        let ratio = |num: &[f64], den: &[f64], scale: f64| {
            let d = min(den);
            (d > 0.0 && scale.is_finite() && scale > 0.0).then(|| max(num) / d * scale)
        };
        Self { m_over_b: ratio(m, b, tb / tm), b_over_m: ratio(b, m, tm / tb) }
    }

    pub fn region(&self) -> ConvexPolygon {
        let mut r = ConvexPolygon::square(0.0, 1.0);
        if let Some(k) = self.m_over_b {
            r = r.clip(1.0, -k, 0.0).clip(-1.0, k, k - 1.0);
        }
        if let Some(k) = self.b_over_m {
            r = r.clip(-k, 1.0, 0.0).clip(k, -1.0, k - 1.0);
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub epsilon: f64,
    pub mode: Mode,
    /// Support constant `C`; level `n_i` covers `S = [C/n_i, 1 − C/n_i]²`.
    pub support_c: f64,
    pub relative_floor: f64,
    /// Overrides the number of inner levels.
    pub k: Option<usize>,
    pub wedge: Option<DataWedge>,
}

impl Default for FamilyParams {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            mode: Mode::Additive,
            support_c: 1.0,
            relative_floor: DEFAULT_RELATIVE_FLOOR,
            k: None,
            wedge: None,
        }
    }
}

struct Level {
    region: ConvexPolygon,
    inner: Option<ConvexPolygon>,
    delta: f64,
}

/// Column ranges of one cell row: `c0..=c1` meets the region, `skip` lies
/// entirely inside the previous level.
struct Row {
    y0: f64,
    y1: f64,
    c0: isize,
    c1: isize,
    skip: Option<(isize, isize)>,
}

struct Grid {
    lo: [f64; 2],
    hi: [f64; 2],
    h: [f64; 2],
    cells: [usize; 2],
}

impl Grid {
    fn new(region: &ConvexPolygon, delta: f64) -> Self {
        let (lo, hi) = region.bbox();
        let count = |ext: f64| {
            if delta.is_finite() && ext > 0.0 {
                ((ext / delta).ceil() as usize).max(1)
            } else {
                1
            }
        };
        let cells = [count(hi[0] - lo[0]), count(hi[1] - lo[1])];
        let h = [(hi[0] - lo[0]) / cells[0] as f64, (hi[1] - lo[1]) / cells[1] as f64];
        Self { lo, hi, h, cells }
    }

    fn edge(&self, axis: usize, i: isize) -> f64 {
        if i as usize >= self.cells[axis] {
            self.hi[axis]
        } else {
            self.lo[axis] + i as f64 * self.h[axis]
        }
    }

    fn row(&self, level: &Level, j: usize) -> Option<Row> {
        let y0 = self.edge(1, j as isize);
        let y1 = self.edge(1, j as isize + 1);
        let (u, v) = level.region.x_range_in_band(y0, y1)?;
        let last = self.cells[0] as isize - 1;
        let col = |x: f64| {
            if self.h[0] > 0.0 {
                (((x - self.lo[0]) / self.h[0]).floor() as isize).clamp(0, last)
            } else {
                0
            }
        };
        let (c0, c1) = (col(u), col(v));
        let skip = level.inner.as_ref().and_then(|inner| {
            let (a0, b0) = inner.x_range_in_band(y0, y0)?;
            let (a1, b1) = inner.x_range_in_band(y1, y1)?;
            let (a, b) = (a0.max(a1), b0.min(b1));
            let x0 = |c: isize| self.edge(0, c);
            let x1 = |c: isize| self.edge(0, c + 1);
            let mut s0 = col(a).max(c0);
            while s0 > c0 && x0(s0 - 1) >= a {
                s0 -= 1;
            }
            while s0 <= c1 && x0(s0) < a {
                s0 += 1;
            }
            let mut s1 = col(b).min(c1);
            while s1 < c1 && x1(s1 + 1) <= b {
                s1 += 1;
            }
            while s1 >= c0 && x1(s1) > b {
                s1 -= 1;
            }
            (s0 <= s1).then_some((s0, s1))
        });
        Some(Row { y0, y1, c0, c1, skip })
    }
}

fn validate(f: &DiscrepancyFunction, n: f64, params: &FamilyParams) -> Result<Mode> {
    if !(params.epsilon > 0.0 && params.epsilon.is_finite()) {
        return Err(Error::Config(format!("epsilon {} must be positive", params.epsilon)));
    }
    if !(params.support_c > 0.0) {
        return Err(Error::Config(format!("support constant {} must be positive", params.support_c)));
    }
    if !(n >= 1.0) {
        return Err(Error::Config(format!("point count {n} must be at least 1")));
    }
    let mode = match (params.mode, f.kind) {
        (Mode::Relative, DiscrepancyKind::Gaussian) => Mode::Relative,
        (Mode::Relative, kind) => {
            warn!("relative families are only built for gaussian; using additive for {kind}");
            Mode::Additive
        }
        (Mode::Additive, _) => Mode::Additive,
    };
    if mode == Mode::Relative && !(params.relative_floor > 0.0) {
        return Err(Error::Config("relative floor must be positive".into()));
    }
    Ok(mode)
}

fn levels(f: &DiscrepancyFunction, n: f64, params: &FamilyParams, mode: Mode) -> Vec<Level> {
    let relative = mode == Mode::Relative;
    let schedule = grid_schedule_with_k(f.d_exponent(relative), n, params.k);
    let wedge = params.wedge.map(|w| w.region());
    let scale = if relative { params.relative_floor } else { 1.0 };
    let mut out: Vec<Level> = Vec::new();
    // Consecutive levels differ only in their support region; the wedge is
    // shared. A cell whose part inside the current region lies in the
    // previous support region is covered by the previous level, so the skip
    // test ignores the wedge and cells along its edges are not repeated.
    let mut prev_support: Option<ConvexPolygon> = None;
    for &ni in &schedule.levels {
        let c = params.support_c / ni;
        if c >= 0.5 {
            continue;
        }
        let support = f.support_region(c);
        let region = match &wedge {
            Some(w) => support.intersect(w),
            None => support.clone(),
        };
        if region.is_empty() {
            continue;
        }
        let lambda = lambda_star(f, &region);
        let delta = if lambda > 0.0 { 2.0 * (params.epsilon * scale / lambda).sqrt() } else { f64::INFINITY };
        let inner = prev_support.replace(support);
        out.push(Level { region, inner, delta });
    }
    out
}

/// Builds the family for `f` over `n` points.
///
/// Level `i` tiles the bounding box of its region with square cells of side
/// at most `δ_i = 2·sqrt(ε/λ_i)` (relative: `2·sqrt(εφ/λ_i)` for the floor
/// `φ`) and keeps the cells that meet the region but are not wholly inside
/// the previous level. The anchor of a cell is the projection of its centre
/// onto the region; projection does not increase distances, so every region
/// point of the cell is within `δ_i/√2` of it and the Taylor gap
/// `½·λ_i·‖p − q‖²` is at most `ε` (relative: `εφ`). A final constant plane
/// at 0 covers the floor.
pub fn build_family(f: &DiscrepancyFunction, n: f64, params: &FamilyParams) -> Result<ApproxFamily> {
    let mode = validate(f, n, params)?;
    let floor = params.relative_floor;
    let mut planes = Vec::new();
    let mut seen = HashSet::new();
    for level in levels(f, n, params, mode) {
        let grid = Grid::new(&level.region, level.delta);
        for j in 0..grid.cells[1] {
            let Some(row) = grid.row(&level, j) else { continue };
            for c in row.c0..=row.c1 {
                if row.skip.is_some_and(|(s0, s1)| (s0..=s1).contains(&c)) {
                    continue;
                }
                let (x0, x1) = (grid.edge(0, c), grid.edge(0, c + 1));
                if mode == Mode::Relative {
                    let corners = [[x0, row.y0], [x1, row.y0], [x0, row.y1], [x1, row.y1]];
                    let below = corners.iter().all(|&p| f.eval(p.into()).is_ok_and(|v| v < floor));
                    if below {
                        continue;
                    }
                }
                let anchor = level.region.project([0.5 * (x0 + x1), 0.5 * (row.y0 + row.y1)]);
                if seen.insert((anchor[0].to_bits(), anchor[1].to_bits())) {
                    planes.push(TangentPlane::at(f, NormalizedPair::from(anchor))?);
                }
            }
        }
    }
    planes.push(TangentPlane::floor());
    Ok(ApproxFamily {
        planes,
        mode,
        epsilon: params.epsilon,
        includes_floor_plane: true,
        relative_floor: if mode == Mode::Relative { floor } else { 0.0 },
    })
}

/// Additive family over `S_n` without a data wedge.
pub fn build_additive_family(f: &DiscrepancyFunction, n: f64, epsilon: f64, support_c: f64) -> Result<ApproxFamily> {
    build_family(f, n, &FamilyParams { epsilon, support_c, ..FamilyParams::default() })
}

/// Relative family over `S_n` with the default floor.
pub fn build_relative_family(f: &DiscrepancyFunction, n: f64, epsilon: f64, support_c: f64) -> Result<ApproxFamily> {
    build_family(f, n, &FamilyParams { epsilon, support_c, mode: Mode::Relative, ..FamilyParams::default() })
}

/// Number of planes [`build_family`] would produce, counted row by row without
/// materializing additive families. Cells whose centres project to the same
/// boundary point are counted once each, so this can exceed the built size by
/// a handful of planes.
pub fn family_size(f: &DiscrepancyFunction, n: f64, params: &FamilyParams) -> Result<usize> {
    let mode = validate(f, n, params)?;
    if mode == Mode::Relative {
        return build_family(f, n, params).map(|fam| fam.len());
    }
    let mut count = 1usize;
    for level in levels(f, n, params, mode) {
        let grid = Grid::new(&level.region, level.delta);
        for j in 0..grid.cells[1] {
            if let Some(row) = grid.row(&level, j) {
                let skipped = row.skip.map_or(0, |(s0, s1)| (s1 - s0 + 1) as usize);
                count += (row.c1 - row.c0 + 1) as usize - skipped;
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample(region: &ConvexPolygon, rng: &mut ChaCha8Rng, count: usize) -> Vec<NormalizedPair> {
        let (lo, hi) = region.bbox();
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let p = [rng.gen_range(lo[0]..=hi[0]), rng.gen_range(lo[1]..=hi[1])];
            if region.contains(p, 0.0) {
                out.push(p.into());
            }
        }
        out
    }

    #[test]
    fn additive_sandwich_and_lower_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let eps = 0.1;
        for f in [
            DiscrepancyFunction::kulldorff(),
            DiscrepancyFunction::gamma(),
            DiscrepancyFunction::jensen_shannon(),
            DiscrepancyFunction::bernoulli(0.35).unwrap(),
            DiscrepancyFunction::gaussian(),
        ] {
            let n = 24.0;
            let fam = build_additive_family(&f, n, eps, 1.0).unwrap();
            let region = f.support_region(1.0 / n);
            for q in sample(&region, &mut rng, 10_000) {
                let v = f.eval(q).unwrap();
                let env = fam.envelope(q);
                assert!(env <= v + 1e-9, "{} lower bound at {q:?}", f.name());
                assert!(v - env <= eps * (1.0 + 1e-6), "{} gap {} at {q:?}", f.name(), v - env);
            }
        }
    }

    #[test]
    fn anchors_cover_each_annulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let f = DiscrepancyFunction::kulldorff();
        let (n, eps) = (40.0, 0.1);
        let params = FamilyParams { epsilon: eps, ..FamilyParams::default() };
        let fam = build_family(&f, n, &params).unwrap();
        let lv = levels(&f, n, &params, Mode::Additive);
        let lambdas: Vec<f64> = lv.iter().map(|l| lambda_star(&f, &l.region)).collect();
        for q in sample(&f.support_region(1.0 / n), &mut rng, 5_000) {
            let qa = q.as_array();
            let i = lv.iter().position(|l| l.region.contains(qa, 0.0)).unwrap();
            let near = fam
                .swept_planes()
                .iter()
                .map(|p| (p.anchor.m - q.m).powi(2) + (p.anchor.b - q.b).powi(2))
                .fold(f64::INFINITY, f64::min);
            assert!(0.5 * near * lambdas[i] <= eps * (1.0 + 1e-9), "{q:?}");
        }
    }

    #[test]
    fn relative_sandwich_gaussian() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let f = DiscrepancyFunction::gaussian();
        let eps = 0.1;
        let n = 16.0;
        let fam = build_relative_family(&f, n, eps, 1.0).unwrap();
        assert_eq!(fam.mode, Mode::Relative);
        for q in sample(&f.support_region(1.0 / n), &mut rng, 10_000) {
            let v = f.eval(q).unwrap();
            let env = fam.envelope(q);
            assert!(env <= v + 1e-9);
            assert!(v <= fam.upper_bound(env) * (1.0 + 1e-9), "{q:?}: {v} vs {env}");
            if v >= DEFAULT_RELATIVE_FLOOR {
                assert!(v <= (1.0 + eps) * env + 1e-12);
            }
        }
    }

    #[test]
    fn relative_falls_back_for_kulldorff() {
        let f = DiscrepancyFunction::kulldorff();
        let fam = build_relative_family(&f, 32.0, 0.1, 1.0).unwrap();
        let add = build_additive_family(&f, 32.0, 0.1, 1.0).unwrap();
        assert_eq!(fam.mode, Mode::Additive);
        assert_eq!(fam.len(), add.len());
    }

    #[test]
    fn count_tracks_build() {
        for f in [DiscrepancyFunction::kulldorff(), DiscrepancyFunction::gaussian(), DiscrepancyFunction::jensen_shannon()] {
            for n in [8.0, 20.0, 40.0] {
                for eps in [0.05, 0.2] {
                    let params = FamilyParams { epsilon: eps, ..FamilyParams::default() };
                    let built = build_family(&f, n, &params).unwrap().len();
                    let counted = family_size(&f, n, &params).unwrap();
                    assert!(counted >= built, "{} n={n} eps={eps}", f.name());
                    assert!(counted - built <= 4 + built / 50, "{} n={n} eps={eps}: {counted} vs {built}", f.name());
                }
            }
        }
    }

    #[test]
    fn size_monotone() {
        let f = DiscrepancyFunction::kulldorff();
        let size = |n: f64, eps: f64| {
            family_size(&f, n, &FamilyParams { epsilon: eps, ..FamilyParams::default() }).unwrap()
        };
        assert!(size(64.0, 0.05) >= size(64.0, 0.1));
        assert!(size(64.0, 0.1) >= size(64.0, 0.2));
        assert!(size(128.0, 0.1) >= size(64.0, 0.1));
        assert!(size(64.0, 0.1) >= size(32.0, 0.1));
    }

    #[test]
    fn tiny_n_yields_floor_only() {
        let fam = build_additive_family(&DiscrepancyFunction::kulldorff(), 2.0, 0.1, 1.0).unwrap();
        assert_eq!(fam.len(), 1);
        assert!(fam.includes_floor_plane);
    }

    #[test]
    fn wedge_contains_every_region() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let m: Vec<f64> = (0..30).map(|_| rng.gen_range(0.5..3.0)).collect();
        let b: Vec<f64> = (0..30).map(|_| rng.gen_range(0.5..3.0)).collect();
        let (tm, tb): (f64, f64) = (m.iter().sum(), b.iter().sum());
        let w = DataWedge::from_masses(&m, &b).region();
        for _ in 0..2000 {
            let pick: Vec<bool> = (0..30).map(|_| rng.gen_bool(0.4)).collect();
            let sm: f64 = m.iter().zip(&pick).filter(|x| *x.1).map(|x| x.0).sum();
            let sb: f64 = b.iter().zip(&pick).filter(|x| *x.1).map(|x| x.0).sum();
            assert!(w.contains([sm / tm, sb / tb], 1e-12));
        }
    }

    #[test]
    fn wedged_families_keep_the_sandwich() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let eps = 0.1;
        for (f, wedge) in [
            (DiscrepancyFunction::kulldorff(), DataWedge { m_over_b: Some(4.0), b_over_m: Some(4.0) }),
            (DiscrepancyFunction::jensen_shannon(), DataWedge { m_over_b: Some(2.5), b_over_m: None }),
            (DiscrepancyFunction::gaussian(), DataWedge { m_over_b: Some(3.0), b_over_m: Some(1.5) }),
        ] {
            let n = 300.0;
            let params = FamilyParams { epsilon: eps, wedge: Some(wedge), ..FamilyParams::default() };
            let fam = build_family(&f, n, &params).unwrap();
            let region = f.support_region(1.0 / n).intersect(&wedge.region());
            let edge: Vec<NormalizedPair> = region.boundary_samples(2_000).map(NormalizedPair::from).collect();
            for q in sample(&region, &mut rng, 10_000).into_iter().chain(edge) {
                let Ok(v) = f.eval(q) else { continue };
                let gap = v - fam.envelope(q);
                assert!(gap <= eps * (1.0 + 1e-6), "{} gap {gap} at {q:?}", f.name());
            }
        }
    }

    #[test]
    fn wedge_shrinks_family() {
        let f = DiscrepancyFunction::kulldorff();
        let wedge = DataWedge::from_masses(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]);
        let plain = FamilyParams::default();
        let narrow = FamilyParams { wedge: Some(wedge), ..FamilyParams::default() };
        assert!(build_family(&f, 40.0, &narrow).unwrap().len() < build_family(&f, 40.0, &plain).unwrap().len());
    }

    #[test]
    fn rejects_bad_parameters() {
        let f = DiscrepancyFunction::kulldorff();
        assert!(build_additive_family(&f, 10.0, 0.0, 1.0).is_err());
        assert!(build_additive_family(&f, 10.0, 0.1, -1.0).is_err());
    }
}
