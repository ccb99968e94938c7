use rayon::prelude::*;

use crate::data::PointStore;
use crate::error::{Error, Result};
use crate::exp_family::{DiscrepancyFunction, DiscrepancyKind, NormalizedPair};
use crate::linear_max::{
    sweep, sweep_prospective, Kernel, KernelKind, ProspectiveLayout, RankRect, SupportConstraint, SweepLayout,
};
use crate::tangent_family::{build_family, ApproxFamily, DataWedge, FamilyParams, TangentPlane};

use super::{PlaneRecord, RectBounds, ScanConfig, ScanResult};

/// Relative slack on support thresholds so that regions sitting exactly on
/// `C/n` survive rounding in the mass sums.
pub(crate) const SUPPORT_SLACK: f64 = 1e-9;

/// The discrepancy, totals and raw support bounds of one data set.
#[derive(Debug, Clone)]
pub(crate) struct Problem {
    pub f: DiscrepancyFunction,
    pub totals: [f64; 2],
    pub support: SupportConstraint,
    bernoulli: bool,
}

impl Problem {
    /// `None` when `C/n ≥ 1/2`, i.e. no region can meet the support.
    pub fn new(store: &PointStore, config: &ScanConfig) -> Result<Option<Self>> {
        config.validate()?;
        let (tm, tb) = (store.total_m(), store.total_b());
        let bernoulli = config.function == DiscrepancyKind::Bernoulli;
        let f = match config.function {
            DiscrepancyKind::Bernoulli => {
                if let Some(i) = store.points().iter().position(|p| p.m > p.b) {
                    return Err(Error::Validation {
                        row: i,
                        column: "m".into(),
                        msg: "bernoulli successes exceed trials".into(),
                    });
                }
                if tm >= tb {
                    return Err(Error::Degenerate("every bernoulli trial is a success".into()));
                }
                DiscrepancyFunction::bernoulli(tm / tb)?
            }
            DiscrepancyKind::Generic1Exp(spec) => DiscrepancyFunction::generic(spec, tm / tb)?,
            kind => DiscrepancyFunction::new(kind),
        }
        .with_scale(config.scale)?;
        let c = config.support_c / store.len() as f64;
        if c >= 0.5 {
            return Ok(None);
        }
        let s_tot = if bernoulli { [tm, tb - tm] } else { [tm, tb] };
        let support = SupportConstraint::bounded(
            [c * s_tot[0] * (1.0 - SUPPORT_SLACK), c * s_tot[1] * (1.0 - SUPPORT_SLACK)],
            [(1.0 - c) * s_tot[0] * (1.0 + SUPPORT_SLACK), (1.0 - c) * s_tot[1] * (1.0 + SUPPORT_SLACK)],
        )?;
        Ok(Some(Self { f, totals: [tm, tb], support, bernoulli }))
    }

    /// The two masses the support constraint applies to: `(m, b)`, or
    /// `(successes, failures)` for Bernoulli data.
    pub fn support_of(&self, m: f64, b: f64) -> [f64; 2] {
        if self.bernoulli {
            [m, b - m]
        } else {
            [m, b]
        }
    }

    pub fn pair_from_support(&self, s: [f64; 2]) -> NormalizedPair {
        let b = if self.bernoulli { s[0] + s[1] } else { s[1] };
        NormalizedPair::new(s[0] / self.totals[0], b / self.totals[1])
    }

    pub fn support_masses(&self, store: &PointStore) -> Vec<[f64; 2]> {
        store.points().iter().map(|p| self.support_of(p.m, p.b)).collect()
    }

    pub fn is_bernoulli(&self) -> bool {
        self.bernoulli
    }
}

/// Problem plus its tangent family, shared by the observed scan and every
/// randomization replica.
#[derive(Debug, Clone)]
pub(crate) struct Prepared {
    pub problem: Problem,
    pub family: ApproxFamily,
}

impl Prepared {
    pub fn new(store: &PointStore, config: &ScanConfig) -> Result<Option<Self>> {
        let Some(problem) = Problem::new(store, config)? else { return Ok(None) };
        let wedge = (config.use_wedge && !problem.is_bernoulli()).then(|| {
            let m: Vec<f64> = store.points().iter().map(|p| p.m).collect();
            let b: Vec<f64> = store.points().iter().map(|p| p.b).collect();
            DataWedge::from_masses(&m, &b)
        });
        let params = FamilyParams {
            epsilon: config.epsilon,
            mode: config.mode,
            support_c: config.support_c,
            relative_floor: config.relative_floor,
            k: config.levels,
            wedge,
        };
        let family = build_family(&problem.f, store.len() as f64, &params)?;
        Ok(Some(Self { problem, family }))
    }
}

pub(crate) enum Layout {
    Plain(SweepLayout),
    Prospective(ProspectiveLayout),
}

impl Layout {
    pub fn new(store: &PointStore, problem: &Problem, prospective: bool) -> Result<Self> {
        let n = store.len();
        let xr: Vec<u32> = (0..n).map(|i| store.x_rank(i)).collect();
        let yr: Vec<u32> = (0..n).map(|i| store.y_rank(i)).collect();
        let s = problem.support_masses(store);
        let slots = store.xs().len();
        if prospective {
            let tr: Vec<u32> = (0..n)
                .map(|i| store.t_rank(i).ok_or_else(|| Error::Config("prospective scan needs timestamps".into())))
                .collect::<Result<_>>()?;
            Ok(Layout::Prospective(ProspectiveLayout::new(slots, &xr, &yr, &tr, &s)))
        } else {
            Ok(Layout::Plain(SweepLayout::new(slots, &xr, &yr, &s, |_| true)))
        }
    }

    fn k_max(&self, support: &SupportConstraint) -> usize {
        match self {
            Layout::Plain(l) => l.default_k_max(support),
            Layout::Prospective(l) => l.default_k_max(support),
        }
    }
}

/// Best rectangle for one plane.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Candidate {
    pub plane: usize,
    pub rect: RankRect,
    pub plane_value: f64,
    pub support: [f64; 2],
    pub tau: Option<u32>,
}

fn sweep_plane(
    prep: &Prepared,
    store: &PointStore,
    layout: &Layout,
    kernel: &mut Kernel,
    (i, plane): (usize, &TangentPlane),
) -> Result<Option<Candidate>> {
    let [tm, tb] = prep.problem.totals;
    let lin = plane.linear();
    let w: Vec<f64> = store.points().iter().map(|p| lin.weight(p.m, p.b, tm, tb)).collect();
    let hit = match layout {
        Layout::Plain(l) => sweep(l, &w, kernel)?.map(|h| (h, None)),
        Layout::Prospective(l) => sweep_prospective(l, &w, kernel)?.map(|(h, t)| (h, Some(t))),
    };
    Ok(hit.map(|(h, tau)| Candidate {
        plane: i,
        rect: h.rect,
        plane_value: h.value + lin.a3,
        support: h.support,
        tau,
    }))
}

fn new_kernel(prep: &Prepared, store: &PointStore, layout: &Layout, config: &ScanConfig) -> Kernel {
    let support = &prep.problem.support;
    let k_max = config.chain_capacity.unwrap_or_else(|| layout.k_max(support));
    Kernel::new(KernelKind::Auto, store.xs().len(), k_max, support.clone())
}

/// Runs one sweep per non-floor plane, in plane order.
pub(crate) fn sweep_planes(
    prep: &Prepared,
    store: &PointStore,
    layout: &Layout,
    config: &ScanConfig,
    parallel: bool,
) -> Result<Vec<Option<Candidate>>> {
    let planes = prep.family.swept_planes();
    let init = || new_kernel(prep, store, layout, config);
    let run = |kernel: &mut Kernel, x| sweep_plane(prep, store, layout, kernel, x);
    if parallel {
        planes.par_iter().enumerate().map_init(init, run).collect()
    } else {
        let mut kernel = init();
        planes.iter().enumerate().map(|x| run(&mut kernel, x)).collect()
    }
}

/// Keeps the candidates with `m_R > b_R`.
pub fn apply_one_sided<T>(candidates: impl IntoIterator<Item = (NormalizedPair, T)>) -> Vec<(NormalizedPair, T)> {
    candidates.into_iter().filter(|(p, _)| p.m > p.b).collect()
}

/// Best discrepancy among the candidates, in plane order; ties keep the first.
pub(crate) fn best_candidate(
    prep: &Prepared,
    cands: &[Option<Candidate>],
    one_sided: bool,
) -> Option<(Candidate, NormalizedPair, f64)> {
    let pairs = cands.iter().flatten().map(|c| (prep.problem.pair_from_support(c.support), *c));
    let kept: Vec<(NormalizedPair, Candidate)> = if one_sided { apply_one_sided(pairs) } else { pairs.collect() };
    let mut best: Option<(Candidate, NormalizedPair, f64)> = None;
    for (pair, c) in kept {
        if let Ok(d) = prep.problem.f.eval(pair) {
            if best.map_or(true, |(_, _, bd)| d > bd) {
                best = Some((c, pair, d));
            }
        }
    }
    best
}

pub(crate) fn tighten(store: &PointStore, rect: RankRect, tau: Option<u32>) -> RankRect {
    let inside = (0..store.len())
        .filter(|&i| tau.map_or(true, |t| store.t_rank(i).is_some_and(|ti| ti >= t)))
        .map(|i| (store.x_rank(i), store.y_rank(i)));
    rect.tighten(inside)
}

pub(crate) fn bounds(store: &PointStore, r: &RankRect) -> RectBounds {
    RectBounds {
        x_lo: store.xs()[r.x_lo as usize],
        x_hi: store.xs()[r.x_hi as usize],
        y_lo: store.ys()[r.y_lo as usize],
        y_hi: store.ys()[r.y_hi as usize],
    }
}

/// Full approximate scan without p-values.
pub(crate) fn scan_prepared(
    prep: &Prepared,
    store: &PointStore,
    config: &ScanConfig,
    prospective: bool,
    parallel: bool,
) -> Result<Option<ScanResult>> {
    let layout = Layout::new(store, &prep.problem, prospective)?;
    let cands = sweep_planes(prep, store, &layout, config, parallel)?;
    let Some((best, pair, achieved)) = best_candidate(prep, &cands, config.one_sided) else {
        return Ok(None);
    };
    // The floor plane contributes 0.
    let envelope = cands.iter().flatten().map(|c| c.plane_value).fold(0.0, f64::max);
    let value_lower = envelope.min(achieved);
    let rect = tighten(store, best.rect, best.tau);
    Ok(Some(ScanResult {
        rect,
        bounds: bounds(store, &rect),
        m_frac: pair.m,
        b_frac: pair.b,
        value_lower,
        value_upper: prep.family.upper_bound(envelope),
        achieved_value: achieved,
        winning_plane: Some(PlaneRecord {
            index: best.plane,
            plane: prep.family.planes[best.plane],
            plane_value: best.plane_value,
        }),
        p_value: None,
        time_threshold: best.tau.map(|t| store.ts()[t as usize]),
        family_size: prep.family.len(),
    }))
}

/// Discrepancy achieved by a scan of `store`, or 0 when nothing is feasible.
#[cfg(test)]
pub(crate) fn achieved_only(
    prep: &Prepared,
    store: &PointStore,
    config: &ScanConfig,
    prospective: bool,
) -> Result<f64> {
    let layout = Layout::new(store, &prep.problem, prospective)?;
    let cands = sweep_planes(prep, store, &layout, config, false)?;
    Ok(best_candidate(prep, &cands, config.one_sided).map_or(0.0, |(_, _, d)| d))
}

/// Whether [`achieved_only`] would be at least `target`, stopping at the
/// first plane that gets there.
pub(crate) fn reaches(
    prep: &Prepared,
    store: &PointStore,
    config: &ScanConfig,
    prospective: bool,
    target: f64,
) -> Result<bool> {
    let layout = Layout::new(store, &prep.problem, prospective)?;
    let mut kernel = new_kernel(prep, store, &layout, config);
    let mut any = false;
    for x in prep.family.swept_planes().iter().enumerate() {
        let Some(c) = sweep_plane(prep, store, &layout, &mut kernel, x)? else { continue };
        let pair = prep.problem.pair_from_support(c.support);
        if config.one_sided && pair.m <= pair.b {
            continue;
        }
        if let Ok(d) = prep.problem.f.eval(pair) {
            if d >= target {
                return Ok(true);
            }
            any = true;
        }
    }
    Ok(!any && target <= 0.0)
}
