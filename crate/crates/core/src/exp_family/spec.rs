use std::fmt;

use crate::error::{Error, Result};

use super::{NormalizedPair, Sym2};

/// A one-parameter exponential family `1EXP(η, φ, T, B_e, a)`.
///
/// Only plain function pointers are stored, so a spec is `Copy` and can be
/// shared freely across threads.
#[derive(Clone, Copy)]
pub struct ExpFamilySpec {
    pub name: &'static str,
    /// Cumulant `B_e(η)`.
    pub cumulant: fn(f64) -> f64,
    /// Mean map `B_e'(η)`.
    pub mean: fn(f64) -> f64,
    /// `g_e`, the inverse of the mean map.
    pub inverse_mean: fn(f64) -> f64,
    /// Derivative of `g_e`, i.e. `1 / B_e''(g_e(t))`.
    pub inverse_mean_deriv: fn(f64) -> f64,
    /// Open interval that the mean map covers.
    pub mean_range: (f64, f64),
    /// Open interval of valid natural parameters.
    pub natural_range: (f64, f64),
    /// Scale map `a(φ)`.
    pub scale_map: fn(f64) -> f64,
    /// Sufficient statistic `T(y)`.
    pub sufficient: fn(f64) -> f64,
}

impl fmt::Debug for ExpFamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExpFamilySpec").field("name", &self.name).finish()
    }
}

impl PartialEq for ExpFamilySpec {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

fn identity(t: f64) -> f64 {
    t
}

fn one(_: f64) -> f64 {
    1.0
}

fn softplus(eta: f64) -> f64 {
    if eta > 0.0 {
        eta + (-eta).exp().ln_1p()
    } else {
        eta.exp().ln_1p()
    }
}

fn logistic(eta: f64) -> f64 {
    1.0 / (1.0 + (-eta).exp())
}

impl ExpFamilySpec {
    /// Poisson counts: `B_e = exp`, `g_e = ln`.
    pub fn poisson() -> Self {
        Self {
            name: "poisson",
            cumulant: f64::exp,
            mean: f64::exp,
            inverse_mean: f64::ln,
            inverse_mean_deriv: |t| 1.0 / t,
            mean_range: (0.0, f64::INFINITY),
            natural_range: (f64::NEG_INFINITY, f64::INFINITY),
            scale_map: identity,
            sufficient: identity,
        }
    }

    /// Gaussian with known variance: `B_e(η) = η²/2`, `g_e` the identity.
    pub fn gaussian() -> Self {
        Self {
            name: "gaussian",
            cumulant: |eta| 0.5 * eta * eta,
            mean: identity,
            inverse_mean: identity,
            inverse_mean_deriv: one,
            mean_range: (f64::NEG_INFINITY, f64::INFINITY),
            natural_range: (f64::NEG_INFINITY, f64::INFINITY),
            scale_map: identity,
            sufficient: identity,
        }
    }

    /// Bernoulli trials: `B_e(η) = ln(1 + e^η)`, `g_e(x) = ln x − ln(1 − x)`.
    pub fn bernoulli() -> Self {
        Self {
            name: "bernoulli",
            cumulant: softplus,
            mean: logistic,
            inverse_mean: |t| t.ln() - (-t).ln_1p(),
            inverse_mean_deriv: |t| 1.0 / (t * (1.0 - t)),
            mean_range: (0.0, 1.0),
            natural_range: (f64::NEG_INFINITY, f64::INFINITY),
            scale_map: one,
            sufficient: identity,
        }
    }

    /// Gamma with known shape: `B_e(η) = −ln(−η)` on `η < 0`.
    pub fn gamma() -> Self {
        Self {
            name: "gamma",
            cumulant: |eta| -(-eta).ln(),
            mean: |eta| -1.0 / eta,
            inverse_mean: |t| -1.0 / t,
            inverse_mean_deriv: |t| 1.0 / (t * t),
            mean_range: (0.0, f64::INFINITY),
            natural_range: (f64::NEG_INFINITY, 0.0),
            scale_map: identity,
            sufficient: identity,
        }
    }

    fn in_mean_range(&self, t: f64) -> bool {
        t > self.mean_range.0 && t < self.mean_range.1
    }

    /// Legendre conjugate `ψ(t) = t·g_e(t) − B_e(g_e(t))`.
    pub fn conjugate(&self, t: f64) -> f64 {
        let eta = (self.inverse_mean)(t);
        t * eta - (self.cumulant)(eta)
    }

    fn mean_arg(&self, t: f64) -> Result<f64> {
        if self.in_mean_range(t) && t.is_finite() {
            Ok(t)
        } else {
            Err(Error::Domain(format!(
                "{} mean map cannot reach {t} (range {:?})",
                self.name, self.mean_range
            )))
        }
    }

    fn arguments(&self, pair: NormalizedPair, g: f64) -> Result<(f64, f64)> {
        let NormalizedPair { m, b } = pair;
        if !(b > 0.0 && b < 1.0) || !(0.0..=1.0).contains(&m) {
            return Err(Error::Domain(format!("pair ({m}, {b}) not inside the unit square")));
        }
        Ok((self.mean_arg(g * m / b)?, self.mean_arg(g * (1.0 - m) / (1.0 - b))?))
    }

    pub(crate) fn gradient(&self, pair: NormalizedPair, g: f64) -> Result<[f64; 2]> {
        let (t1, t2) = self.arguments(pair, g)?;
        let (e1, e2) = ((self.inverse_mean)(t1), (self.inverse_mean)(t2));
        Ok([e1 - e2, -((self.cumulant)(e1) - (self.cumulant)(e2)) / g])
    }

    pub(crate) fn hessian(&self, pair: NormalizedPair, g: f64) -> Result<Sym2> {
        let (t1, t2) = self.arguments(pair, g)?;
        let (b1, b2) = (pair.b, 1.0 - pair.b);
        let (p1, p2) = ((self.inverse_mean_deriv)(t1), (self.inverse_mean_deriv)(t2));
        Ok(Sym2::new(
            g * p1 / b1 + g * p2 / b2,
            -p1 * t1 / b1 - p2 * t2 / b2,
            t1 * t1 * p1 / (g * b1) + t2 * t2 * p2 / (g * b2),
        ))
    }
}

/// Aggregate `(T*, 1/φ*)` of the observations inside one region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficientSummary {
    pub t_star: f64,
    pub phi_star_inv: f64,
}

impl SufficientSummary {
    /// Aggregates raw `(y_i, φ_i)` observations with precision weights
    /// `v_i = φ* / a(φ_i)`.
    pub fn from_observations(spec: &ExpFamilySpec, obs: &[(f64, f64)]) -> Result<Self> {
        let phi_star_inv: f64 = obs.iter().map(|&(_, phi)| 1.0 / (spec.scale_map)(phi)).sum();
        if !(phi_star_inv > 0.0) {
            return Err(Error::Degenerate("region carries no precision".into()));
        }
        let t_star = obs
            .iter()
            .map(|&(y, phi)| (spec.sufficient)(y) / (spec.scale_map)(phi))
            .sum::<f64>()
            / phi_star_inv;
        Ok(Self { t_star, phi_star_inv })
    }
}

/// Maximum-likelihood natural parameter `η̂ = g_e(T*)`.
pub fn mle_estimate(spec: &ExpFamilySpec, summary: &SufficientSummary) -> Result<f64> {
    spec.mean_arg(summary.t_star).map(spec.inverse_mean)
}

/// The scaled log-likelihood ratio `d·Φ/G` of a region against its complement,
/// with `G` the global mean statistic.
pub fn generic_discrepancy(spec: &ExpFamilySpec, pair: NormalizedPair, g: f64) -> Result<f64> {
    let (t1, t2) = spec.arguments(pair, g)?;
    let NormalizedPair { m, b } = pair;
    let e1 = (spec.inverse_mean)(t1);
    let e2 = (spec.inverse_mean)(t2);
    Ok(m * e1 - b / g * (spec.cumulant)(e1) + (1.0 - m) * e2 - (1.0 - b) / g * (spec.cumulant)(e2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all() -> [ExpFamilySpec; 4] {
        [
            ExpFamilySpec::poisson(),
            ExpFamilySpec::gaussian(),
            ExpFamilySpec::bernoulli(),
            ExpFamilySpec::gamma(),
        ]
    }

    fn sample_eta(spec: &ExpFamilySpec) -> Vec<f64> {
        let (lo, hi) = spec.natural_range;
        (0..40)
            .map(|i| {
                let s = -3.0 + 6.0 * i as f64 / 39.0;
                if hi <= 0.0 {
                    -(s.exp())
                } else if lo.is_finite() {
                    lo + s.exp()
                } else {
                    s
                }
            })
            .filter(|e| *e > lo && *e < hi)
            .collect()
    }

    #[test]
    fn cumulants_strictly_convex() {
        for spec in all() {
            for eta in sample_eta(&spec) {
                let h = 1e-3 * eta.abs().max(1e-2);
                let b = spec.cumulant;
                let second = b(eta + h) - 2.0 * b(eta) + b(eta - h);
                assert!(second > 0.0, "{} at {eta}", spec.name);
            }
        }
    }

    #[test]
    fn inverse_mean_inverts() {
        for spec in all() {
            for eta in sample_eta(&spec) {
                let back = (spec.inverse_mean)((spec.mean)(eta));
                assert!((back - eta).abs() <= 1e-9 * eta.abs().max(1.0), "{} {eta} {back}", spec.name);
            }
        }
    }

    #[test]
    fn mle_examples() {
        let s = |t| SufficientSummary { t_star: t, phi_star_inv: 1.0 };
        assert_eq!(mle_estimate(&ExpFamilySpec::poisson(), &s(1.0)).unwrap(), 0.0);
        assert_eq!(mle_estimate(&ExpFamilySpec::gaussian(), &s(0.7)).unwrap(), 0.7);
        let b = mle_estimate(&ExpFamilySpec::bernoulli(), &s(0.75)).unwrap();
        assert!((b - 3f64.ln()).abs() < 1e-14);
        assert!(mle_estimate(&ExpFamilySpec::poisson(), &s(0.0)).is_err());
        assert!(mle_estimate(&ExpFamilySpec::bernoulli(), &s(1.0)).is_err());
    }

    #[test]
    fn summary_weights() {
        let spec = ExpFamilySpec::gaussian();
        let s = SufficientSummary::from_observations(&spec, &[(1.0, 1.0), (4.0, 2.0)]).unwrap();
        assert!((s.phi_star_inv - 1.5).abs() < 1e-15);
        assert!((s.t_star - 2.0).abs() < 1e-15);
        assert!(SufficientSummary::from_observations(&spec, &[]).is_err());
    }

    fn kulldorff(m: f64, b: f64) -> f64 {
        m * (m / b).ln() + (1.0 - m) * ((1.0 - m) / (1.0 - b)).ln()
    }

    #[test]
    fn poisson_matches_kulldorff_up_to_constant() {
        let spec = ExpFamilySpec::poisson();
        for g in [0.3, 1.0, 2.5] {
            let c0 = generic_discrepancy(&spec, NormalizedPair::new(0.4, 0.4), g).unwrap();
            assert!((c0 - (g.ln() - 1.0)).abs() < 1e-12);
            for i in 1..10 {
                for j in 1..10 {
                    let (m, b) = (i as f64 / 10.0, j as f64 / 10.0);
                    let d = generic_discrepancy(&spec, NormalizedPair::new(m, b), g).unwrap();
                    assert!((d - kulldorff(m, b) - c0).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn gaussian_is_affine_in_chi_square() {
        let spec = ExpFamilySpec::gaussian();
        for g in [0.5, 2.0] {
            let d = generic_discrepancy(&spec, NormalizedPair::new(0.75, 0.25), g).unwrap();
            assert!((d - g * 7.0 / 6.0).abs() < 1e-12);
            for i in 1..10 {
                for j in 1..10 {
                    let (m, b) = (i as f64 / 10.0, j as f64 / 10.0);
                    let d = generic_discrepancy(&spec, NormalizedPair::new(m, b), g).unwrap();
                    let chi = (m - b).powi(2) / (b * (1.0 - b));
                    assert!((d - 0.5 * g * chi - 0.5 * g).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn domain_errors() {
        let p = ExpFamilySpec::poisson();
        assert!(generic_discrepancy(&p, NormalizedPair::new(0.5, 0.0), 1.0).is_err());
        assert!(generic_discrepancy(&p, NormalizedPair::new(0.5, 1.0), 1.0).is_err());
        let b = ExpFamilySpec::bernoulli();
        // G·m/b = 0.5·0.8/0.4 = 1 is outside (0, 1).
        assert!(generic_discrepancy(&b, NormalizedPair::new(0.8, 0.4), 0.5).is_err());
        assert!(generic_discrepancy(&b, NormalizedPair::new(0.3, 0.4), 0.5).is_ok());
    }
}
