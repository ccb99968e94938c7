use std::fmt;

use crate::error::{Error, Result};
use crate::region::ConvexPolygon;

use super::{ExpFamilySpec, NormalizedPair, Sym2};

/// Evaluation requires both fractions in `[DOMAIN_GUARD, 1 − DOMAIN_GUARD]`.
pub const DOMAIN_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiscrepancyKind {
    Kulldorff,
    Gaussian,
    Bernoulli,
    Gamma,
    JensenShannon,
    /// Log-likelihood ratio of an arbitrary one-parameter exponential family,
    /// shifted so that it vanishes on `m = b`.
    Generic1Exp(ExpFamilySpec),
}

impl DiscrepancyKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Kulldorff => "kulldorff",
            Self::Gaussian => "gaussian",
            Self::Bernoulli => "bernoulli",
            Self::Gamma => "gamma",
            Self::JensenShannon => "js",
            Self::Generic1Exp(spec) => spec.name,
        }
    }

    /// Parses the command-line names `kulldorff`, `gaussian`, `bernoulli`, `gamma`, `js`.
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "kulldorff" => Self::Kulldorff,
            "gaussian" => Self::Gaussian,
            "bernoulli" => Self::Bernoulli,
            "gamma" => Self::Gamma,
            "js" | "jensen-shannon" => Self::JensenShannon,
            _ => return None,
        })
    }
}

impl fmt::Display for DiscrepancyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A convex discrepancy `d(m_R, b_R)` scaled by a positive constant.
///
/// `g` is the global mean statistic used by Bernoulli and generic families
/// (`M / B` for Bernoulli data); the other kinds ignore it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyFunction {
    pub kind: DiscrepancyKind,
    pub g: f64,
    pub scale: f64,
}

fn xlogx(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t.ln()
    }
}

impl DiscrepancyFunction {
    pub fn new(kind: DiscrepancyKind) -> Self {
        Self { kind, g: 1.0, scale: 1.0 }
    }

    pub fn kulldorff() -> Self {
        Self::new(DiscrepancyKind::Kulldorff)
    }

    pub fn gaussian() -> Self {
        Self::new(DiscrepancyKind::Gaussian)
    }

    pub fn gamma() -> Self {
        Self::new(DiscrepancyKind::Gamma)
    }

    pub fn jensen_shannon() -> Self {
        Self::new(DiscrepancyKind::JensenShannon)
    }

    /// Bernoulli scan statistic for a global success rate `g ∈ (0, 1)`.
    pub fn bernoulli(g: f64) -> Result<Self> {
        if !(g > 0.0 && g < 1.0) {
            return Err(Error::Config(format!("Bernoulli rate {g} not in (0, 1)")));
        }
        Ok(Self { kind: DiscrepancyKind::Bernoulli, g, scale: 1.0 })
    }

    pub fn generic(spec: ExpFamilySpec, g: f64) -> Result<Self> {
        if !(g.is_finite() && g != 0.0) {
            return Err(Error::Config(format!("global statistic {g} must be finite and nonzero")));
        }
        Ok(Self { kind: DiscrepancyKind::Generic1Exp(spec), g, scale: 1.0 })
    }

    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Config(format!("scale {scale} must be positive")));
        }
        self.scale = scale;
        Ok(self)
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Growth exponent `d` of `λ*(n) = O(n^d)` that drives the level schedule.
    pub fn d_exponent(&self, relative: bool) -> f64 {
        match self.kind {
            DiscrepancyKind::Gaussian if !relative => 2.0,
            _ => 1.0,
        }
    }

    /// The region of `(m_R, b_R)` reachable by support-feasible rectangles when
    /// every support measure must carry at least the fraction `c`.
    ///
    /// For Bernoulli data the support measures are successes and failures, so
    /// the square is cut down to the band where the failure fraction
    /// `(b − G·m)/(1 − G)` also lies in `[c, 1 − c]`.
    pub fn support_region(&self, c: f64) -> ConvexPolygon {
        let square = ConvexPolygon::support_square(c);
        match self.kind {
            DiscrepancyKind::Bernoulli => {
                let g = self.g;
                square
                    .clip(g, -1.0, -c * (1.0 - g))
                    .clip(-g, 1.0, (1.0 - c) * (1.0 - g))
            }
            _ => square,
        }
    }

    fn guard(&self, p: NormalizedPair) -> Result<(f64, f64)> {
        let ok = |t: f64| (DOMAIN_GUARD..=1.0 - DOMAIN_GUARD).contains(&t);
        if ok(p.m) && ok(p.b) {
            Ok((p.m, p.b))
        } else {
            Err(Error::Domain(format!("pair ({}, {}) outside the open unit square", p.m, p.b)))
        }
    }

    /// Bernoulli complements `P = 1 − G·x/y` and `Q = 1 − G·(1 − x)/(1 − y)`.
    fn bernoulli_pq(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let p = 1.0 - self.g * x / y;
        let q = 1.0 - self.g * (1.0 - x) / (1.0 - y);
        if p > 0.0 && q > 0.0 {
            Ok((p, q))
        } else {
            Err(Error::BernoulliInfeasible { g: self.g, m: x, b: y })
        }
    }

    pub fn eval(&self, pair: NormalizedPair) -> Result<f64> {
        let (x, y) = self.guard(pair)?;
        let v = match self.kind {
            DiscrepancyKind::Kulldorff => kl(x, y),
            DiscrepancyKind::Gamma => kl(y, x),
            DiscrepancyKind::Gaussian => (x - y).powi(2) / (y * (1.0 - y)),
            DiscrepancyKind::JensenShannon => {
                let s = 0.5 * (x + y);
                0.5 * (xlogx(x) + xlogx(1.0 - x) + xlogx(y) + xlogx(1.0 - y))
                    - xlogx(s)
                    - xlogx(1.0 - s)
            }
            DiscrepancyKind::Bernoulli => {
                let g = self.g;
                let (p, q) = self.bernoulli_pq(x, y)?;
                kl(x, y) + (y / g - x) * p.ln() + ((1.0 - y) / g - 1.0 + x) * q.ln()
                    - (1.0 / g - 1.0) * (-g).ln_1p()
            }
            DiscrepancyKind::Generic1Exp(spec) => {
                super::generic_discrepancy(&spec, pair, self.g)? - spec.conjugate(self.g) / self.g
            }
        };
        Ok(self.scale * v)
    }

    pub fn gradient(&self, pair: NormalizedPair) -> Result<[f64; 2]> {
        let (x, y) = self.guard(pair)?;
        let [gx, gy] = match self.kind {
            DiscrepancyKind::Kulldorff => kl_gradient(x, y),
            DiscrepancyKind::Gamma => {
                let [a, b] = kl_gradient(y, x);
                [b, a]
            }
            DiscrepancyKind::Gaussian => {
                let (u, v) = (x - y, y * (1.0 - y));
                [2.0 * u / v, -2.0 * u / v - u * u * (1.0 - 2.0 * y) / (v * v)]
            }
            DiscrepancyKind::JensenShannon => {
                let s = 0.5 * (x + y);
                let logit = |t: f64| t.ln() - (1.0 - t).ln();
                [0.5 * (logit(x) - logit(s)), 0.5 * (logit(y) - logit(s))]
            }
            DiscrepancyKind::Bernoulli => {
                let (p, q) = self.bernoulli_pq(x, y)?;
                [
                    (x / y).ln() - ((1.0 - x) / (1.0 - y)).ln() - p.ln() + q.ln(),
                    (p.ln() - q.ln()) / self.g,
                ]
            }
            DiscrepancyKind::Generic1Exp(spec) => spec.gradient(pair, self.g)?,
        };
        Ok([self.scale * gx, self.scale * gy])
    }

    pub fn hessian(&self, pair: NormalizedPair) -> Result<Sym2> {
        let (x, y) = self.guard(pair)?;
        let h = match self.kind {
            DiscrepancyKind::Kulldorff => kl_hessian(x, y),
            DiscrepancyKind::Gamma => {
                let h = kl_hessian(y, x);
                Sym2::new(h.yy, h.xy, h.xx)
            }
            DiscrepancyKind::Gaussian => {
                let (u, v, vp) = (x - y, y * (1.0 - y), 1.0 - 2.0 * y);
                Sym2::new(
                    2.0 / v,
                    -2.0 / v - 2.0 * u * vp / (v * v),
                    2.0 / v
                        + 4.0 * u * vp / (v * v)
                        + 2.0 * u * u * vp * vp / (v * v * v)
                        + 2.0 * u * u / (v * v),
                )
            }
            DiscrepancyKind::JensenShannon => {
                let s = 0.5 * (x + y);
                let mix = 1.0 / (4.0 * s * (1.0 - s));
                Sym2::new(
                    1.0 / (2.0 * x * (1.0 - x)) - mix,
                    -mix,
                    1.0 / (2.0 * y * (1.0 - y)) - mix,
                )
            }
            DiscrepancyKind::Bernoulli => {
                let g = self.g;
                let (p, q) = self.bernoulli_pq(x, y)?;
                // u = y·P/G and v = (1 − y)·Q/G are the per-side failure fractions.
                let (u, v) = (y * p / g, (1.0 - y) * q / g);
                Sym2::new(
                    1.0 / x + 1.0 / (1.0 - x) + 1.0 / u + 1.0 / v,
                    -(1.0 / u + 1.0 / v) / g,
                    (x / (y * u) + (1.0 - x) / ((1.0 - y) * v)) / g,
                )
            }
            DiscrepancyKind::Generic1Exp(spec) => spec.hessian(pair, self.g)?,
        };
        Ok(h.scaled(self.scale))
    }
}

fn kl(x: f64, y: f64) -> f64 {
    xlogx(x) - x * y.ln() + xlogx(1.0 - x) - (1.0 - x) * (1.0 - y).ln()
}

fn kl_gradient(x: f64, y: f64) -> [f64; 2] {
    [
        (x / y).ln() - ((1.0 - x) / (1.0 - y)).ln(),
        -x / y + (1.0 - x) / (1.0 - y),
    ]
}

fn kl_hessian(x: f64, y: f64) -> Sym2 {
    let (y1, y2) = (y, 1.0 - y);
    Sym2::new(
        1.0 / (x * (1.0 - x)),
        -1.0 / (y1 * y2),
        x / (y1 * y1) + (1.0 - x) / (y2 * y2),
    )
}
