use crate::region::ConvexPolygon;

use super::{max_eigenvalue, DiscrepancyFunction};

/// Samples per boundary edge when bounding curvature or value.
pub const BOUNDARY_SAMPLES: usize = 1024;
/// Side of the interior sample grid.
pub const INTERIOR_GRID: usize = 64;
/// Inflation applied to the sampled curvature maximum.
pub const SAFETY_FACTOR: f64 = 1.25;

/// Upper bound on the largest Hessian eigenvalue of `f` over `region`.
///
/// The maximum is taken over a dense boundary sample and an interior grid,
/// then inflated by [`SAFETY_FACTOR`]. Points where `f` is undefined are
/// skipped. Returns 0 for an empty region.
pub fn lambda_star(f: &DiscrepancyFunction, region: &ConvexPolygon) -> f64 {
    let lam = |p: [f64; 2]| {
        f.hessian(p.into())
            .map(|h| max_eigenvalue(&h))
            .unwrap_or(0.0)
    };
    let boundary = region.boundary_samples(BOUNDARY_SAMPLES).map(lam);
    let inner = region.interior_samples(INTERIOR_GRID).into_iter().map(lam);
    let sampled = boundary.chain(inner).fold(0.0_f64, f64::max);
    SAFETY_FACTOR * sampled
}

/// Largest value of `f` over the boundary of `region`, where every convex
/// function attains its maximum on a polygon.
pub fn f_max(f: &DiscrepancyFunction, region: &ConvexPolygon) -> f64 {
    region
        .vertices()
        .iter()
        .copied()
        .chain(region.boundary_samples(BOUNDARY_SAMPLES))
        .filter_map(|p| f.eval(p.into()).ok())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exp_family::NormalizedPair;

    fn square(n: f64) -> ConvexPolygon {
        ConvexPolygon::support_square(1.0 / n)
    }

    #[test]
    fn monotone_in_n() {
        for f in [
            DiscrepancyFunction::kulldorff(),
            DiscrepancyFunction::gaussian(),
            DiscrepancyFunction::jensen_shannon(),
            DiscrepancyFunction::bernoulli(0.5).unwrap(),
        ] {
            let mut prev = 0.0;
            for n in [8.0, 16.0, 32.0, 64.0, 128.0] {
                let l = lambda_star(&f, &f.support_region(1.0 / n));
                assert!(l >= prev, "{} n={n}", f.name());
                prev = l;
            }
        }
    }

    #[test]
    fn bound_dominates_dense_probe() {
        let f = DiscrepancyFunction::kulldorff();
        let region = square(32.0);
        let bound = lambda_star(&f, &region);
        let mut worst: f64 = 0.0;
        for i in 0..=300 {
            for j in 0..=300 {
                let p = NormalizedPair::new(1.0 / 32.0 + i as f64 / 300.0 * (1.0 - 2.0 / 32.0),
                                            1.0 / 32.0 + j as f64 / 300.0 * (1.0 - 2.0 / 32.0));
                worst = worst.max(f.hessian(p).unwrap().max_eigenvalue());
            }
        }
        assert!(bound >= worst);
    }

    #[test]
    fn f_max_tiny_square_is_corner_max() {
        for f in [DiscrepancyFunction::kulldorff(), DiscrepancyFunction::gaussian()] {
            let region = ConvexPolygon::support_square(0.25);
            let corners = [[0.25, 0.25], [0.25, 0.75], [0.75, 0.25], [0.75, 0.75]]
                .iter()
                .map(|&p| f.eval(p.into()).unwrap())
                .fold(0.0, f64::max);
            assert!((f_max(&f, &region) - corners).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_f_max_grows_linearly() {
        let f = DiscrepancyFunction::gaussian();
        let a = f_max(&f, &square(128.0));
        let b = f_max(&f, &square(256.0));
        assert!((b / a - 2.0).abs() < 0.1);
    }

    #[test]
    fn kulldorff_f_max_grows_logarithmically() {
        let f = DiscrepancyFunction::kulldorff();
        let v: Vec<f64> = [64.0, 128.0, 256.0, 512.0].iter().map(|&n| f_max(&f, &square(n))).collect();
        let d1 = v[1] - v[0];
        let d2 = v[3] - v[2];
        assert!((d2 / d1 - 1.0).abs() < 0.1, "{v:?}");
    }
}
