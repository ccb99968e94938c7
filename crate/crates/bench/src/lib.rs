//! Random instances shared by the benchmarks.

use bumpscan::{Point, PointStore, WeightedPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` points with distinct ranks in a random permutation and masses drawn
/// from `{0.5, 1, 2, 3}`.
pub fn weighted_points(n: usize, seed: u64) -> Vec<WeightedPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ys: Vec<u32> = (0..n as u32).collect();
    for i in (1..n).rev() {
        ys.swap(i, rng.gen_range(0..=i));
    }
    let masses = [0.5, 1.0, 2.0, 3.0];
    (0..n)
        .map(|i| WeightedPoint::new(i as u32, ys[i], masses[rng.gen_range(0..4)], masses[rng.gen_range(0..4)]))
        .collect()
}

/// `n` uniform points in the unit square with a mild hot spot.
pub fn point_store(n: usize, seed: u64) -> PointStore {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..n)
        .map(|_| {
            let (x, y): (f64, f64) = (rng.gen(), rng.gen());
            let hot = x < 0.3 && y < 0.3;
            Point::new(x, y, rng.gen_range(0.5..2.0) * if hot { 2.0 } else { 1.0 }, rng.gen_range(0.5..2.0))
        })
        .collect();
    PointStore::new(pts).expect("generated points are valid")
}
