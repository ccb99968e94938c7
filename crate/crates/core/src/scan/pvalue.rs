use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::PointStore;
use crate::error::{Error, Result};

use super::engine::{reaches, Prepared};
use super::ScanConfig;

/// Null-model measurement vectors, drawn sequentially from one seeded stream.
///
/// Measurements are permuted across points with baselines fixed. For
/// Bernoulli data the successes are reshuffled over the individual trials
/// instead, so no point receives more successes than it has trials.
fn null_measurements(store: &PointStore, bernoulli: bool, replicas: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m: Vec<f64> = store.points().iter().map(|p| p.m).collect();
    if !bernoulli {
        return Ok((0..replicas)
            .map(|_| {
                let mut v = m.clone();
                v.shuffle(&mut rng);
                v
            })
            .collect());
    }
    let trials: Vec<usize> = store
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if p.b.fract() != 0.0 || p.m.fract() != 0.0 {
                Err(Error::Validation {
                    row: i,
                    column: "b".into(),
                    msg: "bernoulli randomization needs integer counts".into(),
                })
            } else {
                Ok(p.b as usize)
            }
        })
        .collect::<Result<_>>()?;
    let successes = store.total_m() as usize;
    let mut outcomes: Vec<bool> = (0..trials.iter().sum()).map(|k| k < successes).collect();
    Ok((0..replicas)
        .map(|_| {
            outcomes.shuffle(&mut rng);
            let mut start = 0;
            trials
                .iter()
                .map(|&t| {
                    let s = outcomes[start..start + t].iter().filter(|&&o| o).count();
                    start += t;
                    s as f64
                })
                .collect()
        })
        .collect())
}

pub(crate) fn p_value_prepared(
    prep: &Prepared,
    store: &PointStore,
    config: &ScanConfig,
    observed: f64,
    prospective: bool,
) -> Result<f64> {
    if config.replicas == 0 {
        return Err(Error::Config("p-value needs at least one replica".into()));
    }
    let draws = null_measurements(store, prep.problem.is_bernoulli(), config.replicas, config.seed)?;
    let hits: Vec<bool> = draws
        .par_iter()
        .map(|m| reaches(prep, &store.with_measurements(m)?, config, prospective, observed))
        .collect::<Result<_>>()?;
    let hits = hits.iter().filter(|&&h| h).count();
    Ok((1 + hits) as f64 / (config.replicas + 1) as f64)
}

/// Randomization p-value of `observed` under the permutation null.
///
/// Each replica reruns the approximate scan with the tangent family of the
/// observed data; a replica without a feasible rectangle scores 0.
pub fn p_value(store: &PointStore, config: &ScanConfig, observed: f64) -> Result<f64> {
    match Prepared::new(store, config)? {
        Some(prep) => p_value_prepared(&prep, store, config, observed, false),
        None => {
            if config.replicas == 0 {
                return Err(Error::Config("p-value needs at least one replica".into()));
            }
            let hits = if observed <= 0.0 { config.replicas } else { 0 };
            Ok((1 + hits) as f64 / (config.replicas + 1) as f64)
        }
    }
}
