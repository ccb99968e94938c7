//! Annulus level schedule for curvature growing like `n^d`.

use serde::{Deserialize, Serialize};

/// Increasing level parameters `n_0 < … < n_{k+1} = n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSchedule {
    pub levels: Vec<f64>,
    pub d_exponent: f64,
}

impl GridSchedule {
    /// Number of inner levels `k` (the schedule holds `k + 2` levels, or one
    /// level when `d = 0`).
    pub fn k(&self) -> usize {
        self.levels.len().saturating_sub(2)
    }

    pub fn log_levels(&self) -> Vec<f64> {
        self.levels.iter().map(|n| n.ln()).collect()
    }
}

/// Default `k` for growth exponent `d`.
pub fn default_k(d: f64, n: f64) -> usize {
    let lg = n.log2().max(1.0);
    if d == 0.0 {
        0
    } else if d == 1.0 {
        lg.ceil() as usize
    } else if d > 1.0 {
        (lg.ln() / d.ln()).ceil().max(1.0) as usize
    } else {
        (lg.ln() / (1.0 / d).ln()).ceil().max(1.0) as usize
    }
}

/// Level schedule for `n` points; `epsilon` does not affect the levels.
pub fn grid_schedule(d_exponent: f64, n: f64, _epsilon: f64) -> GridSchedule {
    grid_schedule_with_k(d_exponent, n, None)
}

/// Level schedule with an optional explicit `k`.
///
/// The log-levels `l_i = ln n_i` satisfy `l_1 = (d + 1)/d · l_0` and
/// `l_i = ((d + 1)·l_{i−1} − l_{i−2})/d`, with `n_0 = n^α` chosen so that
/// `l_{k+1} = ln n`, i.e. `1/α = 1 + Σ_{i=1}^{k+1} d^{−i}`.
pub fn grid_schedule_with_k(d_exponent: f64, n: f64, k: Option<usize>) -> GridSchedule {
    let d = d_exponent.max(0.0);
    if d == 0.0 {
        return GridSchedule { levels: vec![n], d_exponent: d };
    }
    let k = k.unwrap_or_else(|| default_k(d, n));
    let inv_alpha = 1.0 + (1..=k + 1).map(|i| d.powi(-(i as i32))).sum::<f64>();
    let l0 = n.ln() / inv_alpha;
    let mut logs = vec![l0, (d + 1.0) / d * l0];
    while logs.len() < k + 2 {
        let i = logs.len();
        logs.push(((d + 1.0) * logs[i - 1] - logs[i - 2]) / d);
    }
    let mut levels: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
    *levels.last_mut().expect("at least two levels") = n;
    GridSchedule { levels, d_exponent: d }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_recurrence(s: &GridSchedule) {
        let l = s.log_levels();
        let d = s.d_exponent;
        assert!(((l[1] - (d + 1.0) / d * l[0]) / l[1]).abs() < 1e-6);
        for i in 2..l.len() {
            let want = ((d + 1.0) * l[i - 1] - l[i - 2]) / d;
            assert!(((l[i] - want) / l[i]).abs() < 1e-6, "level {i}");
        }
        assert!(s.levels.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn constant_curvature_single_level() {
        let s = grid_schedule(0.0, 500.0, 0.1);
        assert_eq!(s.levels, vec![500.0]);
    }

    #[test]
    fn linear_with_k_two() {
        let s = grid_schedule_with_k(1.0, 256.0, Some(2));
        assert!((s.levels[0] - 4.0).abs() < 1e-9);
        assert!((s.levels[1] - 16.0).abs() < 1e-9);
        assert_eq!(s.levels.len(), 4);
        check_recurrence(&s);
    }

    #[test]
    fn quadratic_schedule() {
        let s = grid_schedule(2.0, 65536.0, 0.1);
        assert_eq!(s.k(), 4);
        check_recurrence(&s);
        assert_eq!(*s.levels.last().unwrap(), 65536.0);
    }

    #[test]
    fn default_k_cases() {
        assert_eq!(default_k(1.0, 1024.0), 10);
        assert_eq!(default_k(2.0, 65536.0), 4);
        assert_eq!(default_k(0.5, 65536.0), 4);
        assert_eq!(default_k(3.0, 4.0), 1);
        for d in [0.5, 1.0, 1.5, 3.0] {
            check_recurrence(&grid_schedule(d, 1000.0, 0.1));
        }
    }
}
