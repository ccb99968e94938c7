//! Weighted planar points and their rank-space view.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub t: Option<f64>,
    /// Measurement mass.
    pub m: f64,
    /// Baseline mass.
    pub b: f64,
}

impl Point {
    pub fn new(x: f64, y: f64, m: f64, b: f64) -> Self {
        Self { x, y, t: None, m, b }
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }

    /// The first problem with this point as `(column, message)`, if any.
    /// `timed` says whether the surrounding input carries timestamps.
    pub fn defect(&self, timed: bool) -> Option<(&'static str, &'static str)> {
        for (name, v) in [("x", self.x), ("y", self.y), ("m", self.m), ("b", self.b)] {
            if !v.is_finite() {
                return Some((name, "value is not finite"));
            }
        }
        if self.m < 0.0 {
            return Some(("m", "negative measurement"));
        }
        if self.b < 0.0 {
            return Some(("b", "negative baseline"));
        }
        if self.m == 0.0 && self.b == 0.0 {
            return Some(("m", "point carries neither measurement nor baseline"));
        }
        match self.t {
            Some(t) if !t.is_finite() => Some(("t", "value is not finite")),
            Some(_) if !timed => Some(("t", "timestamps must be given for all points or none")),
            None if timed => Some(("t", "timestamps must be given for all points or none")),
            _ => None,
        }
    }
}

/// An immutable point set with dense coordinate ranks and mass totals.
///
/// Equal coordinates share a rank, so duplicated x (or y, or t) values always
/// fall on the same side of every rectangle edge.
#[derive(Debug, Clone)]
pub struct PointStore {
    points: Vec<Point>,
    x_rank: Vec<u32>,
    y_rank: Vec<u32>,
    t_rank: Option<Vec<u32>>,
    xs: Vec<f64>,
    ys: Vec<f64>,
    ts: Vec<f64>,
    total_m: f64,
    total_b: f64,
}

fn distinct_sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn ranks(values: impl Iterator<Item = f64>, sorted: &[f64]) -> Vec<u32> {
    values
        .map(|v| sorted.partition_point(|&s| s < v) as u32)
        .collect()
}

impl PointStore {
    /// Validates and indexes `points`.
    ///
    /// Rejects non-finite values, negative masses, points with no mass at all,
    /// partially timestamped input and zero totals.
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Validation { row: 0, column: "".into(), msg: "no points".into() });
        }
        let timed = points[0].t.is_some();
        for (i, p) in points.iter().enumerate() {
            if let Some((column, msg)) = p.defect(timed) {
                return Err(Error::Validation { row: i, column: column.into(), msg: msg.into() });
            }
        }
        Self::index(points)
    }

    fn index(points: Vec<Point>) -> Result<Self> {
        let total_m: f64 = points.iter().map(|p| p.m).sum();
        let total_b: f64 = points.iter().map(|p| p.b).sum();
        if !(total_m > 0.0) {
            return Err(Error::Validation { row: 0, column: "m".into(), msg: "total measurement is zero".into() });
        }
        if !(total_b > 0.0) {
            return Err(Error::Validation { row: 0, column: "b".into(), msg: "total baseline is zero".into() });
        }
        let xs = distinct_sorted(points.iter().map(|p| p.x));
        let ys = distinct_sorted(points.iter().map(|p| p.y));
        let x_rank = ranks(points.iter().map(|p| p.x), &xs);
        let y_rank = ranks(points.iter().map(|p| p.y), &ys);
        let (ts, t_rank) = if points[0].t.is_some() {
            let ts = distinct_sorted(points.iter().filter_map(|p| p.t));
            let r = ranks(points.iter().filter_map(|p| p.t), &ts);
            (ts, Some(r))
        } else {
            (Vec::new(), None)
        };
        Ok(Self { points, x_rank, y_rank, t_rank, xs, ys, ts, total_m, total_b })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn total_m(&self) -> f64 {
        self.total_m
    }

    pub fn total_b(&self) -> f64 {
        self.total_b
    }

    pub fn x_rank(&self, i: usize) -> u32 {
        self.x_rank[i]
    }

    pub fn y_rank(&self, i: usize) -> u32 {
        self.y_rank[i]
    }

    pub fn t_rank(&self, i: usize) -> Option<u32> {
        self.t_rank.as_ref().map(|r| r[i])
    }

    pub fn has_time(&self) -> bool {
        self.t_rank.is_some()
    }

    /// Distinct x-coordinates in increasing order; index = rank.
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    /// Smallest strictly positive measurement and baseline masses.
    pub fn min_positive_masses(&self) -> (f64, f64) {
        let min_pos = |it: &mut dyn Iterator<Item = f64>| {
            it.filter(|v| *v > 0.0).fold(f64::INFINITY, f64::min)
        };
        (
            min_pos(&mut self.points.iter().map(|p| p.m)),
            min_pos(&mut self.points.iter().map(|p| p.b)),
        )
    }

    /// Same points and ranks with the measurements replaced, e.g. by a
    /// permutation for a randomization test.
    pub fn with_measurements(&self, m: &[f64]) -> Result<Self> {
        if m.len() != self.len() {
            return Err(Error::Config(format!("{} measurements for {} points", m.len(), self.len())));
        }
        let mut out = self.clone();
        for (p, &v) in out.points.iter_mut().zip(m) {
            p.m = v;
        }
        out.total_m = out.points.iter().map(|p| p.m).sum();
        Ok(out)
    }
}
