//! Convex polygons in the `(m_R, b_R)` unit square.
//!
//! Support regions, Bernoulli feasibility bands and the mass-ratio wedge
//! implied by a data set are all intersections of half-planes, so one small
//! polygon type covers every region the tangent family is built over.

use serde::{Deserialize, Serialize};

pub type Vec2 = [f64; 2];

/// A convex polygon with counter-clockwise vertices. May be empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    /// The square `[lo, hi]²`; empty when `lo > hi`.
    pub fn square(lo: f64, hi: f64) -> Self {
        if !(lo <= hi) {
            return Self { vertices: Vec::new() };
        }
        Self {
            vertices: vec![[lo, lo], [hi, lo], [hi, hi], [lo, hi]],
        }
    }

    /// The support square `S = [c, 1 - c]²` for a fractional support level `c`.
    pub fn support_square(c: f64) -> Self {
        Self::square(c, 1.0 - c)
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Keeps the part satisfying `a·x + b·y ≤ c`.
    pub fn clip(&self, a: f64, b: f64, c: f64) -> Self {
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n + 1);
        let side = |p: &Vec2| a * p[0] + b * p[1] - c;
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let (sp, sq) = (side(&p), side(&q));
            if sp <= 0.0 {
                out.push(p);
            }
            if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
                let t = sp / (sp - sq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
        out.dedup_by(|x, y| (x[0] - y[0]).abs() < 1e-15 && (x[1] - y[1]).abs() < 1e-15);
        if out.len() > 1 {
            let (first, last) = (out[0], out[out.len() - 1]);
            if (first[0] - last[0]).abs() < 1e-15 && (first[1] - last[1]).abs() < 1e-15 {
                out.pop();
            }
        }
        // Degenerate slivers carry no area; callers treat them as empty.
        if out.len() < 3 {
            out.clear();
        }
        Self { vertices: out }
    }

    pub fn intersect(&self, other: &ConvexPolygon) -> Self {
        let mut out = self.clone();
        let n = other.vertices.len();
        for i in 0..n {
            let p = other.vertices[i];
            let q = other.vertices[(i + 1) % n];
            // Left of a CCW edge is inside: cross(q - p, x - p) >= 0.
            let a = q[1] - p[1];
            let b = -(q[0] - p[0]);
            let c = a * p[0] + b * p[1];
            out = out.clip(a, b, c);
            if out.is_empty() {
                break;
            }
        }
        out
    }

    /// Point membership with an absolute slack `tol`.
    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return false;
        }
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
            cross >= -tol * len
        })
    }

    /// Euclidean projection onto the polygon.
    pub fn project(&self, p: Vec2) -> Vec2 {
        if self.contains(p, 0.0) {
            return p;
        }
        let n = self.vertices.len();
        let mut best = self.vertices[0];
        let mut best_d = f64::INFINITY;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let ab = [b[0] - a[0], b[1] - a[1]];
            let len2 = ab[0] * ab[0] + ab[1] * ab[1];
            let t = if len2 > 0.0 {
                (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
            let d = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2);
            if d < best_d {
                best_d = d;
                best = q;
            }
        }
        best
    }

    /// Axis-aligned bounding box as `(min, max)`.
    pub fn bbox(&self) -> (Vec2, Vec2) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Separating-axis test against the closed box `[lo, hi]`.
    pub fn intersects_box(&self, lo: Vec2, hi: Vec2) -> bool {
        if self.is_empty() {
            return false;
        }
        let (plo, phi) = self.bbox();
        if phi[0] < lo[0] || plo[0] > hi[0] || phi[1] < lo[1] || plo[1] > hi[1] {
            return false;
        }
        let corners = [[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]];
        let n = self.vertices.len();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            // Box entirely on the outer side of this edge?
            let outside = corners.iter().all(|c| {
                (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) < 0.0
            });
            if outside {
                return false;
            }
        }
        true
    }

    /// x-extent of the part of the polygon with `y0 ≤ y ≤ y1`.
    pub fn x_range_in_band(&self, y0: f64, y1: f64) -> Option<(f64, f64)> {
        let n = self.vertices.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut take = |x: f64| {
            lo = lo.min(x);
            hi = hi.max(x);
        };
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            if a[1] >= y0 && a[1] <= y1 {
                take(a[0]);
            }
            for y in [y0, y1] {
                if (a[1] - y) * (b[1] - y) < 0.0 {
                    let t = (y - a[1]) / (b[1] - a[1]);
                    take(a[0] + t * (b[0] - a[0]));
                }
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let mut s = 0.0;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            s += a[0] * b[1] - b[0] * a[1];
        }
        0.5 * s
    }

    /// `per_edge` evenly spaced samples along each edge, endpoints included.
    pub fn boundary_samples(&self, per_edge: usize) -> impl Iterator<Item = Vec2> + '_ {
        let n = self.vertices.len();
        let steps = per_edge.max(2);
        (0..n).flat_map(move |i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            (0..steps).map(move |k| {
                let t = k as f64 / (steps - 1) as f64;
                [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
            })
        })
    }

    /// Cell centres of a `side × side` grid over the bounding box that fall inside.
    pub fn interior_samples(&self, side: usize) -> Vec<Vec2> {
        if self.is_empty() {
            return Vec::new();
        }
        let (lo, hi) = self.bbox();
        let mut out = Vec::with_capacity(side * side);
        for i in 0..side {
            for j in 0..side {
                let p = [
                    lo[0] + (i as f64 + 0.5) / side as f64 * (hi[0] - lo[0]),
                    lo[1] + (j as f64 + 0.5) / side as f64 * (hi[1] - lo[1]),
                ];
                if self.contains(p, 0.0) {
                    out.push(p);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_basics() {
        let s = ConvexPolygon::support_square(0.25);
        assert!((s.area() - 0.25).abs() < 1e-15);
        assert!(s.contains([0.5, 0.5], 0.0));
        assert!(!s.contains([0.1, 0.5], 0.0));
        assert_eq!(s.project([0.0, 0.5]), [0.25, 0.5]);
        assert_eq!(s.project([0.9, 0.9]), [0.75, 0.75]);
        assert!(ConvexPolygon::support_square(0.6).is_empty());
    }

    #[test]
    fn clip_to_triangle() {
        let s = ConvexPolygon::square(0.0, 1.0);
        let t = s.clip(1.0, 1.0, 1.0);
        assert!((t.area() - 0.5).abs() < 1e-12);
        assert!(t.contains([0.2, 0.2], 0.0));
        assert!(!t.contains([0.8, 0.8], 0.0));
        let p = t.project([1.0, 1.0]);
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn box_intersection() {
        let t = ConvexPolygon::square(0.0, 1.0).clip(1.0, 1.0, 1.0);
        assert!(t.intersects_box([0.4, 0.4], [0.6, 0.6]));
        assert!(!t.intersects_box([0.6, 0.6], [0.9, 0.9]));
        assert!(!t.intersects_box([1.1, 0.0], [1.2, 0.1]));
    }

    #[test]
    fn band_extent() {
        let t = ConvexPolygon::square(0.0, 1.0).clip(1.0, 1.0, 1.0);
        let (lo, hi) = t.x_range_in_band(0.25, 0.5).unwrap();
        assert!((lo - 0.0).abs() < 1e-12 && (hi - 0.75).abs() < 1e-12);
        let (lo, hi) = t.x_range_in_band(0.5, 0.5).unwrap();
        assert!(lo.abs() < 1e-12 && (hi - 0.5).abs() < 1e-12);
        assert!(t.x_range_in_band(1.5, 2.0).is_none());
    }

    #[test]
    fn intersect_squares() {
        let a = ConvexPolygon::square(0.0, 0.6);
        let b = ConvexPolygon::square(0.4, 1.0);
        let c = a.intersect(&b);
        assert!((c.area() - 0.04).abs() < 1e-12);
    }
}
