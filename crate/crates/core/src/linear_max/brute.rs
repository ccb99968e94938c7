//! Exhaustive rank-rectangle enumeration with 2-D prefix sums.

use super::RankRect;

/// Inclusive 2-D prefix sums of `C` channels over an `nx × ny` rank grid.
#[derive(Debug, Clone)]
pub struct RankGrid<const C: usize> {
    nx: usize,
    ny: usize,
    pre: Vec<[f64; C]>,
}

impl<const C: usize> RankGrid<C> {
    pub fn new(nx: usize, ny: usize, cells: impl IntoIterator<Item = (u32, u32, [f64; C])>) -> Self {
        let w = nx + 1;
        let mut pre = vec![[0.0; C]; w * (ny + 1)];
        for (x, y, v) in cells {
            let c = &mut pre[(y as usize + 1) * w + x as usize + 1];
            for k in 0..C {
                c[k] += v[k];
            }
        }
        for y in 1..=ny {
            for x in 1..=nx {
                for k in 0..C {
                    pre[y * w + x][k] += pre[(y - 1) * w + x][k] + pre[y * w + x - 1][k]
                        - pre[(y - 1) * w + x - 1][k];
                }
            }
        }
        Self { nx, ny, pre }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn sum(&self, r: &RankRect) -> [f64; C] {
        let w = self.nx + 1;
        let (x0, x1) = (r.x_lo as usize, r.x_hi as usize + 1);
        let (y0, y1) = (r.y_lo as usize, r.y_hi as usize + 1);
        let mut out = [0.0; C];
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.pre[y1 * w + x1][k] - self.pre[y0 * w + x1][k] - self.pre[y1 * w + x0][k]
                + self.pre[y0 * w + x0][k];
        }
        out
    }

    /// Visits every rectangle in lexicographic `(y_lo, y_hi, x_lo, x_hi)` order.
    pub fn for_each_rect(&self, mut f: impl FnMut(RankRect)) {
        for y_lo in 0..self.ny as u32 {
            for y_hi in y_lo..self.ny as u32 {
                for x_lo in 0..self.nx as u32 {
                    for x_hi in x_lo..self.nx as u32 {
                        f(RankRect { x_lo, x_hi, y_lo, y_hi });
                    }
                }
            }
        }
    }
}
