use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Axis-aligned box `[lo, hi]` in `R^n`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Window {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Window {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidWindow(format!(
                "corner dimensions {} and {} must match and be nonzero",
                lo.len(),
                hi.len()
            )));
        }
        for (axis, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite() && l < h) {
                return Err(Error::InvalidWindow(format!(
                    "axis {axis}: need finite lo < hi, got [{l}, {h}]"
                )));
            }
        }
        Ok(Window { lo, hi })
    }

    /// The square (or cube) `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Window::new(alloc::vec![lo; dim], alloc::vec![hi; dim])
    }

    /// A 2D window `[x0, x1] x [y0, y1]`.
    pub fn rect(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        Window::new(alloc::vec![x0, y0], alloc::vec![x1, y1])
    }

    /// Smallest window containing every point.
    pub fn bounding(points: &[Vec<f64>]) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::InvalidWindow("no points to bound".into()))?;
        let mut lo = first.clone();
        let mut hi = first.clone();
        for p in points {
            if p.len() != lo.len() {
                return Err(Error::DimensionMismatch {
                    expected: lo.len(),
                    got: p.len(),
                });
            }
            for (i, &v) in p.iter().enumerate() {
                lo[i] = lo[i].min(v);
                hi[i] = hi[i].max(v);
            }
        }
        Window::new(lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| 0.5 * (l + h))
            .collect()
    }

    pub fn diagonal(&self) -> f64 {
        libm::sqrt((0..self.dim()).map(|a| { let e = self.extent(a); e * e }).sum())
    }

    /// The window scaled by `factor` about its center.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let c = self.center();
        let lo = (0..self.dim())
            .map(|a| c[a] - 0.5 * factor * self.extent(a))
            .collect();
        let hi = (0..self.dim())
            .map(|a| c[a] + 0.5 * factor * self.extent(a))
            .collect();
        Window::new(lo, hi)
    }

    /// The window grown by `margin` on every side.
    pub fn inflated(&self, margin: f64) -> Result<Self> {
        Window::new(
            self.lo.iter().map(|v| v - margin).collect(),
            self.hi.iter().map(|v| v + margin).collect(),
        )
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (l, h))| *l <= *v && *v <= *h)
    }

    /// Distance from an interior point to the nearest face of the box.
    pub fn distance_to_boundary(&self, p: &[f64]) -> f64 {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(v, (l, h))| (v - l).min(h - v))
            .fold(f64::INFINITY, f64::min)
    }

    /// Evenly spaced lattice coordinate `k` of `resolution` along `axis`;
    /// the last index lands exactly on `hi`.
    pub fn lattice(&self, axis: usize, k: usize, resolution: usize) -> f64 {
        let last = resolution - 1;
        if k == last {
            self.hi[axis]
        } else {
            self.lo[axis] + self.extent(axis) * k as f64 / last as f64
        }
    }

    /// Every lattice point of a `resolution^dim` grid, axis 0 varying fastest.
    pub fn lattice_points(&self, resolution: usize) -> Vec<Vec<f64>> {
        let dim = self.dim();
        let total = (0..dim).fold(1usize, |acc, _| acc.saturating_mul(resolution));
        let mut out = Vec::with_capacity(total);
        let mut idx = alloc::vec![0usize; dim];
        for _ in 0..total {
            out.push(
                (0..dim)
                    .map(|a| self.lattice(a, idx[a], resolution))
                    .collect(),
            );
            for a in 0..dim {
                idx[a] += 1;
                if idx[a] < resolution {
                    break;
                }
                idx[a] = 0;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_boxes() {
        assert!(Window::rect(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(Window::new(alloc::vec![0.0], alloc::vec![1.0, 2.0]).is_err());
        assert!(Window::new(alloc::vec![], alloc::vec![]).is_err());
        assert!(Window::rect(0.0, f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn scaling_and_distances() {
        let w = Window::rect(-1.0, 1.0, 0.0, 4.0).unwrap();
        let s = w.scaled(2.0).unwrap();
        assert_eq!(s.lo(), &[-2.0, -2.0]);
        assert_eq!(s.hi(), &[2.0, 6.0]);
        assert_eq!(w.distance_to_boundary(&[0.0, 1.0]), 1.0);
        assert_eq!(w.distance_to_boundary(&[1.0, 2.0]), 0.0);
        assert_eq!(w.lattice(1, 2, 3), 4.0);
        assert_eq!(w.lattice(0, 1, 3), 0.0);
    }
}
