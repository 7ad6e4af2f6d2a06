use alloc::vec::Vec;

use crate::nn::Window;
use crate::{Error, Result};

/// Samples of a function on the corner lattice of a 2D window. Node `(i, j)`
/// sits at `(lattice(0, i), lattice(1, j))` and is stored at `i + nx * j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    window: Window,
    nx: usize,
    ny: usize,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn from_values(window: Window, resolution: (usize, usize), values: Vec<f64>) -> Result<Self> {
        let (nx, ny) = resolution;
        if window.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: window.dim(),
            });
        }
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidArgument(alloc::format!(
                "resolution must be at least 2 per axis, got ({nx}, {ny})"
            )));
        }
        if values.len() != nx * ny {
            return Err(Error::DimensionMismatch {
                expected: nx * ny,
                got: values.len(),
            });
        }
        let field = ScalarField {
            window,
            nx,
            ny,
            values,
        };
        if let Some(k) = field.values.iter().position(|v| !v.is_finite()) {
            let (i, j) = (k % nx, k / nx);
            return Err(Error::NonFiniteSample {
                point: field.point(i, j).to_vec(),
                value: field.values[k],
            });
        }
        Ok(field)
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i + self.nx * j]
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.window.lattice(0, i, self.nx)
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.window.lattice(1, j, self.ny)
    }

    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        [self.x(i), self.y(j)]
    }

    /// Lattice spacing along each axis.
    pub fn cell_size(&self) -> (f64, f64) {
        (
            self.window.extent(0) / (self.nx - 1) as f64,
            self.window.extent(1) / (self.ny - 1) as f64,
        )
    }

    pub fn cell_diagonal(&self) -> f64 {
        let (hx, hy) = self.cell_size();
        libm::hypot(hx, hy)
    }

    /// 1.5 cell diagonals.
    pub fn default_boundary_tol(&self) -> f64 {
        1.5 * self.cell_diagonal()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn range(&self) -> f64 {
        self.max() - self.min()
    }

    /// Nearest-rank percentile `p` in `[0, 100]` of the sampled values.
    pub fn percentile(&self, p: f64) -> f64 {
        let mut sorted = self.values.clone();
        sorted.sort_by(f64::total_cmp);
        let rank = libm::round(p.clamp(0.0, 100.0) / 100.0 * (sorted.len() - 1) as f64) as usize;
        sorted[rank]
    }

    /// Values at discrete critical nodes: interior nodes whose 8-neighbour
    /// ring is entirely above or below them (extrema), or changes sign
    /// relative to them four or more times (saddles). Contours at levels near
    /// these values can change topology between grid and continuum.
    pub fn critical_values(&self) -> Vec<f64> {
        const RING: [(isize, isize); 8] = [
            (1, 0),
            (1, 1),
            (0, 1),
            (-1, 1),
            (-1, 0),
            (-1, -1),
            (0, -1),
            (1, -1),
        ];
        let mut out = Vec::new();
        for j in 1..self.ny - 1 {
            for i in 1..self.nx - 1 {
                let c = self.value(i, j);
                let signs: Vec<bool> = RING
                    .iter()
                    .map(|&(di, dj)| {
                        self.value((i as isize + di) as usize, (j as isize + dj) as usize) > c
                    })
                    .collect();
                let changes = (0..8).filter(|&k| signs[k] != signs[(k + 1) % 8]).count();
                if changes == 0 || changes >= 4 {
                    out.push(c);
                }
            }
        }
        out
    }
}

/// Samples `f` on the `(nx, ny)` corner lattice of a 2D window.
pub fn sample_grid(
    mut f: impl FnMut(&[f64]) -> f64,
    window: &Window,
    resolution: (usize, usize),
) -> Result<ScalarField> {
    let (nx, ny) = resolution;
    if window.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: window.dim(),
        });
    }
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidArgument(alloc::format!(
            "resolution must be at least 2 per axis, got ({nx}, {ny})"
        )));
    }
    let mut values = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = window.lattice(1, j, ny);
        for i in 0..nx {
            let p = [window.lattice(0, i, nx), y];
            let v = f(&p);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample {
                    point: p.to_vec(),
                    value: v,
                });
            }
            values.push(v);
        }
    }
    ScalarField::from_values(window.clone(), resolution, values)
}

/// Samples on a 3D corner lattice, node `(i, j, k)` stored at
/// `i + nx * (j + ny * k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField3 {
    window: Window,
    res: [usize; 3],
    values: Vec<f64>,
}

impl ScalarField3 {
    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn resolution(&self) -> [usize; 3] {
        self.res
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[i + self.res[0] * (j + self.res[1] * k)]
    }
}

pub fn sample_grid_3d(
    mut f: impl FnMut(&[f64]) -> f64,
    window: &Window,
    res: [usize; 3],
) -> Result<ScalarField3> {
    if window.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: window.dim(),
        });
    }
    if res.iter().any(|&r| r < 2) {
        return Err(Error::InvalidArgument(alloc::format!(
            "resolution must be at least 2 per axis, got {res:?}"
        )));
    }
    let mut values = Vec::with_capacity(res[0] * res[1] * res[2]);
    for k in 0..res[2] {
        for j in 0..res[1] {
            for i in 0..res[0] {
                let p = [
                    window.lattice(0, i, res[0]),
                    window.lattice(1, j, res[1]),
                    window.lattice(2, k, res[2]),
                ];
                let v = f(&p);
                if !v.is_finite() {
                    return Err(Error::NonFiniteSample {
                        point: p.to_vec(),
                        value: v,
                    });
                }
                values.push(v);
            }
        }
    }
    Ok(ScalarField3 {
        window: window.clone(),
        res,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_examples() {
        let w = Window::cube(2, 0.0, 1.0).unwrap();
        let c = sample_grid(|_| 3.0, &w, (4, 5)).unwrap();
        assert!(c.values().iter().all(|&v| v == 3.0));

        let f = sample_grid(|p| p[0], &w, (3, 3)).unwrap();
        for j in 0..3 {
            assert_eq!([f.value(0, j), f.value(1, j), f.value(2, j)], [0.0, 0.5, 1.0]);
        }

        let w = Window::cube(2, -1.0, 1.0).unwrap();
        let r = sample_grid(|p| p[0] * p[0] + p[1] * p[1], &w, (3, 3)).unwrap();
        assert_eq!(r.value(2, 2), 2.0);
    }

    #[test]
    fn non_finite_samples_are_reported() {
        let w = Window::cube(2, -1.0, 1.0).unwrap();
        let err = sample_grid(|p| 1.0 / p[0], &w, (3, 3)).unwrap_err();
        match err {
            Error::NonFiniteSample { point, .. } => assert_eq!(point, alloc::vec![0.0, -1.0]),
            e => panic!("{e:?}"),
        }
        assert!(sample_grid(|p| p[0], &w, (1, 3)).is_err());
    }

    #[test]
    fn critical_values_of_a_paraboloid() {
        let w = Window::cube(2, -1.0, 1.0).unwrap();
        let f = sample_grid(|p| p[0] * p[0] + p[1] * p[1], &w, (5, 5)).unwrap();
        assert_eq!(f.critical_values(), alloc::vec![0.0]);
        let s = sample_grid(|p| p[0] * p[0] - p[1] * p[1], &w, (5, 5)).unwrap();
        assert_eq!(s.critical_values(), alloc::vec![0.0]);
    }
}
