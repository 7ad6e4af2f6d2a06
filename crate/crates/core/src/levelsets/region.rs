use alloc::vec;
use alloc::vec::Vec;

use super::{ScalarField, ScalarField3};
use crate::{Error, Result};

/// One 4-connected (6-connected in 3D) component of band cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegionInfo {
    /// Some cell of the component lies in the outermost ring of cells.
    pub touches_boundary: bool,
    pub cell_count: usize,
}

/// Connected components of the cells whose sampled value range meets an
/// open interval `(lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionComponents {
    /// Cells per axis.
    pub shape: Vec<usize>,
    /// Component label of each cell (axis 0 fastest), `None` outside the band.
    pub labels: Vec<Option<u32>>,
    pub components: Vec<RegionInfo>,
}

impl RegionComponents {
    pub fn count(&self) -> usize {
        self.components.len()
    }

    /// Label of the 2D cell `(i, j)`.
    pub fn label(&self, i: usize, j: usize) -> Option<u32> {
        self.labels[i + self.shape[0] * j]
    }
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if !(lo < hi) {
        return Err(Error::InvalidArgument(alloc::format!(
            "empty interval ({lo}, {hi})"
        )));
    }
    Ok(())
}

/// Flood fill over cells. A cell belongs to the band when the interval
/// `[min, max]` of its corner samples meets `(lo, hi)`, which is exactly the
/// set of cells the continuous preimage of `(lo, hi)` can pass through.
fn flood(shape: &[usize], in_band: &[bool]) -> RegionComponents {
    let total = in_band.len();
    let dims = shape.len();
    let mut labels = vec![None; total];
    let mut components = Vec::new();
    let mut stack = Vec::new();
    let mut coord = vec![0usize; dims];
    for start in 0..total {
        if !in_band[start] || labels[start].is_some() {
            continue;
        }
        let label = components.len() as u32;
        let mut info = RegionInfo {
            touches_boundary: false,
            cell_count: 0,
        };
        labels[start] = Some(label);
        stack.push(start);
        while let Some(cell) = stack.pop() {
            info.cell_count += 1;
            let mut rest = cell;
            for (a, c) in coord.iter_mut().enumerate() {
                *c = rest % shape[a];
                rest /= shape[a];
            }
            if coord.iter().zip(shape).any(|(&c, &n)| c == 0 || c + 1 == n) {
                info.touches_boundary = true;
            }
            let mut stride = 1;
            for a in 0..dims {
                if coord[a] > 0 {
                    let nb = cell - stride;
                    if in_band[nb] && labels[nb].is_none() {
                        labels[nb] = Some(label);
                        stack.push(nb);
                    }
                }
                if coord[a] + 1 < shape[a] {
                    let nb = cell + stride;
                    if in_band[nb] && labels[nb].is_none() {
                        labels[nb] = Some(label);
                        stack.push(nb);
                    }
                }
                stride *= shape[a];
            }
        }
        components.push(info);
    }
    RegionComponents {
        shape: shape.to_vec(),
        labels,
        components,
    }
}

/// Path components of the preimage of `(lo, hi)` on a 2D field, at cell
/// resolution with 4-connectivity.
pub fn region_components(field: &ScalarField, interval: (f64, f64)) -> Result<RegionComponents> {
    let (lo, hi) = interval;
    check_interval(lo, hi)?;
    let (nx, ny) = field.resolution();
    let (cx, cy) = (nx - 1, ny - 1);
    let mut in_band = Vec::with_capacity(cx * cy);
    for j in 0..cy {
        for i in 0..cx {
            let c = [
                field.value(i, j),
                field.value(i + 1, j),
                field.value(i + 1, j + 1),
                field.value(i, j + 1),
            ];
            in_band.push(meets(&c, lo, hi));
        }
    }
    Ok(flood(&[cx, cy], &in_band))
}

/// The 3D counterpart of [`region_components`] with 6-connectivity.
pub fn region_components_3d(field: &ScalarField3, interval: (f64, f64)) -> Result<RegionComponents> {
    let (lo, hi) = interval;
    check_interval(lo, hi)?;
    let [nx, ny, nz] = field.resolution();
    let shape = [nx - 1, ny - 1, nz - 1];
    let mut in_band = Vec::with_capacity(shape.iter().product());
    for k in 0..shape[2] {
        for j in 0..shape[1] {
            for i in 0..shape[0] {
                let mut c = [0.0; 8];
                for (n, v) in c.iter_mut().enumerate() {
                    *v = field.value(i + (n & 1), j + ((n >> 1) & 1), k + (n >> 2));
                }
                in_band.push(meets(&c, lo, hi));
            }
        }
    }
    Ok(flood(&shape, &in_band))
}

#[inline]
fn meets(corners: &[f64], lo: f64, hi: f64) -> bool {
    let min = corners.iter().copied().fold(f64::INFINITY, f64::min);
    let max = corners.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max > lo && min < hi
}
