use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::levelsets::{
    link_components, marching_squares, region_components, Classification, ScalarField,
};
use crate::Result;

/// Outcome of comparing contour components at one level with the band
/// components of `(level - delta, level + delta)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OracleComparison {
    pub level: f64,
    pub delta: f64,
    pub contour_components: usize,
    pub band_components: usize,
    pub contour_touching: usize,
    pub band_touching: usize,
    /// Contour components whose band component is shared with another
    /// contour component, or whose classification differs from it.
    pub mismatched: usize,
}

impl OracleComparison {
    pub fn agrees(&self) -> bool {
        self.contour_components == self.band_components
            && self.contour_touching == self.band_touching
            && self.mismatched == 0
    }
}

/// Matches every contour component to the band component containing its
/// anchor cell. Contour components count as boundary touching when a vertex
/// lies within one cell of the window edge, which is where the band's
/// outermost cell ring sits.
pub fn compare_with_band(field: &ScalarField, level: f64, delta: f64) -> Result<OracleComparison> {
    let contour = marching_squares(field, level)?;
    let (hx, hy) = field.cell_size();
    let tol = hx.max(hy) * (1.0 + 1e-9);
    let components = link_components(&contour, tol);
    let band = region_components(field, (level - delta, level + delta))?;

    let mut owners: BTreeMap<u32, usize> = BTreeMap::new();
    let mut mismatched = 0;
    for c in &components {
        let (i, j) = c.anchor_cell;
        match band.label(i, j) {
            Some(label) => {
                *owners.entry(label).or_default() += 1;
                let touching = c.classification == Classification::BoundaryTouching;
                if touching != band.components[label as usize].touches_boundary {
                    mismatched += 1;
                }
            }
            None => mismatched += 1,
        }
    }
    mismatched += owners.values().filter(|&&n| n > 1).map(|n| n - 1).sum::<usize>();
    Ok(OracleComparison {
        level,
        delta,
        contour_components: components.len(),
        band_components: band.count(),
        contour_touching: components.iter().filter(|c| !c.is_bounded()).count(),
        band_touching: band.components.iter().filter(|c| c.touches_boundary).count(),
        mismatched,
    })
}

/// Values where the topology of a level set can change on the grid:
/// interior critical nodes plus local extrema along the window edge.
pub fn topology_change_values(field: &ScalarField) -> Vec<f64> {
    let mut out = field.critical_values();
    let (nx, ny) = field.resolution();
    let mut ring: Vec<(usize, usize)> = Vec::with_capacity(2 * (nx + ny));
    ring.extend((0..nx).map(|i| (i, 0)));
    ring.extend((1..ny).map(|j| (nx - 1, j)));
    ring.extend((0..nx - 1).rev().map(|i| (i, ny - 1)));
    ring.extend((1..ny - 1).rev().map(|j| (0, j)));
    let len = ring.len();
    for k in 0..len {
        let v = |k: usize| field.value(ring[k].0, ring[k].1);
        let (prev, cur, next) = (v((k + len - 1) % len), v(k), v((k + 1) % len));
        let is_corner = matches!(ring[k], (0, 0)) || ring[k] == (nx - 1, 0) || ring[k] == (0, ny - 1) || ring[k] == (nx - 1, ny - 1);
        if is_corner || (cur - prev) * (next - cur) <= 0.0 {
            out.push(cur);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Whether `level` keeps at least `margin` from every value in the sorted
/// list `critical`.
pub fn is_clear_of(critical: &[f64], level: f64, margin: f64) -> bool {
    let i = critical.partition_point(|&c| c < level);
    let near = |k: usize| critical.get(k).is_some_and(|&c| (c - level).abs() < margin);
    !(near(i) || (i > 0 && near(i - 1)))
}
