//! Marching squares.
//!
//! Corners of cell `(i, j)` and its edges:
//!
//! ```text
//!  c3 ---e2--- c2
//!  |           |
//!  e3          e1
//!  |           |
//!  c0 ---e0--- c1
//! ```
//!
//! Every crossing vertex is stored once per lattice edge and referenced by
//! index from both cells sharing that edge, so segments of one contour meet
//! in identical vertex ids.

use alloc::vec;
use alloc::vec::Vec;

use super::ScalarField;
use crate::nn::Window;
use crate::{Error, Result};

/// Relative offset applied to samples that equal the level exactly.
pub const LEVEL_NUDGE: f64 = 1e-12;

/// One contour segment inside cell `cell = i + (nx - 1) * j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub a: u32,
    pub b: u32,
    pub cell: u32,
}

/// Output of [`marching_squares`]: shared vertices plus the segments between
/// them.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub window: Window,
    pub resolution: (usize, usize),
    pub level: f64,
    pub vertices: Vec<[f64; 2]>,
    pub segments: Vec<Segment>,
}

impl Contour {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Cell indices `(i, j)` of a segment.
    pub fn cell_of(&self, s: &Segment) -> (usize, usize) {
        let cx = self.resolution.0 - 1;
        (s.cell as usize % cx, s.cell as usize / cx)
    }

    pub fn total_length(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| {
                let (p, q) = (self.vertices[s.a as usize], self.vertices[s.b as usize]);
                libm::hypot(p[0] - q[0], p[1] - q[1])
            })
            .sum()
    }
}

/// Sample value with exact hits on `level` moved just above it.
#[inline]
fn nudged(v: f64, level: f64, nudge: f64) -> f64 {
    if v == level {
        level + nudge
    } else {
        v
    }
}

/// Extracts the `level` isocontour with the 16-case table, linear
/// interpolation along crossed edges and saddle cells resolved by the mean
/// of the four corners.
pub fn marching_squares(field: &ScalarField, level: f64) -> Result<Contour> {
    if !level.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!("level {level} is not finite")));
    }
    let (nx, ny) = field.resolution();
    let range = field.range();
    let nudge = if range > 0.0 {
        LEVEL_NUDGE * range
    } else {
        LEVEL_NUDGE * level.abs().max(1.0)
    };
    let values: Vec<f64> = field.values().iter().map(|&v| nudged(v, level, nudge)).collect();
    // `above` is decided by `>=` so that a nudge lost to rounding still
    // counts exact hits as above the level.
    let above = |v: f64| v >= level;

    let h_edges = (nx - 1) * ny;
    let mut edge_vertex = vec![u32::MAX; h_edges + nx * (ny - 1)];
    let mut vertices: Vec<[f64; 2]> = Vec::new();
    let mut segments = Vec::new();

    let xs: Vec<f64> = (0..nx).map(|i| field.x(i)).collect();
    let ys: Vec<f64> = (0..ny).map(|j| field.y(j)).collect();

    let mut vertex_on = |edge: usize, p0: (usize, usize), p1: (usize, usize)| -> u32 {
        if edge_vertex[edge] != u32::MAX {
            return edge_vertex[edge];
        }
        let v0 = values[p0.0 + nx * p0.1];
        let v1 = values[p1.0 + nx * p1.1];
        let t = ((level - v0) / (v1 - v0)).clamp(0.0, 1.0);
        let (x0, y0) = (xs[p0.0], ys[p0.1]);
        let (x1, y1) = (xs[p1.0], ys[p1.1]);
        let p = [x0 + t * (x1 - x0), y0 + t * (y1 - y0)];
        let id = vertices.len() as u32;
        vertices.push(p);
        edge_vertex[edge] = id;
        id
    };

    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let vals = corners.map(|(a, b)| values[a + nx * b]);
            let case = vals
                .iter()
                .enumerate()
                .fold(0u8, |c, (k, &v)| c | (u8::from(above(v)) << k));
            if case == 0 || case == 15 {
                continue;
            }
            // edge k joins corners EDGE_CORNERS[k]
            const EDGE_CORNERS: [(usize, usize); 4] = [(0, 1), (1, 2), (3, 2), (0, 3)];
            let edge_ids = [
                i + (nx - 1) * j,
                h_edges + (i + 1) + nx * j,
                i + (nx - 1) * (j + 1),
                h_edges + i + nx * j,
            ];
            let cell = (i + (nx - 1) * j) as u32;
            let mut vertex = |k: usize| {
                let (c0, c1) = EDGE_CORNERS[k];
                vertex_on(edge_ids[k], corners[c0], corners[c1])
            };
            if case == 5 || case == 10 {
                let center = 0.25 * (vals[0] + vals[1] + vals[2] + vals[3]);
                let center_above = above(center);
                // cut off each corner on the other side of the center
                const CORNER_EDGES: [(usize, usize); 4] = [(3, 0), (0, 1), (1, 2), (2, 3)];
                for (k, &(ea, eb)) in CORNER_EDGES.iter().enumerate() {
                    if above(vals[k]) != center_above {
                        let (a, b) = (vertex(ea), vertex(eb));
                        segments.push(Segment { a, b, cell });
                    }
                }
            } else {
                let mut crossed = (0..4).filter(|&k| {
                    let (c0, c1) = EDGE_CORNERS[k];
                    above(vals[c0]) != above(vals[c1])
                });
                let (ea, eb) = (crossed.next().unwrap(), crossed.next().unwrap());
                let (a, b) = (vertex(ea), vertex(eb));
                segments.push(Segment { a, b, cell });
            }
        }
    }
    Ok(Contour {
        window: field.window().clone(),
        resolution: (nx, ny),
        level,
        vertices,
        segments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levelsets::sample_grid;
    use core::f64::consts::TAU;

    fn window() -> Window {
        Window::cube(2, -2.0, 2.0).unwrap()
    }

    #[test]
    fn circle_perimeter() {
        let f = sample_grid(|p| p[0] * p[0] + p[1] * p[1] - 1.0, &window(), (201, 201)).unwrap();
        let c = marching_squares(&f, 0.0).unwrap();
        let len = c.total_length();
        assert!((len - TAU).abs() < 0.02 * TAU, "{len}");
        // closed loop: every vertex used by exactly two segments
        let mut degree = vec![0; c.vertices.len()];
        for s in &c.segments {
            degree[s.a as usize] += 1;
            degree[s.b as usize] += 1;
        }
        assert!(degree.iter().all(|&d| d == 2));
    }

    #[test]
    fn vertical_line() {
        let f = sample_grid(|p| p[0] + 0.013, &window(), (41, 41)).unwrap();
        let c = marching_squares(&f, 0.0).unwrap();
        assert_eq!(c.segments.len(), 40);
        assert!(c.vertices.iter().all(|v| (v[0] + 0.013).abs() < 1e-12));
    }

    #[test]
    fn empty_level() {
        let f = sample_grid(|_| 0.0, &window(), (11, 11)).unwrap();
        assert!(marching_squares(&f, 1.0).unwrap().is_empty());
        assert!(marching_squares(&f, f64::NAN).is_err());
    }

    #[test]
    fn exact_hits_are_nudged() {
        // f = x on a lattice containing x = 0 exactly: nodes on the level
        // count as above, so the crossing sits on the edges left of x = 0.
        let f = sample_grid(|p| p[0], &window(), (5, 5)).unwrap();
        let c = marching_squares(&f, 0.0).unwrap();
        assert_eq!(c.segments.len(), 4);
        for v in &c.vertices {
            assert!(v[0] <= 0.0 && v[0] > -1.0);
        }
    }

    #[test]
    fn saddle_follows_center() {
        let w = Window::cube(2, 0.0, 1.0).unwrap();
        // corners c0, c2 above; center above connects them
        let vals = |center_high: bool| {
            let d = if center_high { 0.3 } else { -0.3 };
            alloc::vec![1.0, -1.0 + d, 1.0, -1.0 + d]
        };
        for (center_high, cut_corners) in [(true, [1usize, 3]), (false, [0, 2])] {
            let f = ScalarField::from_values(w.clone(), (2, 2), {
                let v = vals(center_high);
                // node order: (0,0), (1,0), (0,1), (1,1)
                alloc::vec![v[0], v[1], v[3], v[2]]
            })
            .unwrap();
            let c = marching_squares(&f, 0.0).unwrap();
            assert_eq!(c.segments.len(), 2);
            let corners = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
            for (s, &k) in c.segments.iter().zip(&cut_corners) {
                let mid = {
                    let (p, q) = (c.vertices[s.a as usize], c.vertices[s.b as usize]);
                    [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0]
                };
                let near = corners[k];
                assert!(libm::hypot(mid[0] - near[0], mid[1] - near[1]) < 0.5);
            }
        }
    }
}
