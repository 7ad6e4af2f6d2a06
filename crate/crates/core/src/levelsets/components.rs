use alloc::vec;
use alloc::vec::Vec;

use super::Contour;
use crate::nn::Window;
use crate::unionfind::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Classification {
    /// Stays clear of the window boundary.
    Bounded,
    /// Comes within the boundary tolerance of the window edge; evidence that
    /// the true component is unbounded.
    BoundaryTouching,
}

/// A chain of contour vertices; closed chains do not repeat the first point.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

impl Polyline {
    pub fn length(&self) -> f64 {
        let seg = |p: &[f64; 2], q: &[f64; 2]| libm::hypot(p[0] - q[0], p[1] - q[1]);
        let open: f64 = self.points.windows(2).map(|w| seg(&w[0], &w[1])).sum();
        match (self.closed, self.points.first(), self.points.last()) {
            (true, Some(a), Some(b)) => open + seg(b, a),
            _ => open,
        }
    }

    /// Even-odd ray casting against the closed polygon.
    pub fn encloses(&self, p: [f64; 2]) -> bool {
        if !self.closed || self.points.len() < 3 {
            return false;
        }
        let mut inside = false;
        let n = self.points.len();
        for k in 0..n {
            let a = self.points[k];
            let b = self.points[(k + 1) % n];
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

/// One path component of an extracted level set.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LevelComponent {
    pub polylines: Vec<Polyline>,
    pub classification: Classification,
    pub level: f64,
    pub length: f64,
    /// Lattice cell `(i, j)` crossed by the component.
    pub anchor_cell: (usize, usize),
}

impl LevelComponent {
    pub fn is_bounded(&self) -> bool {
        self.classification == Classification::Bounded
    }

    pub fn encloses(&self, p: [f64; 2]) -> bool {
        self.polylines.iter().any(|c| c.encloses(p))
    }

    pub fn vertices(&self) -> impl Iterator<Item = &[f64; 2]> {
        self.polylines.iter().flat_map(|c| c.points.iter())
    }

    pub fn vertex_count(&self) -> usize {
        self.polylines.iter().map(|c| c.points.len()).sum()
    }
}

pub fn classify_component(chains: &[Polyline], window: &Window, boundary_tol: f64) -> Classification {
    let touching = chains
        .iter()
        .flat_map(|c| c.points.iter())
        .any(|p| window.distance_to_boundary(p) <= boundary_tol);
    if touching {
        Classification::BoundaryTouching
    } else {
        Classification::Bounded
    }
}

/// Groups contour segments into path components by union-find on shared
/// vertex ids and assembles each component's chains in traversal order.
/// Components are ordered by their first segment.
pub fn link_components(contour: &Contour, boundary_tol: f64) -> Vec<LevelComponent> {
    let nv = contour.vertices.len();
    let mut uf = UnionFind::new(nv);
    // each vertex lies on one lattice edge shared by at most two cells, so it
    // touches at most two segments
    let mut incident = vec![[u32::MAX; 2]; nv];
    for (k, s) in contour.segments.iter().enumerate() {
        uf.union(s.a, s.b);
        for v in [s.a, s.b] {
            let slot = &mut incident[v as usize];
            if slot[0] == u32::MAX {
                slot[0] = k as u32;
            } else {
                debug_assert_eq!(slot[1], u32::MAX, "vertex {v} has degree > 2");
                slot[1] = k as u32;
            }
        }
    }

    // component roots in order of first appearance
    let mut root_index = vec![u32::MAX; nv];
    let mut members: Vec<Vec<u32>> = Vec::new();
    for (k, s) in contour.segments.iter().enumerate() {
        let r = uf.find(s.a) as usize;
        if root_index[r] == u32::MAX {
            root_index[r] = members.len() as u32;
            members.push(Vec::new());
        }
        members[root_index[r] as usize].push(k as u32);
    }

    let mut used = vec![false; contour.segments.len()];
    let other_end = |seg: &super::Segment, v: u32| if seg.a == v { seg.b } else { seg.a };
    let degree = |v: u32| incident[v as usize].iter().filter(|&&s| s != u32::MAX).count();

    members
        .into_iter()
        .map(|segs| {
            let mut chains = Vec::new();
            // open chains start from their degree-one ends
            let mut starts: Vec<u32> = Vec::new();
            for &k in &segs {
                let s = &contour.segments[k as usize];
                for v in [s.a, s.b] {
                    if degree(v) == 1 {
                        starts.push(v);
                    }
                }
            }
            let seeds = starts.into_iter().chain(segs.iter().map(|&k| contour.segments[k as usize].a));
            for start in seeds {
                let mut points = vec![contour.vertices[start as usize]];
                let mut v = start;
                loop {
                    let next = incident[v as usize]
                        .iter()
                        .copied()
                        .find(|&s| s != u32::MAX && !used[s as usize]);
                    let Some(k) = next else { break };
                    used[k as usize] = true;
                    v = other_end(&contour.segments[k as usize], v);
                    if v == start {
                        break;
                    }
                    points.push(contour.vertices[v as usize]);
                }
                if points.len() > 1 {
                    let closed = v == start;
                    chains.push(Polyline { points, closed });
                }
            }
            let classification = classify_component(&chains, &contour.window, boundary_tol);
            let length = chains.iter().map(Polyline::length).sum();
            LevelComponent {
                polylines: chains,
                classification,
                level: contour.level,
                length,
                anchor_cell: contour.cell_of(&contour.segments[segs[0] as usize]),
            }
        })
        .collect()
}
