use alloc::string::String;
use alloc::vec::Vec;

use crate::levelsets::{link_components, marching_squares, Classification, LevelComponent, ScalarField};
use crate::nn::Window;
use crate::Result;

/// Level-set components of one field at one level, with enough provenance to
/// regenerate them.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TopologyReport {
    pub level: f64,
    pub window: Window,
    pub resolution: (usize, usize),
    pub boundary_tol: f64,
    /// Fingerprint of the network that produced the field, when there is one.
    pub network_hash: Option<String>,
    /// Digest of the sampled field values.
    pub field_hash: String,
    pub components: Vec<LevelComponent>,
    pub bounded: usize,
    pub boundary_touching: usize,
}

impl TopologyReport {
    pub fn bounded_components(&self) -> impl Iterator<Item = &LevelComponent> {
        self.components.iter().filter(|c| c.is_bounded())
    }

    /// Recounts classifications from the component list.
    pub fn recount(&self) -> (usize, usize) {
        let bounded = self.components.iter().filter(|c| c.is_bounded()).count();
        (bounded, self.components.len() - bounded)
    }
}

pub fn hex_digest(v: u64) -> String {
    alloc::format!("{v:016x}")
}

pub fn field_digest(field: &ScalarField) -> u64 {
    let mut h = crate::hash::Fnv64::new();
    let (nx, ny) = field.resolution();
    h.write_u64(nx as u64);
    h.write_u64(ny as u64);
    for v in field.window().lo().iter().chain(field.window().hi()) {
        h.write_f64(*v);
    }
    for v in field.values() {
        h.write_f64(*v);
    }
    h.finish()
}

/// Extracts, links and classifies the `level` components of `field`.
pub fn analyze_field(
    field: &ScalarField,
    level: f64,
    boundary_tol: f64,
    network_hash: Option<u64>,
) -> Result<TopologyReport> {
    let contour = marching_squares(field, level)?;
    let components = link_components(&contour, boundary_tol);
    let bounded = components
        .iter()
        .filter(|c| c.classification == Classification::Bounded)
        .count();
    Ok(TopologyReport {
        level,
        window: field.window().clone(),
        resolution: field.resolution(),
        boundary_tol,
        network_hash: network_hash.map(hex_digest),
        field_hash: hex_digest(field_digest(field)),
        boundary_touching: components.len() - bounded,
        bounded,
        components,
    })
}
