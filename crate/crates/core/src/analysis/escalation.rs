use alloc::vec::Vec;

use super::topology::{analyze_field, TopologyReport};
use crate::levelsets::{sample_grid, Classification};
use crate::nn::{Network, Window};
use crate::{Error, Result};

/// Verdict for a base-window component after window doubling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FinalClass {
    /// Bounded at every scale.
    Bounded,
    /// Touches the boundary of the largest window.
    UnboundedEvidence,
    /// Bounded at the largest window but touching at a smaller one, or lost
    /// track of between scales.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EscalatedComponent {
    /// Index into the base report's component list.
    pub base_index: usize,
    /// Classification at each scale, `None` where no matching component was
    /// found.
    pub per_scale: Vec<Option<Classification>>,
    pub verdict: FinalClass,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EscalationReport {
    /// Report at the base window, then at 2x, 4x, ...
    pub scales: Vec<TopologyReport>,
    pub components: Vec<EscalatedComponent>,
}

impl EscalationReport {
    pub fn base(&self) -> &TopologyReport {
        &self.scales[0]
    }

    pub fn count(&self, class: FinalClass) -> usize {
        self.components.iter().filter(|c| c.verdict == class).count()
    }

    pub fn bounded(&self) -> impl Iterator<Item = &crate::levelsets::LevelComponent> {
        self.components
            .iter()
            .filter(|c| c.verdict == FinalClass::Bounded)
            .map(|c| &self.scales[0].components[c.base_index])
    }
}

/// Re-analyzes the level set on windows scaled by `2, 4, ..., 2^max_doublings`
/// about the base center, keeping the lattice spacing fixed, so the base
/// lattice nodes reappear in every larger grid. Each base component is
/// followed to the component passing closest to its first vertex at every
/// scale.
pub fn escalate(
    f: impl FnMut(&[f64]) -> f64,
    level: f64,
    base_window: &Window,
    resolution: usize,
    max_doublings: usize,
    boundary_tol: Option<f64>,
    network_hash: Option<u64>,
) -> Result<EscalationReport> {
    let mut reports = escalate_levels(
        f,
        &[level],
        base_window,
        resolution,
        max_doublings,
        boundary_tol,
        network_hash,
    )?;
    Ok(reports.remove(0))
}

/// [`escalate`] for several levels, sampling each scale once.
pub fn escalate_levels(
    mut f: impl FnMut(&[f64]) -> f64,
    levels: &[f64],
    base_window: &Window,
    resolution: usize,
    max_doublings: usize,
    boundary_tol: Option<f64>,
    network_hash: Option<u64>,
) -> Result<Vec<EscalationReport>> {
    if resolution < 2 {
        return Err(Error::InvalidArgument("resolution must be at least 2".into()));
    }
    if max_doublings > 8 {
        return Err(Error::InvalidArgument("at most 8 doublings".into()));
    }
    let mut scales: Vec<Vec<TopologyReport>> = levels.iter().map(|_| Vec::new()).collect();
    let mut tol = None;
    for k in 0..=max_doublings {
        let window = if k == 0 {
            base_window.clone()
        } else {
            base_window.scaled((1usize << k) as f64)?
        };
        let res = (resolution - 1) * (1 << k) + 1;
        let field = sample_grid(&mut f, &window, (res, res))?;
        let t = *tol.get_or_insert_with(|| boundary_tol.unwrap_or_else(|| field.default_boundary_tol()));
        for (per_level, &level) in scales.iter_mut().zip(levels) {
            per_level.push(analyze_field(&field, level, t, network_hash)?);
        }
    }

    let cell = |a: usize| base_window.extent(a) / (resolution - 1) as f64;
    let match_radius = 2.0 * libm::hypot(cell(0), cell(1));
    Ok(scales
        .into_iter()
        .map(|scales| {
            let components = scales[0]
                .components
                .iter()
                .enumerate()
                .map(|(base_index, comp)| {
                    let anchor = comp.polylines[0].points[0];
                    let per_scale: Vec<Option<Classification>> = scales
                        .iter()
                        .enumerate()
                        .map(|(k, report)| {
                            if k == 0 {
                                return Some(comp.classification);
                            }
                            nearest(report, anchor)
                                .filter(|&(_, d)| d <= match_radius)
                                .map(|(idx, _)| report.components[idx].classification)
                        })
                        .collect();
                    let verdict = match per_scale.last().copied().flatten() {
                        Some(Classification::BoundaryTouching) => FinalClass::UnboundedEvidence,
                        _ if per_scale.iter().all(|c| *c == Some(Classification::Bounded)) => {
                            FinalClass::Bounded
                        }
                        _ => FinalClass::Inconclusive,
                    };
                    EscalatedComponent {
                        base_index,
                        per_scale,
                        verdict,
                    }
                })
                .collect();
            EscalationReport { scales, components }
        })
        .collect())
}

fn nearest(report: &TopologyReport, p: [f64; 2]) -> Option<(usize, f64)> {
    report
        .components
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.vertices().map(move |v| (i, libm::hypot(v[0] - p[0], v[1] - p[1]))))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// [`escalate`] for the scalar output of a network.
pub fn window_escalation(
    net: &Network,
    level: f64,
    base_window: &Window,
    resolution: usize,
    max_doublings: usize,
) -> Result<EscalationReport> {
    let mut reports = network_escalation(net, &[level], base_window, resolution, max_doublings, None)?;
    Ok(reports.remove(0))
}

/// [`escalate_levels`] for the scalar output of a network.
pub fn network_escalation(
    net: &Network,
    levels: &[f64],
    base_window: &Window,
    resolution: usize,
    max_doublings: usize,
    boundary_tol: Option<f64>,
) -> Result<Vec<EscalationReport>> {
    if net.output_dim() != 1 || net.input_dim() != 2 {
        return Err(Error::InvalidArgument(
            "level-set analysis needs a network from the plane to the line".into(),
        ));
    }
    let mut eval = net.evaluator();
    escalate_levels(
        |x| eval.eval_scalar(x).unwrap_or(f64::NAN),
        levels,
        base_window,
        resolution,
        max_doublings,
        boundary_tol,
        Some(net.fingerprint()),
    )
}
