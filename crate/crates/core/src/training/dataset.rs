use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DatasetMeta {
    pub generator: String,
    pub seed: u64,
    pub params: Vec<(String, f64)>,
}

/// Labeled points for binary classification.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<Vec<f64>>,
    labels: Vec<u8>,
    meta: DatasetMeta,
}

impl Dataset {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<u8>, meta: DatasetMeta) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: labels.len(),
            });
        }
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidArgument("empty dataset".into()))?;
        for (i, (p, &l)) in points.iter().zip(&labels).enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("point {i} is not finite")));
            }
            if l > 1 {
                return Err(Error::InvalidArgument(format!("label {l} of point {i} is not 0 or 1")));
            }
        }
        Ok(Dataset {
            points,
            labels,
            meta,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn meta(&self) -> &DatasetMeta {
        &self.meta
    }

    pub fn positive_fraction(&self) -> f64 {
        self.labels.iter().filter(|&&l| l == 1).count() as f64 / self.len() as f64
    }
}

/// Parameters of the two-class ring dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RingParams {
    pub n_inner: usize,
    pub n_ring: usize,
    pub inner_sigma: f64,
    pub ring_radius: f64,
    pub ring_sigma: f64,
}

impl Default for RingParams {
    fn default() -> Self {
        RingParams {
            n_inner: 500,
            n_ring: 1000,
            inner_sigma: 0.5,
            ring_radius: 3.0,
            ring_sigma: 0.3,
        }
    }
}

pub const RING_GENERATOR: &str = "ring";

/// A Gaussian blob at the origin (label 0) surrounded by a noisy ring
/// (label 1). Inner points come first, then ring points.
pub fn gen_ring_dataset(seed: u64, params: &RingParams) -> Result<Dataset> {
    let RingParams {
        n_inner,
        n_ring,
        inner_sigma,
        ring_radius,
        ring_sigma,
    } = *params;
    if n_inner == 0 || n_ring == 0 {
        return Err(Error::InvalidArgument("both classes need at least one point".into()));
    }
    if !(inner_sigma > 0.0 && ring_sigma >= 0.0 && inner_sigma.is_finite() && ring_sigma.is_finite())
    {
        return Err(Error::InvalidArgument(format!(
            "invalid spreads inner_sigma={inner_sigma}, ring_sigma={ring_sigma}"
        )));
    }
    if !(ring_radius > 3.0 * inner_sigma) || !ring_radius.is_finite() {
        return Err(Error::NotSeparable {
            ring_radius,
            inner_sigma,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n_inner + n_ring);
    let mut labels = Vec::with_capacity(n_inner + n_ring);
    for _ in 0..n_inner {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        points.push(alloc::vec![inner_sigma * x, inner_sigma * y]);
        labels.push(0);
    }
    for _ in 0..n_ring {
        let z: f64 = rng.sample(StandardNormal);
        let r = ring_radius + ring_sigma * z;
        let theta = rng.random_range(0.0..TAU);
        points.push(alloc::vec![r * libm::cos(theta), r * libm::sin(theta)]);
        labels.push(1);
    }
    let meta = DatasetMeta {
        generator: RING_GENERATOR.to_string(),
        seed,
        params: alloc::vec![
            ("n_inner".to_string(), n_inner as f64),
            ("n_ring".to_string(), n_ring as f64),
            ("inner_sigma".to_string(), inner_sigma),
            ("ring_radius".to_string(), ring_radius),
            ("ring_sigma".to_string(), ring_sigma),
        ],
    };
    Dataset::new(points, labels, meta)
}
