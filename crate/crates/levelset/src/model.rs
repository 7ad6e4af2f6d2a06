//! Network files: JSON with nested weight rows.

use std::path::Path;

use levelset_core::nn::{Activation, Layer, Matrix, Network};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format_version: u32,
    pub input_dim: usize,
    pub layers: Vec<LayerFile>,
    pub activation: Activation,
    pub final_activation: bool,
}

/// `weights[r][c]` maps input `c` to output `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerFile {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl From<&Network> for ModelFile {
    fn from(net: &Network) -> Self {
        ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            input_dim: net.input_dim(),
            layers: net
                .layers()
                .iter()
                .map(|l| LayerFile {
                    weights: l.weights.to_rows(),
                    bias: l.bias.clone(),
                })
                .collect(),
            activation: net.activation(),
            final_activation: net.final_activation(),
        }
    }
}

impl TryFrom<ModelFile> for Network {
    type Error = levelset_core::Error;

    fn try_from(m: ModelFile) -> levelset_core::Result<Network> {
        let layers = m
            .layers
            .into_iter()
            .map(|l| Layer::new(Matrix::from_rows(&l.weights)?, l.bias))
            .collect::<levelset_core::Result<Vec<_>>>()?;
        Network::new(m.input_dim, layers, m.activation, m.final_activation)
    }
}

pub fn model_to_json(net: &Network) -> String {
    let mut s = serde_json::to_string_pretty(&ModelFile::from(net)).expect("model serializes");
    s.push('\n');
    s
}

pub fn model_from_json(text: &str, path: &Path) -> Result<Network> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::format(path, e))?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::format(
            path,
            format!("unsupported model format_version {}", file.format_version),
        ));
    }
    Ok(Network::try_from(file)?)
}

pub fn write_model(path: &Path, net: &Network) -> Result<()> {
    std::fs::write(path, model_to_json(net)).map_err(Error::io(path))
}

pub fn read_model(path: &Path) -> Result<Network> {
    let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
    model_from_json(&text, path)
}
