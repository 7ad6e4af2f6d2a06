use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::Activation;
use crate::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "{} values cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument("ragged matrix rows".into()));
        }
        Matrix::from_row_major(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Copy enlarged to `rows x cols` with zero fill; existing entries keep
    /// their positions.
    pub fn padded(&self, rows: usize, cols: usize) -> Matrix {
        let mut out = Matrix::zeros(rows, cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
        }
        out
    }
}

/// One affine map `x -> W x + b`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Layer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl Layer {
    pub fn new(weights: Matrix, bias: Vec<f64>) -> Result<Self> {
        if bias.len() != weights.rows() {
            return Err(Error::DimensionMismatch {
                expected: weights.rows(),
                got: bias.len(),
            });
        }
        Ok(Layer { weights, bias })
    }

    pub fn input_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.rows()
    }

    /// `out = W x + b`, accumulated as `b[r] + w[r][0] x[0] + w[r][1] x[1] + ...`.
    #[inline]
    pub fn affine_into(&self, x: &[f64], out: &mut [f64]) {
        let cols = self.weights.cols();
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.weights.data[r * cols..(r + 1) * cols];
            let mut acc = self.bias[r];
            for (w, v) in row.iter().zip(x) {
                acc += w * v;
            }
            *o = acc;
        }
    }
}

/// A layered feed-forward network `R^input_dim -> R^output_dim`.
///
/// The activation is applied after every layer except the last, which gets it
/// only when `final_activation` is set. Networks are immutable once built.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Network {
    input_dim: usize,
    layers: Vec<Layer>,
    activation: Activation,
    final_activation: bool,
}

impl Network {
    pub fn new(
        input_dim: usize,
        layers: Vec<Layer>,
        activation: Activation,
        final_activation: bool,
    ) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::InvalidArgument("input dimension must be positive".into()));
        }
        if layers.is_empty() {
            return Err(Error::InvalidArgument("a network needs at least one layer".into()));
        }
        let mut width = input_dim;
        for (i, layer) in layers.iter().enumerate() {
            if layer.input_dim() != width {
                return Err(Error::BrokenLayerChain {
                    layer: i,
                    expected: width,
                    got: layer.input_dim(),
                });
            }
            if layer.bias.len() != layer.output_dim() {
                return Err(Error::DimensionMismatch {
                    expected: layer.output_dim(),
                    got: layer.bias.len(),
                });
            }
            width = layer.output_dim();
        }
        Ok(Network {
            input_dim,
            layers,
            activation,
            final_activation,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(self.input_dim, Layer::output_dim)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn final_activation(&self) -> bool {
        self.final_activation
    }

    /// `[n_0, n_1, ..., n_k]`: input width followed by every layer's output width.
    pub fn widths(&self) -> Vec<usize> {
        core::iter::once(self.input_dim)
            .chain(self.layers.iter().map(Layer::output_dim))
            .collect()
    }

    /// Output widths of every layer but the last.
    pub fn hidden_widths(&self) -> Vec<usize> {
        self.layers[..self.layers.len() - 1]
            .iter()
            .map(Layer::output_dim)
            .collect()
    }

    pub fn max_width(&self) -> usize {
        self.widths().into_iter().max().unwrap_or(0)
    }

    /// Whether the activation follows layer `i`.
    #[inline]
    pub fn activates(&self, i: usize) -> bool {
        i + 1 < self.layers.len() || self.final_activation
    }

    pub fn evaluator(&self) -> Evaluator<'_> {
        let w = self.max_width();
        Evaluator {
            net: self,
            front: vec![0.0; w],
            back: vec![0.0; w],
        }
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.evaluator().eval(x).map(<[f64]>::to_vec)
    }

    /// First output coordinate; the usual entry point for scalar networks.
    pub fn eval_scalar(&self, x: &[f64]) -> Result<f64> {
        self.evaluator().eval(x).map(|y| y[0])
    }

    /// Splits into `trunk` (all layers but the last, each activated) and
    /// `head` (the last layer), so that `self = head . trunk` with the same
    /// floating-point operations in the same order.
    pub fn decompose(&self) -> Result<(Network, Network)> {
        let k = self.layers.len();
        if k < 2 {
            return Err(Error::DecomposeUndefined { layers: k });
        }
        let trunk = Network {
            input_dim: self.input_dim,
            layers: self.layers[..k - 1].to_vec(),
            activation: self.activation,
            final_activation: true,
        };
        let head = Network {
            input_dim: self.layers[k - 2].output_dim(),
            layers: vec![self.layers[k - 1].clone()],
            activation: self.activation,
            final_activation: self.final_activation,
        };
        Ok((trunk, head))
    }

    /// Copy with a different activation.
    pub fn with_activation(&self, activation: Activation) -> Network {
        Network {
            activation,
            ..self.clone()
        }
    }

    /// Copy with the output activation switched on or off.
    pub fn with_final_activation(&self, final_activation: bool) -> Network {
        Network {
            final_activation,
            ..self.clone()
        }
    }

    /// Total number of weights and biases.
    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.as_slice().len() + l.bias.len())
            .sum()
    }

    /// 64-bit FNV-1a digest of the architecture, activation and every
    /// parameter's bit pattern.
    pub fn fingerprint(&self) -> u64 {
        let mut h = crate::hash::Fnv64::new();
        h.write_u64(self.input_dim as u64);
        match self.activation {
            Activation::Sigmoid => h.write_u64(1),
            Activation::Tanh => h.write_u64(2),
            Activation::Relu => h.write_u64(3),
            Activation::OneToOneRelu { sharpness } => {
                h.write_u64(4);
                h.write_u64(u64::from(sharpness.get()));
            }
        }
        h.write_u64(u64::from(self.final_activation));
        for layer in &self.layers {
            h.write_u64(layer.weights.rows() as u64);
            h.write_u64(layer.weights.cols() as u64);
            for v in layer.weights.as_slice().iter().chain(&layer.bias) {
                h.write_f64(*v);
            }
        }
        h.finish()
    }
}

/// Reusable forward-evaluation buffers for one network.
pub struct Evaluator<'a> {
    net: &'a Network,
    front: Vec<f64>,
    back: Vec<f64>,
}

impl Evaluator<'_> {
    pub fn eval(&mut self, x: &[f64]) -> Result<&[f64]> {
        let net = self.net;
        if x.len() != net.input_dim {
            return Err(Error::DimensionMismatch {
                expected: net.input_dim,
                got: x.len(),
            });
        }
        self.front[..x.len()].copy_from_slice(x);
        let mut width = x.len();
        for (i, layer) in net.layers.iter().enumerate() {
            let out = layer.output_dim();
            layer.affine_into(&self.front[..width], &mut self.back[..out]);
            if net.activates(i) {
                for v in &mut self.back[..out] {
                    *v = net.activation.apply(*v);
                }
            }
            core::mem::swap(&mut self.front, &mut self.back);
            width = out;
        }
        Ok(&self.front[..width])
    }

    /// First output coordinate.
    pub fn eval_scalar(&mut self, x: &[f64]) -> Result<f64> {
        self.eval(x).map(|y| y[0])
    }
}

/// A map between Euclidean spaces, used where compositions of arbitrary
/// continuous pieces are analyzed.
pub trait VectorMap {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
}

impl VectorMap for Network {
    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn output_dim(&self) -> usize {
        Network::output_dim(self)
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.forward(x).expect("input dimension checked by caller")
    }
}
