use alloc::vec;
use alloc::vec::Vec;

use crate::nn::{Activation, Layer, Matrix, Network};
use crate::{Error, Result};

/// Training objective for a scalar-output network against 0/1 labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Loss {
    /// Binary cross-entropy of a sigmoid output, evaluated from the logit.
    Bce,
    /// Squared error `(f(x) - y)^2`.
    Mse,
}

/// Per-layer gradients, shaped like the network they belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Layer>,
}

impl Gradients {
    pub fn zeros_like(net: &Network) -> Self {
        Gradients {
            layers: net
                .layers()
                .iter()
                .map(|l| Layer {
                    weights: Matrix::zeros(l.output_dim(), l.input_dim()),
                    bias: vec![0.0; l.output_dim()],
                })
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.layers
            .iter()
            .flat_map(|l| l.weights.as_slice().iter().chain(&l.bias).copied())
    }

    pub(crate) fn iter_mut(&mut self) -> impl Iterator<Item = &mut f64> + '_ {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.as_mut_slice().iter_mut().chain(l.bias.iter_mut()))
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, g| m.max(g.abs()))
    }
}

pub(crate) fn check_objective(net: &Network, loss: Loss) -> Result<()> {
    if net.output_dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: net.output_dim(),
        });
    }
    if loss == Loss::Bce && !(net.activation() == Activation::Sigmoid && net.final_activation()) {
        return Err(Error::BceRequiresSigmoid);
    }
    Ok(())
}

/// `softplus(z) - y z`, the cross-entropy of `sigmoid(z)` against `y`.
#[inline]
fn bce_from_logit(z: f64, y: f64) -> f64 {
    z.max(0.0) + libm::log1p(libm::exp(-z.abs())) - y * z
}

/// Reusable buffers for batch-major reverse-mode passes. Row `s` of each
/// buffer holds sample `s`; `post[i]` is the input of layer `i` and
/// `pre[i]` its affine output.
pub(crate) struct Backprop {
    widths: Vec<usize>,
    pre: Vec<Vec<f64>>,
    post: Vec<Vec<f64>>,
    targets: Vec<f64>,
    delta: Vec<f64>,
    delta_prev: Vec<f64>,
}

impl Backprop {
    pub(crate) fn new(net: &Network) -> Self {
        Backprop {
            widths: net.widths(),
            pre: Vec::new(),
            post: Vec::new(),
            targets: Vec::new(),
            delta: Vec::new(),
            delta_prev: Vec::new(),
        }
    }

    fn load<'a>(&mut self, batch: impl ExactSizeIterator<Item = (&'a [f64], u8)>) -> usize {
        let m = batch.len();
        let w = &self.widths;
        let max_w = w.iter().copied().max().unwrap_or(1);
        if self.post.len() != w.len() || self.targets.len() != m {
            self.post = w.iter().map(|&n| vec![0.0; n * m]).collect();
            self.pre = w[1..].iter().map(|&n| vec![0.0; n * m]).collect();
            self.targets = vec![0.0; m];
            self.delta = vec![0.0; max_w * m];
            self.delta_prev = vec![0.0; max_w * m];
        }
        let n0 = w[0];
        for (s, (x, y)) in batch.enumerate() {
            self.post[0][s * n0..(s + 1) * n0].copy_from_slice(x);
            self.targets[s] = f64::from(y);
        }
        m
    }

    fn forward(&mut self, net: &Network, m: usize) {
        let act = net.activation();
        for (i, layer) in net.layers().iter().enumerate() {
            let (n_in, n_out) = (layer.input_dim(), layer.output_dim());
            let (before, after) = self.post.split_at_mut(i + 1);
            let input = &before[i];
            let pre = &mut self.pre[i];
            for s in 0..m {
                layer.affine_into(&input[s * n_in..(s + 1) * n_in], &mut pre[s * n_out..(s + 1) * n_out]);
            }
            let out = &mut after[0][..m * n_out];
            if net.activates(i) {
                act.apply_slice(&pre[..m * n_out], out);
            } else {
                out.copy_from_slice(&pre[..m * n_out]);
            }
        }
    }

    fn losses(&self, net: &Network, m: usize, loss: Loss) -> f64 {
        let k = net.layers().len();
        let (z, a) = (&self.pre[k - 1], &self.post[k]);
        let mut total = 0.0;
        for s in 0..m {
            let y = self.targets[s];
            total += match loss {
                Loss::Bce => bce_from_logit(z[s], y),
                Loss::Mse => {
                    let e = a[s] - y;
                    e * e
                }
            };
        }
        total
    }

    /// Mean loss and gradient over the samples in `batch`.
    pub(crate) fn batch<'a>(
        &mut self,
        net: &Network,
        batch: impl ExactSizeIterator<Item = (&'a [f64], u8)>,
        loss: Loss,
        grads: &mut Gradients,
    ) -> f64 {
        let m = self.load(batch);
        self.forward(net, m);
        let scale = 1.0 / m as f64;
        let value = self.losses(net, m, loss) * scale;

        let k = net.layers().len();
        let act = net.activation();
        let (z, a) = (&self.pre[k - 1], &self.post[k]);
        for s in 0..m {
            let y = self.targets[s];
            let dz = match loss {
                Loss::Bce => a[s] - y,
                Loss::Mse => {
                    let d_out = 2.0 * (a[s] - y);
                    if net.activates(k - 1) {
                        d_out * act.derivative_from_output(z[s], a[s])
                    } else {
                        d_out
                    }
                }
            };
            self.delta[s] = dz * scale;
        }

        for i in (0..k).rev() {
            let layer = &net.layers()[i];
            let (rows, cols) = (layer.output_dim(), layer.input_dim());
            let g = &mut grads.layers[i];
            g.bias.iter_mut().for_each(|b| *b = 0.0);
            g.weights.as_mut_slice().iter_mut().for_each(|w| *w = 0.0);
            let input = &self.post[i];
            let gw = g.weights.as_mut_slice();
            for s in 0..m {
                let d = &self.delta[s * rows..(s + 1) * rows];
                let x = &input[s * cols..(s + 1) * cols];
                for r in 0..rows {
                    g.bias[r] += d[r];
                    let grow = &mut gw[r * cols..(r + 1) * cols];
                    for (gv, &xv) in grow.iter_mut().zip(x) {
                        *gv += d[r] * xv;
                    }
                }
            }
            if i == 0 {
                break;
            }
            let w = layer.weights.as_slice();
            // layer i-1 is hidden, so it is always activated
            let pre = &self.pre[i - 1];
            for s in 0..m {
                let d = &self.delta[s * rows..(s + 1) * rows];
                for c in 0..cols {
                    let mut acc = 0.0;
                    for r in 0..rows {
                        acc += w[r * cols + c] * d[r];
                    }
                    let idx = s * cols + c;
                    self.delta_prev[idx] = acc * act.derivative_from_output(pre[idx], input[idx]);
                }
            }
            core::mem::swap(&mut self.delta, &mut self.delta_prev);
        }
        value
    }

    pub(crate) fn mean_loss<'a>(
        &mut self,
        net: &Network,
        batch: impl ExactSizeIterator<Item = (&'a [f64], u8)>,
        loss: Loss,
    ) -> f64 {
        let m = self.load(batch);
        self.forward(net, m);
        self.losses(net, m, loss) / m as f64
    }
}

fn check_batch(net: &Network, points: &[Vec<f64>], labels: &[u8]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty batch".into()));
    }
    if points.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            got: labels.len(),
        });
    }
    if let Some(p) = points.iter().find(|p| p.len() != net.input_dim()) {
        return Err(Error::DimensionMismatch {
            expected: net.input_dim(),
            got: p.len(),
        });
    }
    Ok(())
}

/// Mean loss over the batch and its exact gradient with respect to every
/// weight and bias.
pub fn loss_and_grad(
    net: &Network,
    points: &[Vec<f64>],
    labels: &[u8],
    loss: Loss,
) -> Result<(f64, Gradients)> {
    check_objective(net, loss)?;
    check_batch(net, points, labels)?;
    let mut grads = Gradients::zeros_like(net);
    let value = Backprop::new(net).batch(
        net,
        points.iter().map(Vec::as_slice).zip(labels.iter().copied()),
        loss,
        &mut grads,
    );
    Ok((value, grads))
}

/// Mean loss only.
pub fn mean_loss(net: &Network, points: &[Vec<f64>], labels: &[u8], loss: Loss) -> Result<f64> {
    check_objective(net, loss)?;
    check_batch(net, points, labels)?;
    Ok(Backprop::new(net).mean_loss(
        net,
        points.iter().map(Vec::as_slice).zip(labels.iter().copied()),
        loss,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Layer;
    use crate::nonsingular::random_network;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn zero_net(widths: &[usize]) -> Network {
        let layers = widths
            .windows(2)
            .map(|w| Layer::new(Matrix::zeros(w[1], w[0]), vec![0.0; w[1]]).unwrap())
            .collect();
        Network::new(widths[0], layers, Activation::Sigmoid, true).unwrap()
    }

    #[test]
    fn zero_net_bce_is_ln2() {
        let net = zero_net(&[2, 3, 1]);
        let pts = vec![vec![1.0, 2.0], vec![-1.0, 0.5], vec![0.3, 0.3], vec![4.0, -2.0]];
        let (l, _) = loss_and_grad(&net, &pts, &[0, 1, 0, 1], Loss::Bce).unwrap();
        assert!((l - core::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn perfect_constant_fit_has_zero_mse() {
        // Output layer bias 1 with no final activation predicts 1 everywhere.
        let mut net = zero_net(&[2, 2, 1]).with_final_activation(false);
        net.layers_mut()[1].bias[0] = 1.0;
        let pts = vec![vec![1.0, 2.0], vec![-3.0, 0.5]];
        let (l, g) = loss_and_grad(&net, &pts, &[1, 1], Loss::Mse).unwrap();
        assert_eq!(l, 0.0);
        assert_eq!(g.max_abs(), 0.0);
    }

    #[test]
    fn bce_needs_sigmoid_output() {
        let net = zero_net(&[2, 1]).with_activation(Activation::Tanh);
        let r = loss_and_grad(&net, &[vec![0.0, 0.0]], &[0], Loss::Bce);
        assert_eq!(r.unwrap_err(), Error::BceRequiresSigmoid);
        let r = loss_and_grad(&net.with_activation(Activation::Sigmoid).with_final_activation(false), &[vec![0.0, 0.0]], &[0], Loss::Bce);
        assert_eq!(r.unwrap_err(), Error::BceRequiresSigmoid);
    }

    #[test]
    fn matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let net = random_network(2, &[3, 2], Activation::Sigmoid, true, 1.0, &mut rng).unwrap();
        let pts: Vec<Vec<f64>> = (0..6)
            .map(|_| vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
            .collect();
        let labels = [0, 1, 1, 0, 1, 0];
        let (_, grads) = loss_and_grad(&net, &pts, &labels, Loss::Bce).unwrap();
        let h = 1e-5;
        let mut worst = 0.0f64;
        for (li, layer) in net.layers().iter().enumerate() {
            for pi in 0..layer.weights.as_slice().len() + layer.bias.len() {
                let shifted = |d: f64| {
                    let mut n = net.clone();
                    let l = &mut n.layers_mut()[li];
                    let nw = l.weights.as_slice().len();
                    if pi < nw {
                        l.weights.as_mut_slice()[pi] += d;
                    } else {
                        l.bias[pi - nw] += d;
                    }
                    mean_loss(&n, &pts, &labels, Loss::Bce).unwrap()
                };
                let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
                let l = &grads.layers[li];
                let nw = l.weights.as_slice().len();
                let bp = if pi < nw { l.weights.as_slice()[pi] } else { l.bias[pi - nw] };
                worst = worst.max((fd - bp).abs() / fd.abs().max(bp.abs()).max(1e-6));
            }
        }
        assert!(worst < 1e-5, "{worst}");
    }
}
