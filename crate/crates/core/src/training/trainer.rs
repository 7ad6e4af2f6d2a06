use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::backprop::{check_objective, Backprop, Gradients, Loss};
use super::Dataset;
use crate::nn::Network;
use crate::{Error, Result};

/// Datasets up to this size are trained full-batch unless a batch size is set.
pub const FULL_BATCH_LIMIT: usize = 4096;

/// Mini-batch size used above [`FULL_BATCH_LIMIT`] when none is configured.
pub const DEFAULT_MINI_BATCH: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Optimizer {
    Sgd,
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl Optimizer {
    pub const fn adam() -> Self {
        Optimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Init {
    /// Uniform in `[-s, s]`, `s = sqrt(6 / (fan_in + fan_out))`; zero biases.
    UniformScaled,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    pub optimizer: Optimizer,
    pub learning_rate: f64,
    pub steps: usize,
    /// `None` trains full-batch up to [`FULL_BATCH_LIMIT`] points and uses
    /// [`DEFAULT_MINI_BATCH`] above it.
    pub batch_size: Option<usize>,
    pub seed: u64,
    pub loss: Loss,
    pub init: Init,
    /// Training stops as soon as the batch loss reaches this value.
    pub target_loss: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            optimizer: Optimizer::adam(),
            learning_rate: 0.05,
            steps: 5000,
            batch_size: None,
            seed: 0,
            loss: Loss::Bce,
            init: Init::UniformScaled,
            target_loss: 0.05,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self, data_len: usize) -> Result<usize> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidArgument("steps must be at least 1".into()));
        }
        let batch = match self.batch_size {
            Some(b) if b == 0 || b > data_len => {
                return Err(Error::InvalidArgument(alloc::format!(
                    "batch size {b} outside 1..={data_len}"
                )))
            }
            Some(b) => b,
            None if data_len <= FULL_BATCH_LIMIT => data_len,
            None => DEFAULT_MINI_BATCH,
        };
        Ok(batch)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub network: Network,
    /// `(step, batch loss before that step's update)` for every step run.
    pub history: Vec<(usize, f64)>,
    pub stopped_early: bool,
}

impl TrainOutcome {
    pub fn last_loss(&self) -> Option<f64> {
        self.history.last().map(|&(_, l)| l)
    }
}

/// Runs the optimizer from `net` on `data`. Deterministic for a given
/// configuration: mini-batches are drawn from per-epoch shuffles seeded with
/// `cfg.seed`, and the full-batch path uses no randomness at all.
pub fn train(net: &Network, data: &Dataset, cfg: &TrainConfig) -> Result<TrainOutcome> {
    check_objective(net, cfg.loss)?;
    if data.dim() != net.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: net.input_dim(),
            got: data.dim(),
        });
    }
    let batch_size = cfg.validate(data.len())?;

    let mut net = net.clone();
    let mut bp = Backprop::new(&net);
    let mut grads = Gradients::zeros_like(&net);
    let mut m = Gradients::zeros_like(&net);
    let mut v = Gradients::zeros_like(&net);
    let (mut b1t, mut b2t) = (1.0f64, 1.0f64);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut cursor = data.len();
    let full_batch = batch_size == data.len();

    let mut history = Vec::with_capacity(cfg.steps);
    let mut stopped_early = false;
    for step in 0..cfg.steps {
        let loss = if full_batch {
            bp.batch(
                &net,
                data.points()
                    .iter()
                    .map(Vec::as_slice)
                    .zip(data.labels().iter().copied()),
                cfg.loss,
                &mut grads,
            )
        } else {
            if cursor + batch_size > order.len() {
                order.shuffle(&mut rng);
                cursor = 0;
            }
            let idx = &order[cursor..cursor + batch_size];
            cursor += batch_size;
            bp.batch(
                &net,
                idx.iter()
                    .map(|&i| (data.points()[i].as_slice(), data.labels()[i])),
                cfg.loss,
                &mut grads,
            )
        };
        if !loss.is_finite() {
            return Err(Error::Diverged { step, history });
        }
        history.push((step, loss));
        if loss <= cfg.target_loss {
            stopped_early = true;
            break;
        }

        let lr = cfg.learning_rate;
        let params = net
            .layers_mut()
            .iter_mut()
            .flat_map(|l| l.weights.as_mut_slice().iter_mut().chain(l.bias.iter_mut()));
        match cfg.optimizer {
            Optimizer::Sgd => {
                for (p, g) in params.zip(grads.iter()) {
                    *p -= lr * g;
                }
            }
            Optimizer::Adam { beta1, beta2, eps } => {
                b1t *= beta1;
                b2t *= beta2;
                let moments = m.iter_mut().zip(v.iter_mut());
                for ((p, g), (mi, vi)) in params.zip(grads.iter()).zip(moments) {
                    *mi = beta1 * *mi + (1.0 - beta1) * g;
                    *vi = beta2 * *vi + (1.0 - beta2) * g * g;
                    let m_hat = *mi / (1.0 - b1t);
                    let v_hat = *vi / (1.0 - b2t);
                    *p -= lr * m_hat / (libm::sqrt(v_hat) + eps);
                }
            }
        }
    }
    Ok(TrainOutcome {
        network: net,
        history,
        stopped_early,
    })
}

/// Fraction of points whose thresholded output `f(x) >= threshold` agrees
/// with a label of 1.
pub fn accuracy(net: &Network, data: &Dataset, threshold: f64) -> Result<f64> {
    let mut eval = net.evaluator();
    let mut hits = 0usize;
    for (x, &y) in data.points().iter().zip(data.labels()) {
        let positive = eval.eval_scalar(x)? >= threshold;
        if positive == (y == 1) {
            hits += 1;
        }
    }
    Ok(hits as f64 / data.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Activation, Layer, Matrix};
    use crate::training::{gen_ring_dataset, init_weights, DatasetMeta, RingParams};
    use alloc::vec;

    fn small_data() -> Dataset {
        gen_ring_dataset(
            3,
            &RingParams {
                n_inner: 40,
                n_ring: 60,
                ..RingParams::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn zero_steps_rejected() {
        let data = small_data();
        let net = init_weights(&[2, 3, 1], Activation::Sigmoid, 1).unwrap();
        let cfg = TrainConfig {
            steps: 0,
            ..TrainConfig::default()
        };
        assert!(train(&net, &data, &cfg).is_err());
        let cfg = TrainConfig {
            batch_size: Some(1000),
            ..TrainConfig::default()
        };
        assert!(train(&net, &data, &cfg).is_err());
    }

    #[test]
    fn one_step_moves_the_weights() {
        let data = small_data();
        let net = init_weights(&[2, 3, 1], Activation::Sigmoid, 1).unwrap();
        let cfg = TrainConfig {
            steps: 1,
            ..TrainConfig::default()
        };
        let out = train(&net, &data, &cfg).unwrap();
        assert_eq!(out.history.len(), 1);
        assert_ne!(out.network, net);
    }

    #[test]
    fn deterministic_in_both_batch_modes() {
        let data = small_data();
        let net = init_weights(&[2, 3, 1], Activation::Sigmoid, 4).unwrap();
        for batch_size in [None, Some(16)] {
            let cfg = TrainConfig {
                steps: 200,
                batch_size,
                seed: 9,
                ..TrainConfig::default()
            };
            let a = train(&net, &data, &cfg).unwrap();
            let b = train(&net, &data, &cfg).unwrap();
            assert_eq!(a, b);
            assert!(a.history.iter().all(|(_, l)| l.is_finite()));
            assert_eq!(a.history.len(), 200);
        }
    }

    #[test]
    fn sgd_reduces_loss() {
        let data = small_data();
        let net = init_weights(&[2, 3, 1], Activation::Sigmoid, 4).unwrap();
        let cfg = TrainConfig {
            optimizer: Optimizer::Sgd,
            learning_rate: 0.5,
            steps: 300,
            ..TrainConfig::default()
        };
        let out = train(&net, &data, &cfg).unwrap();
        assert!(out.last_loss().unwrap() < out.history[0].1);
    }

    #[test]
    fn divergence_is_reported() {
        let data = small_data();
        let net = init_weights(&[2, 3, 1], Activation::Relu, 4)
            .unwrap()
            .with_final_activation(false);
        let cfg = TrainConfig {
            optimizer: Optimizer::Sgd,
            learning_rate: 1e200,
            loss: Loss::Mse,
            steps: 50,
            ..TrainConfig::default()
        };
        match train(&net, &data, &cfg) {
            Err(Error::Diverged { history, step }) => {
                assert_eq!(history.len(), step);
                assert!(history.iter().all(|(_, l)| l.is_finite()));
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    fn constant_net(value_logit: f64) -> Network {
        let l = Layer::new(Matrix::zeros(1, 2), vec![value_logit]).unwrap();
        Network::new(2, vec![l], Activation::Sigmoid, true).unwrap()
    }

    #[test]
    fn accuracy_examples() {
        let data = small_data();
        let half = accuracy(&constant_net(0.0), &data, 0.5).unwrap();
        assert_eq!(half, data.positive_fraction());

        let pts = vec![vec![-1.0, 0.0], vec![1.0, 0.0], vec![2.0, 5.0]];
        let labeled = Dataset::new(pts, vec![0, 1, 1], DatasetMeta::default()).unwrap();
        let sep = Network::new(
            2,
            vec![Layer::new(Matrix::from_row_major(1, 2, vec![10.0, 0.0]).unwrap(), vec![0.0]).unwrap()],
            Activation::Sigmoid,
            true,
        )
        .unwrap();
        assert_eq!(accuracy(&sep, &labeled, 0.5).unwrap(), 1.0);
        let flipped = Network::new(
            2,
            vec![Layer::new(Matrix::from_row_major(1, 2, vec![-10.0, 0.0]).unwrap(), vec![0.0]).unwrap()],
            Activation::Sigmoid,
            true,
        )
        .unwrap();
        assert_eq!(accuracy(&flipped, &labeled, 0.5).unwrap(), 0.0);
    }
}
