//! Construction of non-singular networks: uniform hidden width `n`, a
//! one-to-one activation, and invertible square weight matrices in the trunk.
//! The trunk of such a network is injective, which forces every level set of
//! the scalar output to be unbounded or empty.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::row_scaled_determinant;
use crate::nn::{Layer, Matrix, Network, Window};
use crate::{Error, Result};

/// Minimum row-scaled determinant magnitude of a non-singular layer.
pub const TOL_DET: f64 = 1e-9;

/// Perturbation retries per singular layer in [`make_nonsingular`].
pub const MAX_ATTEMPTS: usize = 64;

/// Quantization cell width of the injectivity witness.
pub const INJECTIVITY_QUANTUM: f64 = 1e-12;

/// Default grid resolution per axis for [`check_injective_on_grid`].
pub const DEFAULT_INJECTIVITY_RESOLUTION: usize = 201;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NonSingularityReport {
    /// `|det|` of each square trunk matrix (row-scaled), in layer order.
    pub determinants: Vec<f64>,
    pub activation_one_to_one: bool,
    pub widths_uniform: bool,
    /// The output layer is all zeros, so the function is constant.
    pub degenerate_head: bool,
    pub verdict: bool,
    pub tolerance_used: f64,
}

/// Widens every hidden layer to exactly `n` neurons. Added neurons have zero
/// incoming weights, zero bias and zero outgoing weights, and are appended
/// after the existing ones, so every forward value is reproduced bit for bit.
pub fn pad_to_width(net: &Network, n: usize) -> Result<Network> {
    if net.input_dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: net.input_dim(),
        });
    }
    for (layer, &width) in net.hidden_widths().iter().enumerate() {
        if width > n {
            return Err(Error::WidthExceeded {
                layer,
                width,
                max: n,
            });
        }
    }
    let last = net.layers().len() - 1;
    let layers = net
        .layers()
        .iter()
        .enumerate()
        .map(|(i, layer)| {
            let rows = if i == last { layer.output_dim() } else { n };
            let mut bias = layer.bias.clone();
            bias.resize(rows, 0.0);
            Layer {
                weights: layer.weights.padded(rows, n),
                bias,
            }
        })
        .collect();
    Network::new(n, layers, net.activation(), net.final_activation())
}

fn trunk_layers(net: &Network) -> &[Layer] {
    let k = net.layers().len();
    &net.layers()[..k - 1]
}

fn is_uniform(net: &Network) -> bool {
    net.hidden_widths().iter().all(|&w| w == net.input_dim())
}

pub fn is_nonsingular(net: &Network, tol: f64) -> NonSingularityReport {
    let widths_uniform = is_uniform(net);
    let determinants: Vec<f64> = trunk_layers(net)
        .iter()
        .filter(|l| l.weights.is_square())
        .map(|l| row_scaled_determinant(&l.weights).abs())
        .collect();
    let activation_one_to_one = net.activation().is_one_to_one();
    let head = &net.layers()[net.layers().len() - 1];
    let degenerate_head = head.weights.as_slice().iter().all(|&w| w == 0.0);
    let verdict =
        widths_uniform && activation_one_to_one && determinants.iter().all(|&d| d >= tol);
    NonSingularityReport {
        determinants,
        activation_one_to_one,
        widths_uniform,
        degenerate_head,
        verdict,
        tolerance_used: tol,
    }
}

/// Replaces every singular trunk matrix `W` by `W + delta * R`, with `R`
/// uniform in `[-1, 1]` entrywise, retrying up to [`MAX_ATTEMPTS`] times per
/// layer. Layers that already pass [`TOL_DET`] are left untouched.
pub fn make_nonsingular(net: &Network, delta: f64, seed: u64) -> Result<Network> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "perturbation size must be positive, got {delta}"
        )));
    }
    if !is_uniform(net) {
        return Err(Error::NonUniformWidth);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = net.clone();
    let k = out.layers().len();
    for (i, layer) in out.layers_mut()[..k - 1].iter_mut().enumerate() {
        if row_scaled_determinant(&layer.weights).abs() >= TOL_DET {
            continue;
        }
        let mut fixed = None;
        for _ in 0..MAX_ATTEMPTS {
            let mut candidate = layer.weights.clone();
            for w in candidate.as_mut_slice() {
                *w += delta * rng.random_range(-1.0..=1.0);
            }
            if row_scaled_determinant(&candidate).abs() >= TOL_DET {
                fixed = Some(candidate);
                break;
            }
        }
        match fixed {
            Some(w) => layer.weights = w,
            None => {
                return Err(Error::PerturbationFailed {
                    layer: i,
                    attempts: MAX_ATTEMPTS,
                })
            }
        }
    }
    Ok(out)
}

/// Grid-scale witness that `trunk` is injective on `window`.
///
/// Two distinct lattice points `a`, `b` collide when
/// `|g(a) - g(b)| < min_sep * |a - b| / diag(window)`. Outputs are bucketed
/// on a cubic lattice of width `max(min_sep, INJECTIVITY_QUANTUM)`, so only
/// points in the same or adjacent buckets need to be compared. Returns
/// `false` on the first collision or on a non-finite output.
pub fn check_injective_on_grid(
    trunk: &Network,
    window: &Window,
    resolution: usize,
    min_sep: f64,
) -> Result<bool> {
    if trunk.input_dim() != window.dim() {
        return Err(Error::DimensionMismatch {
            expected: window.dim(),
            got: trunk.input_dim(),
        });
    }
    if resolution < 2 || !(min_sep > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need resolution >= 2 and min_sep > 0, got {resolution} and {min_sep}"
        )));
    }
    let inputs = window.lattice_points(resolution);
    let mut eval = trunk.evaluator();
    let mut outputs = Vec::with_capacity(inputs.len());
    for x in &inputs {
        let y = eval.eval(x)?;
        if y.iter().any(|v| !v.is_finite()) {
            return Ok(false);
        }
        outputs.push(y.to_vec());
    }

    let cell = min_sep.max(INJECTIVITY_QUANTUM);
    let key = |y: &[f64]| -> Vec<i64> { y.iter().map(|v| libm::floor(v / cell) as i64).collect() };
    let mut buckets: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (i, y) in outputs.iter().enumerate() {
        buckets.entry(key(y)).or_default().push(i);
    }

    let diag = window.diagonal();
    let out_dim = trunk.output_dim();
    let offsets = neighbor_offsets(out_dim);
    let mut probe = vec![0i64; out_dim];
    for (i, y) in outputs.iter().enumerate() {
        let base = key(y);
        for off in &offsets {
            for d in 0..out_dim {
                probe[d] = base[d].saturating_add(off[d]);
            }
            let Some(bucket) = buckets.get(&probe) else {
                continue;
            };
            for &j in bucket.iter().filter(|&&j| j > i) {
                let d_out = dist(y, &outputs[j]);
                let d_in = dist(&inputs[i], &inputs[j]);
                if d_out < min_sep * d_in / diag {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

fn neighbor_offsets(dim: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                [-1i64, 0, 1].into_iter().map(move |d| {
                    let mut p = prefix.clone();
                    p.push(d);
                    p
                })
            })
            .collect();
    }
    out
}

/// Builds a random network of the given hidden widths with uniform weights in
/// `[-scale, scale]` and biases in `[-1, 1]`.
pub fn random_network(
    input_dim: usize,
    hidden: &[usize],
    activation: crate::nn::Activation,
    final_activation: bool,
    scale: f64,
    rng: &mut impl Rng,
) -> Result<Network> {
    let mut widths = vec![input_dim];
    widths.extend_from_slice(hidden);
    widths.push(1);
    let layers = widths
        .windows(2)
        .map(|w| {
            let data = (0..w[0] * w[1])
                .map(|_| rng.random_range(-scale..=scale))
                .collect();
            let bias = (0..w[1]).map(|_| rng.random_range(-1.0..=1.0)).collect();
            Layer::new(Matrix::from_row_major(w[1], w[0], data)?, bias)
        })
        .collect::<Result<Vec<_>>>()?;
    Network::new(input_dim, layers, activation, final_activation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Activation;

    fn net_from(layers: Vec<(Vec<Vec<f64>>, Vec<f64>)>, act: Activation) -> Network {
        let input = layers[0].0[0].len();
        let layers = layers
            .into_iter()
            .map(|(w, b)| Layer::new(Matrix::from_rows(&w).unwrap(), b).unwrap())
            .collect();
        Network::new(input, layers, act, false).unwrap()
    }

    #[test]
    fn padding_narrow_layers_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let net = random_network(2, &[1, 2, 1], Activation::Sigmoid, true, 1.5, &mut rng).unwrap();
        let padded = pad_to_width(&net, 2).unwrap();
        assert_eq!(padded.hidden_widths(), vec![2, 2, 2]);
        for _ in 0..1000 {
            let x = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
            let a = net.forward(&x).unwrap()[0];
            let b = padded.forward(&x).unwrap()[0];
            assert_eq!(a.to_bits(), b.to_bits());
        }
        let report = is_nonsingular(&padded, TOL_DET);
        assert!(report.widths_uniform);
        assert_eq!(report.determinants[0], 0.0);
        assert!(!report.verdict);
    }

    #[test]
    fn padding_uniform_net_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let net = random_network(2, &[2, 2], Activation::Tanh, false, 1.0, &mut rng).unwrap();
        assert_eq!(pad_to_width(&net, 2).unwrap(), net);
    }

    #[test]
    fn padding_rejects_wide_layers() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let net = random_network(2, &[3], Activation::Tanh, false, 1.0, &mut rng).unwrap();
        assert_eq!(
            pad_to_width(&net, 2),
            Err(Error::WidthExceeded {
                layer: 0,
                width: 3,
                max: 2
            })
        );
    }

    #[test]
    fn identity_layers_are_nonsingular() {
        let net = net_from(
            vec![
                (vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0]),
                (vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0]),
                (vec![vec![1.0, 1.0]], vec![0.0]),
            ],
            Activation::Sigmoid,
        );
        let r = is_nonsingular(&net, TOL_DET);
        assert!(r.verdict);
        assert_eq!(r.determinants, vec![1.0, 1.0]);
        assert!(!r.degenerate_head);
        assert!(!is_nonsingular(&net.with_activation(Activation::Relu), TOL_DET).verdict);
    }

    #[test]
    fn duplicated_and_near_duplicated_rows() {
        let dup = net_from(
            vec![
                (vec![vec![1.0, 2.0], vec![1.0, 2.0]], vec![0.0, 0.0]),
                (vec![vec![1.0, 1.0]], vec![0.0]),
            ],
            Activation::Sigmoid,
        );
        let r = is_nonsingular(&dup, TOL_DET);
        assert_eq!(r.determinants, vec![0.0]);
        assert!(!r.verdict);

        let near = net_from(
            vec![
                (vec![vec![1.0, 1.0], vec![1.0, 1.0 + 1e-14]], vec![0.0, 0.0]),
                (vec![vec![1.0, 1.0]], vec![0.0]),
            ],
            Activation::Sigmoid,
        );
        assert!(!is_nonsingular(&near, 1e-9).verdict);
    }

    #[test]
    fn zero_head_is_flagged() {
        let net = net_from(
            vec![
                (vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0]),
                (vec![vec![0.0, 0.0]], vec![0.3]),
            ],
            Activation::Tanh,
        );
        let r = is_nonsingular(&net, TOL_DET);
        assert!(r.degenerate_head && r.verdict);
    }

    #[test]
    fn perturbing_a_zero_matrix() {
        let net = net_from(
            vec![
                (vec![vec![0.0, 0.0], vec![0.0, 0.0]], vec![0.0, 0.0]),
                (vec![vec![1.0, -1.0]], vec![0.0]),
            ],
            Activation::Sigmoid,
        );
        let fixed = make_nonsingular(&net, 1e-3, 11).unwrap();
        let w = &fixed.layers()[0].weights;
        assert!(w.as_slice().iter().all(|v| v.abs() <= 1e-3));
        assert!(is_nonsingular(&fixed, TOL_DET).verdict);
        assert_eq!(fixed.layers()[1], net.layers()[1]);
        assert_eq!(make_nonsingular(&net, 1e-3, 11).unwrap(), fixed);
    }

    #[test]
    fn nonsingular_nets_are_untouched() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let net = random_network(2, &[2, 2, 2], Activation::Sigmoid, true, 1.0, &mut rng).unwrap();
        assert!(is_nonsingular(&net, TOL_DET).verdict);
        assert_eq!(make_nonsingular(&net, 0.1, 0).unwrap(), net);
    }

    #[test]
    fn perturbation_requires_uniform_width() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let net = random_network(2, &[1], Activation::Sigmoid, true, 1.0, &mut rng).unwrap();
        assert_eq!(make_nonsingular(&net, 0.1, 0), Err(Error::NonUniformWidth));
        assert!(make_nonsingular(&net, 0.0, 0).is_err());
    }

    #[test]
    fn perturbation_deviation_shrinks_with_delta() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let narrow = random_network(2, &[1, 2, 1], Activation::Sigmoid, true, 1.5, &mut rng).unwrap();
        let padded = pad_to_width(&narrow, 2).unwrap();
        let points: Vec<[f64; 2]> = (0..1000)
            .map(|_| [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)])
            .collect();
        let max_dev = |delta: f64| {
            let p = make_nonsingular(&padded, delta, 99).unwrap();
            points
                .iter()
                .map(|x| (p.eval_scalar(x).unwrap() - narrow.eval_scalar(x).unwrap()).abs())
                .fold(0.0, f64::max)
        };
        let (coarse, fine) = (max_dev(1e-2), max_dev(1e-4));
        assert!(fine < coarse, "{fine} !< {coarse}");
    }

    #[test]
    fn injectivity_witness() {
        let window = Window::cube(2, -3.0, 3.0).unwrap();
        let identity = net_from(
            vec![(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0])],
            Activation::Sigmoid,
        )
        .with_final_activation(false);
        assert!(check_injective_on_grid(&identity, &window, 51, 1.0).unwrap());
        assert!(check_injective_on_grid(&identity, &window, 51, INJECTIVITY_QUANTUM).unwrap());

        let constant = net_from(
            vec![(vec![vec![0.0, 0.0], vec![0.0, 0.0]], vec![0.2, 0.1])],
            Activation::Sigmoid,
        );
        assert!(!check_injective_on_grid(&constant, &window, 51, INJECTIVITY_QUANTUM).unwrap());

        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let net = random_network(2, &[2, 2], Activation::Sigmoid, true, 1.5, &mut rng).unwrap();
        let net = make_nonsingular(&net, 1e-3, 1).unwrap();
        assert!(is_nonsingular(&net, TOL_DET).verdict);
        let (trunk, _) = net.decompose().unwrap();
        assert!(check_injective_on_grid(&trunk, &window, 101, INJECTIVITY_QUANTUM).unwrap());
    }
}
