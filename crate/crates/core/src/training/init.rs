use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::nn::{Activation, Layer, Matrix, Network};
use crate::{Error, Result};

/// Network with widths `arch = [n_0, ..., n_k]`, weights uniform in
/// `[-s, s]` with `s = sqrt(6 / (fan_in + fan_out))`, zero biases and an
/// activated output.
pub fn init_weights(arch: &[usize], activation: Activation, seed: u64) -> Result<Network> {
    if arch.len() < 2 || arch.contains(&0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "architecture {arch:?} needs at least two positive widths"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = arch
        .windows(2)
        .map(|w| {
            let (fan_in, fan_out) = (w[0], w[1]);
            let s = libm::sqrt(6.0 / (fan_in + fan_out) as f64);
            let data: Vec<f64> = (0..fan_in * fan_out)
                .map(|_| rng.random_range(-s..=s))
                .collect();
            Layer::new(Matrix::from_row_major(fan_out, fan_in, data)?, vec![0.0; fan_out])
        })
        .collect::<Result<Vec<_>>>()?;
    Network::new(arch[0], layers, activation, true)
}
