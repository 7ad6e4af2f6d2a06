use alloc::vec::Vec;

use crate::nn::Window;
use crate::{Error, Result};

/// Grid surrogate for "`f` is within `eps` of `g` everywhere on `window`":
/// true iff `|f(x) - g(x)| < eps` at every point of the `resolution^dim`
/// lattice, with `|.|` the Euclidean norm of the output difference.
pub fn eps_a_approximates(
    f: impl Fn(&[f64]) -> Vec<f64>,
    g: impl Fn(&[f64]) -> Vec<f64>,
    window: &Window,
    resolution: usize,
    eps: f64,
) -> Result<bool> {
    if resolution < 2 || !(eps > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "need resolution >= 2 and eps > 0, got {resolution} and {eps}"
        )));
    }
    Ok(max_deviation(f, g, window, resolution)? < eps)
}

/// Largest output distance between `f` and `g` over the lattice.
pub fn max_deviation(
    f: impl Fn(&[f64]) -> Vec<f64>,
    g: impl Fn(&[f64]) -> Vec<f64>,
    window: &Window,
    resolution: usize,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in window.lattice_points(resolution) {
        let (a, b) = (f(&x), g(&x));
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                got: b.len(),
            });
        }
        let d = libm::sqrt(a.iter().zip(&b).map(|(u, v)| (u - v) * (u - v)).sum());
        if d.is_nan() {
            return Ok(f64::INFINITY);
        }
        worst = worst.max(d);
    }
    Ok(worst)
}
