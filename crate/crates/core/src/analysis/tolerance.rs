use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::nn::{VectorMap, Window};
use crate::{Error, Result};

/// Smallest perturbation size tried before giving up.
pub const DELTA_FLOOR: f64 = 1e-12;

/// Bump nodes per axis of a perturbation.
const BUMP_NODES: usize = 5;

/// Upper bound on sample points used to measure deviations.
const SAMPLE_BUDGET: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ToleranceReport {
    /// Largest perturbation size (from `eps / 2` down by halving) for which
    /// every trial stayed within `eps`.
    pub delta: f64,
    /// Largest composite deviation seen over all trials at `delta`.
    pub max_deviation: f64,
    /// False when no trial was run and `delta` is unverified.
    pub tested: bool,
    pub trials: usize,
    pub halvings: usize,
    /// Domain of each link: the input window, then the inflated image boxes.
    pub boxes: Vec<Window>,
}

/// Searches for a `delta` such that replacing every link `f_i` of `chain` by
/// a map within `delta` of it on its domain box keeps the composite within
/// `eps` of the original on `window`.
///
/// Each link's domain box is the bounding box of the sampled image of
/// `window` under the preceding links, inflated by `eps`. Perturbations add
/// multilinear bumps with random `±delta / sqrt(m)` node values to each
/// output coordinate; the first trial uses all `+`, the second all `-`.
pub fn composition_tolerance_check(
    chain: &[&dyn VectorMap],
    window: &Window,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<ToleranceReport> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!("eps must be positive, got {eps}")));
    }
    if chain.is_empty() {
        return Err(Error::InvalidArgument("empty chain".into()));
    }
    if chain[0].input_dim() != window.dim() {
        return Err(Error::DimensionMismatch {
            expected: chain[0].input_dim(),
            got: window.dim(),
        });
    }
    for (i, pair) in chain.windows(2).enumerate() {
        if pair[0].output_dim() != pair[1].input_dim() {
            return Err(Error::BrokenLayerChain {
                layer: i + 1,
                expected: pair[0].output_dim(),
                got: pair[1].input_dim(),
            });
        }
    }

    let res = per_axis(window.dim());
    let samples = window.lattice_points(res);
    let mut boxes = vec![window.clone()];
    let mut image = samples.clone();
    for f in &chain[..chain.len() - 1] {
        image = image.iter().map(|x| f.apply(x)).collect();
        boxes.push(inflated_bounds(&image, eps)?);
    }
    let exact: Vec<Vec<f64>> = samples.iter().map(|x| compose(chain, x, |_, _, y| y)).collect();

    let mut delta = eps / 2.0;
    let mut halvings = 0;
    loop {
        let mut max_dev: f64 = 0.0;
        let mut ok = true;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in 0..trials {
            let bumps: Vec<Bump> = chain
                .iter()
                .zip(&boxes)
                .map(|(f, b)| Bump::draw(b, f.output_dim(), delta, t, &mut rng))
                .collect();
            for (x, want) in samples.iter().zip(&exact) {
                let got = compose(chain, x, |i, input, mut y| {
                    bumps[i].add_to(input, &mut y);
                    y
                });
                let d = distance(&got, want);
                max_dev = if d.is_nan() { f64::INFINITY } else { max_dev.max(d) };
            }
            if !(max_dev < eps) {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(ToleranceReport {
                delta,
                max_deviation: max_dev,
                tested: trials > 0,
                trials,
                halvings,
                boxes,
            });
        }
        delta /= 2.0;
        halvings += 1;
        if delta < DELTA_FLOOR {
            return Err(Error::DeltaUnderflow { floor: DELTA_FLOOR });
        }
    }
}

/// Bounding box of `points` grown by `eps`, valid even when the points are
/// flat along some axis.
fn inflated_bounds(points: &[Vec<f64>], eps: f64) -> Result<Window> {
    let dim = points[0].len();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in points {
        for (a, &v) in p.iter().enumerate() {
            lo[a] = lo[a].min(v);
            hi[a] = hi[a].max(v);
        }
    }
    Window::new(
        lo.into_iter().map(|v| v - eps).collect(),
        hi.into_iter().map(|v| v + eps).collect(),
    )
}

fn per_axis(dim: usize) -> usize {
    let mut r = 2;
    while (r + 1usize).checked_pow(dim as u32).is_some_and(|n| n <= SAMPLE_BUDGET) {
        r += 1;
    }
    r
}

fn compose(
    chain: &[&dyn VectorMap],
    x: &[f64],
    mut post: impl FnMut(usize, &[f64], Vec<f64>) -> Vec<f64>,
) -> Vec<f64> {
    let mut cur = x.to_vec();
    for (i, f) in chain.iter().enumerate() {
        let y = f.apply(&cur);
        cur = post(i, &cur, y);
    }
    cur
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Multilinear interpolation of node values on a regular grid over a box,
/// constant outside it. Every node value has magnitude `delta / sqrt(m)`, so
/// the added vector never exceeds `delta` in length.
struct Bump {
    window: Window,
    /// `values[node * m + k]`, node index with axis 0 fastest.
    values: Vec<f64>,
    m: usize,
}

impl Bump {
    fn draw(window: &Window, m: usize, delta: f64, trial: usize, rng: &mut impl Rng) -> Bump {
        let nodes = BUMP_NODES.pow(window.dim() as u32);
        let a = delta / libm::sqrt(m as f64);
        let values = (0..nodes * m)
            .map(|_| match trial {
                0 => a,
                1 => -a,
                _ if rng.random::<bool>() => a,
                _ => -a,
            })
            .collect();
        Bump {
            window: window.clone(),
            values,
            m,
        }
    }

    fn add_to(&self, x: &[f64], y: &mut [f64]) {
        let dim = x.len();
        let last = (BUMP_NODES - 1) as f64;
        // per axis: lower node index and weight of the upper node
        let cell: Vec<(usize, f64)> = (0..dim)
            .map(|a| {
                let t = (x[a] - self.window.lo()[a]) / self.window.extent(a) * last;
                let t = t.clamp(0.0, last);
                let i = (libm::floor(t) as usize).min(BUMP_NODES - 2);
                (i, t - i as f64)
            })
            .collect();
        for corner in 0..1usize << dim {
            let mut w = 1.0;
            let mut node = 0;
            let mut stride = 1;
            for (a, &(i, f)) in cell.iter().enumerate() {
                let up = corner >> a & 1 == 1;
                w *= if up { f } else { 1.0 - f };
                node += (i + up as usize) * stride;
                stride *= BUMP_NODES;
            }
            if w == 0.0 {
                continue;
            }
            for (k, yk) in y.iter_mut().enumerate().take(self.m) {
                *yk += w * self.values[node * self.m + k];
            }
        }
    }
}
