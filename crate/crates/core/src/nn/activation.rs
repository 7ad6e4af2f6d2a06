use core::f64::consts::FRAC_PI_2;
use core::fmt;
use core::num::NonZeroU32;
use core::str::FromStr;

use crate::Error;

/// Elementwise activation function.
///
/// `OneToOneRelu` is the strictly increasing ReLU approximant: the identity
/// for `x >= 0` and `atan(x) / n` for negative inputs. It converges uniformly
/// to `Relu` as the sharpness `n` grows, with a deviation bounded by
/// `pi / (2n)` (approached as `x -> -inf`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Activation {
    Sigmoid,
    Tanh,
    Relu,
    OneToOneRelu { sharpness: NonZeroU32 },
}

impl Activation {
    /// The ReLU approximant with sharpness `n`; `None` for `n == 0`.
    pub fn one_to_one_relu(n: u32) -> Option<Self> {
        NonZeroU32::new(n).map(|sharpness| Activation::OneToOneRelu { sharpness })
    }

    /// Evaluates the activation.
    ///
    /// Sigmoid saturates to exactly `0.0` / `1.0` for `|x|` beyond roughly 37
    /// and 745 respectively; tanh saturates to `±1.0` beyond roughly 19. The
    /// ReLU approximant never saturates but flattens towards `-pi / (2n)`.
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Sigmoid => sigmoid(x),
            Activation::Tanh => libm::tanh(x),
            Activation::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            Activation::OneToOneRelu { sharpness } => {
                if x >= 0.0 {
                    x
                } else {
                    libm::atan(x) / f64::from(sharpness.get())
                }
            }
        }
    }

    /// Derivative at `x`. The kinks of `Relu` and `OneToOneRelu` at zero use
    /// the right derivative, 1.
    #[inline]
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Sigmoid => {
                let s = sigmoid(x);
                s * (1.0 - s)
            }
            Activation::Tanh => {
                let t = libm::tanh(x);
                1.0 - t * t
            }
            Activation::Relu => {
                if x >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::OneToOneRelu { sharpness } => {
                if x >= 0.0 {
                    1.0
                } else {
                    1.0 / (f64::from(sharpness.get()) * (1.0 + x * x))
                }
            }
        }
    }

    /// Derivative at `x` given `y = self.apply(x)`, reusing `y` where the
    /// derivative is a function of the output. Bitwise equal to
    /// [`Activation::derivative`].
    #[inline]
    pub fn derivative_from_output(self, x: f64, y: f64) -> f64 {
        match self {
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Tanh => 1.0 - y * y,
            _ => self.derivative(x),
        }
    }

    /// `out[k] = self.apply(x[k])`.
    pub fn apply_slice(self, x: &[f64], out: &mut [f64]) {
        match self {
            Activation::Sigmoid => {
                for (o, &v) in out.iter_mut().zip(x) {
                    *o = sigmoid(v);
                }
            }
            _ => {
                for (o, &v) in out.iter_mut().zip(x) {
                    *o = self.apply(v);
                }
            }
        }
    }

    /// Whether the function is injective on the real line.
    pub fn is_one_to_one(self) -> bool {
        !matches!(self, Activation::Relu)
    }

    /// True for activations with a non-differentiable point at zero.
    pub fn has_kink(self) -> bool {
        matches!(self, Activation::Relu | Activation::OneToOneRelu { .. })
    }

    /// Supremum of `|self - Relu|` over the real line when `self` is the
    /// ReLU approximant, `pi / (2n)`.
    pub fn relu_deviation_bound(self) -> Option<f64> {
        match self {
            Activation::OneToOneRelu { sharpness } => Some(FRAC_PI_2 / f64::from(sharpness.get())),
            Activation::Relu => Some(0.0),
            _ => None,
        }
    }
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

/// Largest `|a(x) - b(x)|` over `grid_points` evenly spaced samples of
/// `[lo, hi]`, endpoints included.
pub fn uniform_deviation(
    a: Activation,
    b: Activation,
    lo: f64,
    hi: f64,
    grid_points: usize,
) -> crate::Result<f64> {
    if grid_points < 2 {
        return Err(crate::Error::InvalidArgument(alloc::format!(
            "uniform_deviation needs at least 2 grid points, got {grid_points}"
        )));
    }
    if !(lo < hi) {
        return Err(crate::Error::InvalidArgument(alloc::format!(
            "empty interval [{lo}, {hi}]"
        )));
    }
    let last = grid_points - 1;
    let step = (hi - lo) / last as f64;
    let mut worst = 0.0f64;
    for k in 0..grid_points {
        let x = if k == last { hi } else { lo + step * k as f64 };
        worst = worst.max((a.apply(x) - b.apply(x)).abs());
    }
    Ok(worst)
}

/// `sigmoid`, `tanh`, `relu` or `one-to-one-relu:N`.
impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Activation::Sigmoid => f.write_str("sigmoid"),
            Activation::Tanh => f.write_str("tanh"),
            Activation::Relu => f.write_str("relu"),
            Activation::OneToOneRelu { sharpness } => write!(f, "one-to-one-relu:{sharpness}"),
        }
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "sigmoid" => Ok(Activation::Sigmoid),
            "tanh" => Ok(Activation::Tanh),
            "relu" => Ok(Activation::Relu),
            _ => s
                .strip_prefix("one-to-one-relu:")
                .and_then(|n| n.parse().ok())
                .and_then(Activation::one_to_one_relu)
                .ok_or_else(|| Error::InvalidArgument(alloc::format!("unknown activation {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn o2o(n: u32) -> Activation {
        Activation::one_to_one_relu(n).unwrap()
    }

    #[test]
    fn approximant_values() {
        assert_eq!(o2o(1).apply(0.0), 0.0);
        assert_eq!(o2o(5).apply(2.0), 2.0);
        let v = o2o(2).apply(-1.0);
        assert!((v - (-PI / 8.0)).abs() < 1e-15, "{v}");
        assert!((v + 0.392699).abs() < 1e-6);
        assert_eq!(Activation::Sigmoid.apply(0.0), 0.5);
        assert!(Activation::one_to_one_relu(0).is_none());
    }

    #[test]
    fn approximant_negative_and_monotone() {
        let act = o2o(3);
        let mut prev = f64::NEG_INFINITY;
        for k in 0..4001 {
            let x = -20.0 + 0.01 * k as f64;
            let y = act.apply(x);
            if x < 0.0 {
                assert!(y < 0.0);
            }
            assert!(y > prev, "not strictly increasing at {x}");
            prev = y;
        }
    }

    #[test]
    fn deviation_trivial_cases() {
        let d = uniform_deviation(Activation::Relu, Activation::Relu, -10.0, 10.0, 1001).unwrap();
        assert_eq!(d, 0.0);
        let d = uniform_deviation(o2o(10), o2o(10), -3.0, 7.0, 17).unwrap();
        assert_eq!(d, 0.0);
        assert!(uniform_deviation(o2o(1), Activation::Relu, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn deviation_bounded_by_half_pi_over_n() {
        for n in [1u32, 2, 5, 10, 100] {
            let d = uniform_deviation(o2o(n), Activation::Relu, -100.0, 100.0, 10001).unwrap();
            let bound = PI / (2.0 * f64::from(n));
            assert!(d <= bound && d > 0.99 * bound, "n={n}: {d} vs {bound}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for act in [Activation::Sigmoid, Activation::Tanh, o2o(4), Activation::Relu] {
            for x in [-3.1, -0.7, 0.4, 2.5] {
                let fd = (act.apply(x + h) - act.apply(x - h)) / (2.0 * h);
                assert!((fd - act.derivative(x)).abs() < 1e-8, "{act:?} at {x}");
            }
        }
        assert_eq!(o2o(7).derivative(0.0), 1.0);
        assert_eq!(Activation::Relu.derivative(0.0), 1.0);
    }

    #[test]
    fn names_round_trip() {
        for a in [
            Activation::Sigmoid,
            Activation::Tanh,
            Activation::Relu,
            Activation::one_to_one_relu(7).unwrap(),
        ] {
            assert_eq!(alloc::format!("{a}").parse::<Activation>().unwrap(), a);
        }
        assert!("one-to-one-relu:0".parse::<Activation>().is_err());
        assert!("softplus".parse::<Activation>().is_err());
    }
}
