use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("layer {layer} has {got} input columns but the previous layer produces {expected}")]
    BrokenLayerChain {
        layer: usize,
        expected: usize,
        got: usize,
    },

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("decomposition needs at least two layers, network has {layers}")]
    DecomposeUndefined { layers: usize },

    #[error("hidden layer {layer} has width {width}, exceeding the target width {max}")]
    WidthExceeded {
        layer: usize,
        width: usize,
        max: usize,
    },

    #[error("hidden widths are not uniform; pad the network first")]
    NonUniformWidth,

    #[error("layer {layer} is still singular after {attempts} perturbation attempts")]
    PerturbationFailed { layer: usize, attempts: usize },

    #[error("non-finite sample {value} at {point:?}")]
    NonFiniteSample { point: Vec<f64>, value: f64 },

    #[error("ring radius {ring_radius} must exceed 3 * inner sigma ({inner_sigma})")]
    NotSeparable { ring_radius: f64, inner_sigma: f64 },

    #[error("binary cross-entropy requires a sigmoid output activation")]
    BceRequiresSigmoid,

    #[error("training diverged at step {step}")]
    Diverged {
        step: usize,
        /// Every finite `(step, loss)` pair recorded before the divergence.
        history: Vec<(usize, f64)>,
    },

    #[error("network failed the non-singularity check after construction: {0}")]
    ConstructionBug(String),

    #[error("no tolerance found before delta fell below {floor:e}")]
    DeltaUnderflow { floor: f64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
