//! Feed-forward networks, activations and the trunk/head split.

mod activation;
mod network;
mod window;

pub use activation::{uniform_deviation, Activation};
pub use network::{Evaluator, Layer, Matrix, Network, VectorMap};
pub use window::Window;
