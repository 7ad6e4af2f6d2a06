//! Backpropagation, optimizers and the synthetic ring dataset.

mod backprop;
mod dataset;
mod init;
mod trainer;

pub use backprop::{loss_and_grad, mean_loss, Gradients, Loss};
pub use dataset::{gen_ring_dataset, Dataset, DatasetMeta, RingParams, RING_GENERATOR};
pub use init::init_weights;
pub use trainer::{
    accuracy, train, Init, Optimizer, TrainConfig, TrainOutcome, DEFAULT_MINI_BATCH,
    FULL_BATCH_LIMIT,
};
