//! Level-set topology of functions defined by feed-forward networks.
//!
//! Networks whose hidden layers are no wider than their input can only
//! produce scalar functions whose level sets have unbounded path components;
//! one extra neuron is enough to close a level set into a bounded loop. This
//! crate builds both kinds of network, trains them, extracts their level sets
//! on finite windows, and checks the resulting topology.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

mod error;
mod hash;
pub mod linalg;
pub mod nn;
pub mod nonsingular;
pub mod training;
pub mod analysis;
pub mod levelsets;
pub mod unionfind;

pub use error::{Error, Result};
