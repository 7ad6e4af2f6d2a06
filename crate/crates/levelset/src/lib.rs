//! File formats, SVG plots, parallel experiment runs and reports on top of
//! `levelset-core`. The `levelset` binary is a thin command-line layer over
//! this crate.

mod error;

pub mod config;
pub mod data;
pub mod model;
pub mod report;
pub mod run;
pub mod svg;

pub use error::{Error, Result};
pub use levelset_core as core;
