//! File formats, a parallel sweep runner and the `qrecon` command line on
//! top of [`qrecon_core`].

pub mod config;
pub mod dataset_io;
pub mod error;
pub mod metrics_io;
pub mod model_io;
pub mod sweep;

pub use error::{Error, Result};
pub use qrecon_core as core;
