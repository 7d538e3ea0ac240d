//! Reconstruction of noiseless qubit states from noisy Bloch vectors.
//!
//! The crate is `no_std` (with `alloc`). It covers the quantum side (states,
//! fidelities, Kraus channels, random state ensembles), a small dense neural
//! network trained with Adam, and the training/evaluation pipelines built on
//! top. File formats and the command line live in the `qrecon` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channels;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod nn;
pub mod qstate;
pub mod sampling;

pub use error::{Error, Result};
