//! Stochastic derivative estimators for expectations of discontinuous sample performances,
//! built on the Leibniz integral and divergence rules, with the distributions, benchmark models
//! and deterministic oracles used to check them.

pub mod distributions;
mod error;
pub mod estimators;
pub mod models;
pub mod numerics;
pub mod oracle;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
