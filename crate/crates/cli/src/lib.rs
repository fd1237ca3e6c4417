//! Config-driven runner for the estimators: single runs, the seven-configuration grid, oracles
//! and the invariant suite.

pub mod commands;
pub mod config;
mod float_text;
pub mod output;

pub use float_text::FloatText;
