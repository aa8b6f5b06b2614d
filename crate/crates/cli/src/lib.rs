//! Experiment orchestration for the `mvflow` binary: reproducible config
//! files, the five experiment runners, and their tabular outputs.

// `!(x > 0.0)` guards reject NaN; `x <= 0.0` would let it through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;

pub use config::{ConfigError, Experiment, ExperimentConfig};
pub use experiments::{run, CliError, RunOutcome};
