//! Experiment harness for the `graal` solvers: configuration files, seed
//! sweeps run in parallel, per-iteration CSV traces and summary tables.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod experiment;
pub mod output;
pub mod presets;

pub use config::{ConfigError, ExperimentConfig, Family, MethodKind};
pub use experiment::{run_experiment, ExperimentOutput, SummaryRow};
