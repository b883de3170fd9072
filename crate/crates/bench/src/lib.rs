//! Benchmark harness for the accelerated zero-order method: configuration,
//! experiment runs with CSV trajectories and manifests, parameter planning,
//! dataset files and SVG plots.

pub mod config;
pub mod data;
pub mod experiment;
pub mod plan;
pub mod plot;

pub use config::{ConfigError, ExperimentConfig};
pub use experiment::{run_experiment, BenchError};
