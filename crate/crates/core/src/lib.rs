//! Gradient-free stochastic optimization for objectives with higher-order
//! smoothness.
//!
//! The crate provides the building blocks of an accelerated zero-order SGD
//! method whose two-point gradient estimates are weighted by a Legendre
//! smoothing kernel of order `β`:
//!
//! - [`kernel`]: the kernel `K(r)` and its constants `κ_β`, `κ`.
//! - [`sampling`]: counter-keyed random streams, sphere directions and radii.
//! - [`oracle`]: black-box objectives wrapped with bounded adversarial noise.
//! - [`estimator`]: single and batched kernel two-point gradient estimates.
//! - [`optimizer`]: the accelerated loop with Euclidean ball projection.
//! - [`theory`]: closed-form planners for `h`, admissible noise, `N`, `B`, `T`.
//! - [`problems`]: logistic regression and analytic test functions.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled; only wall-clock timing of runs depends on `std`.
//!
//! ```
//! use azo_core::kernel::build_kernel;
//! use azo_core::oracle::{NoiseModel, NoisyOracle};
//! use azo_core::optimizer::{run, OptimizerConfig};
//! use azo_core::problems::Quadratic;
//!
//! let objective = Quadratic::new(vec![0.3, -0.2, 0.1], 1.0).unwrap();
//! let oracle = NoisyOracle::new(objective, NoiseModel::None);
//! let kernel = build_kernel(4).unwrap();
//! let cfg = OptimizerConfig::new(200, 4, 0.05, 1.0, 1.0);
//! let out = run(&cfg, &oracle, &kernel).unwrap();
//! assert_eq!(out.trajectory.len(), 200);
//! assert_eq!(oracle.call_count(), 2 * 4 * 200);
//! ```

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod estimator;
pub mod kernel;
mod linalg;
pub mod optimizer;
pub mod oracle;
mod poly;
pub mod problems;
pub mod quadrature;
pub mod sampling;
pub mod theory;

pub use estimator::{EstimatorConfig, EstimatorError, EstimatorMode};
pub use kernel::{KernelError, KernelSpec};
pub use optimizer::{OptimizerConfig, OptimizerError, OptimizerState, RunOutput, RunRecord, StepRule};
pub use oracle::{NoiseModel, NoisyOracle, Objective, OracleError, SampleIndex};
pub use sampling::RngStream;
pub use theory::{NoiseKind, Regime, TheoryError, TheoryInputs};
