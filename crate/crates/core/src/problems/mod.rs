//! Objectives with known constants: logistic regression on synthetic data
//! and analytic test functions.

mod logistic;
mod test_functions;

pub use logistic::{
    generate_synthetic, logistic_loss, logistic_smoothness, Dataset, DatasetError, LogisticRegression, SyntheticSpec,
};
pub use test_functions::{Constant, Linear, OneSidedPower, ProblemError, Quadratic};
