//! Analytic fixtures with exact gradients.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{dot, norm};
use crate::oracle::{Objective, SampleIndex};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProblemError {
    #[error("minimizer norm {norm} exceeds the radius {radius}")]
    OutsideRadius { norm: f64, radius: f64 },
    #[error("smoothness order must be at least 2, got {0}")]
    InvalidOrder(u32),
    #[error("dimension must be at least 1")]
    EmptyDimension,
}

/// `f(x) = ½‖x − a‖²` with `L = 1`, `f* = 0` and `σ* = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    center: Vec<f64>,
    radius: f64,
}

impl Quadratic {
    /// Rejects a minimizer outside the ball of the given radius.
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self, ProblemError> {
        if center.is_empty() {
            return Err(ProblemError::EmptyDimension);
        }
        let n = norm(&center);
        if n > radius {
            return Err(ProblemError::OutsideRadius { norm: n, radius });
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn smoothness(&self) -> f64 {
        1.0
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[f64], _xi: SampleIndex) -> f64 {
        0.5 * x.iter().zip(&self.center).map(|(x, a)| (x - a) * (x - a)).sum::<f64>()
    }

    fn mean_value(&self, x: &[f64]) -> f64 {
        self.value(x, SampleIndex(0))
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(x.iter().zip(&self.center).map(|(x, a)| x - a).collect())
    }

    fn min_value(&self) -> Option<f64> {
        Some(0.0)
    }

    fn solution_radius(&self) -> Option<f64> {
        Some(self.radius)
    }
}

/// `f(x) = Σ_j c_j max(x_j, 0)^β`.
///
/// Each term is `β − 1` times continuously differentiable with a Lipschitz
/// `(β − 1)`-th derivative (constant `c_j β!`) and no more, so the function
/// sits exactly in the order-`β` Hölder class; it is convex for
/// non-negative `c_j`. Near the kink at the origin its odd part is
/// `sign(t)|t|^β / 2`, which is not a polynomial for even `β`, so order-`β`
/// kernels leave a bias of exact order `h^{β−1}` there.
#[derive(Debug, Clone, PartialEq)]
pub struct OneSidedPower {
    beta: u32,
    coeffs: Vec<f64>,
}

impl OneSidedPower {
    pub fn new(beta: u32, coeffs: Vec<f64>) -> Result<Self, ProblemError> {
        if beta < 2 {
            return Err(ProblemError::InvalidOrder(beta));
        }
        if coeffs.is_empty() {
            return Err(ProblemError::EmptyDimension);
        }
        Ok(Self { beta, coeffs })
    }

    /// Unit coefficients in dimension `d`.
    pub fn uniform(beta: u32, d: usize) -> Result<Self, ProblemError> {
        Self::new(beta, vec![1.0; d])
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    /// Lipschitz constant of the `(β − 1)`-th derivative, `β! max_j |c_j|`.
    pub fn holder_constant(&self) -> f64 {
        let fact: f64 = (1..=self.beta).map(|k| k as f64).product();
        fact * self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

impl Objective for OneSidedPower {
    fn dim(&self) -> usize {
        self.coeffs.len()
    }

    fn value(&self, x: &[f64], _xi: SampleIndex) -> f64 {
        let b = self.beta as i32;
        x.iter()
            .zip(&self.coeffs)
            .map(|(&x, &c)| if x > 0.0 { c * libm::pow(x, b as f64) } else { 0.0 })
            .sum()
    }

    fn mean_value(&self, x: &[f64]) -> f64 {
        self.value(x, SampleIndex(0))
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let b = self.beta as f64;
        Some(
            x.iter()
                .zip(&self.coeffs)
                .map(|(&x, &c)| if x > 0.0 { c * b * libm::pow(x, b - 1.0) } else { 0.0 })
                .collect(),
        )
    }

    fn min_value(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// `f(x) = ⟨c, x⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    slope: Vec<f64>,
}

impl Linear {
    pub fn new(slope: Vec<f64>) -> Self {
        Self { slope }
    }
}

impl Objective for Linear {
    fn dim(&self) -> usize {
        self.slope.len()
    }

    fn value(&self, x: &[f64], _xi: SampleIndex) -> f64 {
        dot(&self.slope, x)
    }

    fn mean_value(&self, x: &[f64]) -> f64 {
        self.value(x, SampleIndex(0))
    }

    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        Some(self.slope.clone())
    }
}

/// `f(x) = c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constant {
    dim: usize,
    value: f64,
}

impl Constant {
    pub fn new(dim: usize, value: f64) -> Self {
        Self { dim, value }
    }
}

impl Objective for Constant {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, _x: &[f64], _xi: SampleIndex) -> f64 {
        self.value
    }

    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![0.0; self.dim])
    }

    fn min_value(&self) -> Option<f64> {
        Some(self.value)
    }
}
