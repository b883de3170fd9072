//! Legendre smoothing kernels of integer smoothness order `β`.
//!
//! The kernel is `K(r) = Σ_{m=0}^{β} p_m'(0) p_m(r)` with the normalized
//! Legendre polynomials `p_m = √(2m+1) L_m`. Since the `p_m` are orthonormal
//! under the uniform density `1/2` on `[-1, 1]`, for every polynomial `q` of
//! degree at most `β` we get `E[q(r) K(r)] = q'(0)`, which yields the moment
//! conditions `E[K] = 0`, `E[r K] = 1` and `E[r^j K] = 0` for `2 ≤ j ≤ β`.
//!
//! Moment conditions are expectations under `r ~ Uniform[-1, 1]`; the
//! constants `κ_β = ∫|u|^β |K(u)| du` and `κ = ∫ K(u)² du` are plain integrals
//! over `[-1, 1]`.

use alloc::vec;
use alloc::vec::Vec;

use crate::poly;
use crate::quadrature::GaussLegendre;

/// Number of Gauss–Legendre nodes used on each sign interval of `K`.
pub const QUADRATURE_NODES: usize = 64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("kernel smoothness order must be an integer >= 2, got {0}")]
    InvalidOrder(u32),
    #[error("kernel argument {0} lies outside [-1, 1]")]
    OutOfDomain(f64),
}

/// Normalized Legendre polynomial `p_m(u) = √(2m+1) L_m(u)`.
///
/// `L_m` is evaluated by the Bonnet recurrence; the result is meaningful on
/// `[-1, 1]`.
pub fn legendre_p(m: usize, u: f64) -> f64 {
    debug_assert!(u.abs() <= 1.0, "legendre_p evaluated outside [-1, 1]");
    libm::sqrt((2 * m + 1) as f64) * legendre(m, u)
}

fn legendre(m: usize, u: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = u;
    for k in 1..m {
        let next = ((2 * k + 1) as f64 * u * cur - k as f64 * prev) / (k + 1) as f64;
        prev = cur;
        cur = next;
    }
    cur
}

/// Monomial coefficients of the classical Legendre polynomials `L_0..=L_max`.
fn legendre_coefficients(max: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(max + 1);
    out.push(vec![1.0]);
    if max >= 1 {
        out.push(vec![0.0, 1.0]);
    }
    for k in 1..max {
        // (k+1) L_{k+1} = (2k+1) x L_k - k L_{k-1}
        let mut next = vec![0.0; k + 2];
        for (j, &c) in out[k].iter().enumerate() {
            next[j + 1] += (2 * k + 1) as f64 * c;
        }
        for (j, &c) in out[k - 1].iter().enumerate() {
            next[j] -= k as f64 * c;
        }
        for c in &mut next {
            *c /= (k + 1) as f64;
        }
        out.push(next);
    }
    out
}

/// A smoothing kernel together with its constants.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    beta: u32,
    coeffs: Vec<f64>,
    kappa_beta: f64,
    kappa: f64,
}

impl KernelSpec {
    /// Smoothness order `β`.
    pub fn beta(&self) -> u32 {
        self.beta
    }

    /// Largest integer strictly below `β`.
    pub fn l(&self) -> u32 {
        self.beta - 1
    }

    /// Monomial coefficients of `K`, ascending in power.
    pub fn poly_coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `κ_β = ∫_{-1}^{1} |u|^β |K(u)| du`.
    pub fn kappa_beta(&self) -> f64 {
        self.kappa_beta
    }

    /// `κ = ∫_{-1}^{1} K(u)² du`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `K(r)` for `|r| ≤ 1`.
    pub fn eval(&self, r: f64) -> Result<f64, KernelError> {
        if !(-1.0..=1.0).contains(&r) {
            return Err(KernelError::OutOfDomain(r));
        }
        Ok(self.eval_unchecked(r))
    }

    /// `K(r)` evaluated as `r · P(r²)` over the odd coefficients, so that
    /// `K(-r) = -K(r)` holds bit for bit.
    pub(crate) fn eval_unchecked(&self, r: f64) -> f64 {
        let r2 = r * r;
        let inner = self
            .coeffs
            .iter()
            .skip(1)
            .step_by(2)
            .rev()
            .fold(0.0, |acc, &c| acc * r2 + c);
        r * inner
    }

    /// `E[r^j K(r)]` for `r ~ Uniform[-1, 1]`, by Gauss–Legendre quadrature.
    pub fn moment(&self, j: u32) -> f64 {
        let nodes = (self.coeffs.len() + j as usize).div_ceil(2).max(QUADRATURE_NODES);
        let rule = GaussLegendre::new(nodes);
        0.5 * rule.integrate(-1.0, 1.0, |r| libm::pow(r, j as f64) * self.eval_unchecked(r))
    }
}

/// Builds the order-`β` Legendre kernel.
pub fn build_kernel(beta: u32) -> Result<KernelSpec, KernelError> {
    if beta < 2 {
        return Err(KernelError::InvalidOrder(beta));
    }
    let order = beta as usize;
    let legendre = legendre_coefficients(order);
    let mut coeffs = vec![0.0; order + 1];
    for (m, lm) in legendre.iter().enumerate() {
        // p_m'(0) p_m(r) = (2m+1) L_m'(0) L_m(r), and L_m'(0) is the linear
        // coefficient of L_m.
        let slope = lm.get(1).copied().unwrap_or(0.0);
        if slope == 0.0 {
            continue;
        }
        let weight = (2 * m + 1) as f64 * slope;
        for (k, &c) in lm.iter().enumerate() {
            coeffs[k] += weight * c;
        }
    }
    while coeffs.len() > 2 && coeffs.last() == Some(&0.0) {
        coeffs.pop();
    }
    let mut spec = KernelSpec {
        beta,
        coeffs,
        kappa_beta: 0.0,
        kappa: 0.0,
    };
    let (kappa_beta, kappa) = kernel_constants(&spec);
    spec.kappa_beta = kappa_beta;
    spec.kappa = kappa;
    Ok(spec)
}

/// `(κ_β, κ)` by fixed-order Gauss–Legendre quadrature on the sign intervals
/// of `K` (split additionally at the origin, where `|u|^β` may kink).
pub fn kernel_constants(spec: &KernelSpec) -> (f64, f64) {
    kernel_constants_with(spec, QUADRATURE_NODES)
}

pub(crate) fn kernel_constants_with(spec: &KernelSpec, nodes: usize) -> (f64, f64) {
    let rule = GaussLegendre::new(nodes);
    let mut knots = poly::real_roots(&spec.coeffs, -1.0, 1.0);
    knots.push(-1.0);
    knots.push(0.0);
    knots.push(1.0);
    knots.sort_by(|a, b| a.total_cmp(b));
    knots.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let beta = spec.beta as f64;
    let mut kappa_beta = 0.0;
    let mut kappa = 0.0;
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        kappa_beta += rule.integrate(a, b, |u| libm::pow(u.abs(), beta) * spec.eval_unchecked(u).abs());
        kappa += rule.integrate(a, b, |u| {
            let k = spec.eval_unchecked(u);
            k * k
        });
    }
    (kappa_beta, kappa)
}
