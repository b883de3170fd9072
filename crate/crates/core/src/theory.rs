//! Planning formulas for the smoothing parameter, admissible noise level,
//! iteration count, batch size and oracle complexity.
//!
//! All big-O expressions are evaluated with unit constants; counts are
//! rounded up. The Euclidean setting (`p = 2`) uses `κ' = 1`; other `ℓ_p`
//! geometries substitute `κ'(p, d) = min{q, ln d} · d^{2/q − 1}` where `q` is
//! the Hölder conjugate of `p`.

use crate::kernel::KernelSpec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TheoryError {
    #[error("{0} must be positive and finite")]
    NonPositive(&'static str),
    #[error("kernel order must be at least 2, got {0}")]
    InvalidOrder(u32),
    #[error("norm index p must lie in [1, inf], got {0}")]
    InvalidNorm(f64),
    #[error("the lp constant needs dimension d >= 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("sigma_star is required for the stochastic-noise bound with B <= N")]
    MissingSigmaStar,
    #[error("batch size is required for regime {0:?}")]
    MissingBatch(Regime),
    #[error("noise level delta is required for regime {0:?}")]
    MissingDelta(Regime),
}

/// Relation between batch size `B` and iteration count `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `B = 1`.
    Single,
    /// `1 < B < N`; needs the batch size.
    Moderate,
    /// `B = N`.
    Balanced,
    /// `B > N` (overbatching).
    Over,
}

impl Regime {
    pub const ALL: [Regime; 4] = [Regime::Single, Regime::Moderate, Regime::Balanced, Regime::Over];

    pub fn name(&self) -> &'static str {
        match self {
            Regime::Single => "B=1",
            Regime::Moderate => "1<B<N",
            Regime::Balanced => "B=N",
            Regime::Over => "B>N",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseKind {
    #[default]
    Deterministic,
    Stochastic,
}

/// Kernel data entering the formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConstants {
    pub beta: u32,
    pub kappa_beta: f64,
    pub kappa: f64,
}

impl From<&KernelSpec> for KernelConstants {
    fn from(k: &KernelSpec) -> Self {
        Self {
            beta: k.beta(),
            kappa_beta: k.kappa_beta(),
            kappa: k.kappa(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryInputs {
    pub eps: f64,
    pub smoothness: f64,
    pub radius: f64,
    pub dim: usize,
    pub kernel: KernelConstants,
    /// `σ*`; `None` is treated as interpolation (`σ* = 0`) by the
    /// complexity formulas but rejected where a bound is proportional to it.
    pub sigma_star: Option<f64>,
    pub regime: Regime,
    pub batch: Option<u64>,
    /// Norm index `p`, `f64::INFINITY` allowed.
    pub p: f64,
    pub noise_kind: NoiseKind,
    /// Noise level `Δ`, used by the `B > N` complexity terms.
    pub delta: Option<f64>,
}

impl TheoryInputs {
    pub fn new(eps: f64, smoothness: f64, radius: f64, dim: usize, kernel: impl Into<KernelConstants>) -> Self {
        Self {
            eps,
            smoothness,
            radius,
            dim,
            kernel: kernel.into(),
            sigma_star: Some(0.0),
            regime: Regime::Single,
            batch: None,
            p: 2.0,
            noise_kind: NoiseKind::Deterministic,
            delta: None,
        }
    }

    pub fn with_regime(mut self, regime: Regime) -> Self {
        self.regime = regime;
        self
    }

    pub fn with_batch(mut self, batch: u64) -> Self {
        self.batch = Some(batch);
        self
    }

    pub fn with_sigma_star(mut self, sigma: Option<f64>) -> Self {
        self.sigma_star = sigma;
        self
    }

    pub fn with_noise(mut self, kind: NoiseKind) -> Self {
        self.noise_kind = kind;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    fn validate(&self) -> Result<(), TheoryError> {
        positive("eps", self.eps)?;
        positive("L", self.smoothness)?;
        positive("R", self.radius)?;
        if self.dim == 0 {
            return Err(TheoryError::NonPositive("d"));
        }
        if self.kernel.beta < 2 {
            return Err(TheoryError::InvalidOrder(self.kernel.beta));
        }
        positive("kappa_beta", self.kernel.kappa_beta)?;
        positive("kappa", self.kernel.kappa)?;
        if !(self.p >= 1.0) {
            return Err(TheoryError::InvalidNorm(self.p));
        }
        if let Some(s) = self.sigma_star {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(TheoryError::NonPositive("sigma_star"));
            }
        }
        Ok(())
    }

    /// `1 / (β − 1)`.
    fn inv(&self) -> f64 {
        1.0 / (self.kernel.beta as f64 - 1.0)
    }

    fn is_euclidean(&self) -> bool {
        self.p == 2.0
    }

    /// `κ'` of the input geometry: 1 in the Euclidean case.
    fn geometry(&self) -> Result<f64, TheoryError> {
        if self.is_euclidean() {
            Ok(1.0)
        } else {
            lp_constant(self.p, self.dim)
        }
    }

    fn sigma(&self) -> f64 {
        self.sigma_star.unwrap_or(0.0)
    }
}

fn positive(name: &'static str, v: f64) -> Result<(), TheoryError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(TheoryError::NonPositive(name))
    }
}

/// `h = (ε / (κ_β L R))^{1/(β−1)}`.
pub fn smoothing_parameter(input: &TheoryInputs) -> Result<f64, TheoryError> {
    input.validate()?;
    let base = input.eps / (input.kernel.kappa_beta * input.smoothness * input.radius);
    Ok(libm::pow(base, input.inv()))
}

/// Maximum admissible noise level `Δ` for the input's noise kind and regime.
pub fn max_noise(input: &TheoryInputs) -> Result<f64, TheoryError> {
    input.validate()?;
    let inv = input.inv();
    let (eps, l, r, d) = (input.eps, input.smoothness, input.radius, input.dim as f64);
    let kb = libm::pow(input.kernel.kappa_beta, inv);
    match (input.noise_kind, input.regime) {
        (NoiseKind::Deterministic, _) => {
            Ok(libm::pow(eps, 1.0 + inv) / (d * kb * libm::pow(r, 1.0 + inv) * libm::pow(l, inv)))
        }
        (NoiseKind::Stochastic, Regime::Over) => {
            let b = input.batch.ok_or(TheoryError::MissingBatch(Regime::Over))? as f64;
            let kp = input.geometry()?;
            Ok(libm::pow(eps, 0.75 + inv) * libm::sqrt(b) * libm::pow(l, 0.25 - inv)
                / (libm::sqrt(input.kernel.kappa * kp) * d * kb * libm::pow(r, 0.5 + inv)))
        }
        (NoiseKind::Stochastic, _) => {
            let sigma = input.sigma_star.ok_or(TheoryError::MissingSigmaStar)?;
            Ok(sigma * libm::pow(eps, inv) / (kb * libm::sqrt(d) * libm::pow(r, inv) * libm::pow(l, inv)))
        }
    }
}

/// Leading-order complexity of one regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Complexity {
    pub iterations: u64,
    pub oracle_calls: u64,
    /// Batch size: the given one, or the required one in the `B > N` regime.
    pub batch: u64,
}

/// Real-valued leading-order terms before rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityTerms {
    pub iterations: f64,
    pub oracle_calls: f64,
    pub batch: f64,
}

/// `(N, T, B)` for the input's regime with unit constants, rounded up.
///
/// Both noise kinds share the same `N` and `T` expressions.
pub fn complexity(input: &TheoryInputs) -> Result<Complexity, TheoryError> {
    let t = complexity_terms_with(input, 1.0)?;
    Ok(Complexity {
        iterations: ceil(t.iterations),
        oracle_calls: ceil(t.oracle_calls),
        batch: ceil(t.batch),
    })
}

/// Unrounded version of [`complexity`].
pub fn complexity_terms(input: &TheoryInputs) -> Result<ComplexityTerms, TheoryError> {
    complexity_terms_with(input, 1.0)
}

fn ceil(v: f64) -> u64 {
    libm::ceil(v).max(1.0) as u64
}

/// Complexity with `κ` multiplied by the geometry factor `kp` (`κ κ'`).
fn complexity_terms_with(input: &TheoryInputs, kp: f64) -> Result<ComplexityTerms, TheoryError> {
    input.validate()?;
    let (eps, l, r, d) = (input.eps, input.smoothness, input.radius, input.dim as f64);
    let kappa = input.kernel.kappa * kp;
    let sigma = input.sigma();
    // LR²/ε and dκσ*²R²/ε².
    let a = l * r * r / eps;
    let c = d * kappa * sigma * sigma * r * r / (eps * eps);
    let sqrt_a = libm::sqrt(a);
    let terms = match input.regime {
        Regime::Single => {
            let n = a.max(c);
            ComplexityTerms {
                iterations: n,
                oracle_calls: n,
                batch: 1.0,
            }
        }
        Regime::Moderate => {
            let b = input.batch.ok_or(TheoryError::MissingBatch(Regime::Moderate))? as f64;
            ComplexityTerms {
                iterations: moderate_iterations(a, c, b),
                oracle_calls: a.max(b * sqrt_a).max(c),
                batch: b,
            }
        }
        Regime::Balanced => {
            let n = sqrt_a.max(libm::sqrt(d * kappa) * sigma * r / eps);
            ComplexityTerms {
                iterations: n,
                oracle_calls: a.max(c),
                batch: n,
            }
        }
        Regime::Over => {
            let delta = input.delta.ok_or(TheoryError::MissingDelta(Regime::Over))?;
            let inv = input.inv();
            let kb2 = libm::pow(input.kernel.kappa_beta, 2.0 * inv);
            let noise_t = kb2 * kappa * d * d * libm::pow(l, 2.0 * inv) * delta * delta * libm::pow(r, 2.0 + 2.0 * inv)
                / libm::pow(eps, 2.0 + 2.0 * inv);
            let noise_b = kb2 * kappa * d * d * delta * delta * libm::pow(r, 1.0 + 2.0 * inv)
                / (libm::pow(eps, 1.5 + 2.0 * inv) * libm::pow(l, 0.5 - 2.0 * inv));
            let sigma_b = d * kappa * sigma * sigma * r / (libm::sqrt(l) * libm::pow(eps, 1.5));
            ComplexityTerms {
                iterations: sqrt_a,
                oracle_calls: a.max(c).max(noise_t),
                batch: sqrt_a.max(sigma_b).max(noise_b),
            }
        }
    };
    Ok(terms)
}

/// `N = max(LR²/(Bε), √(LR²/ε), dκσ*²R²/(Bε²))` of the `1 < B < N` regime,
/// written in terms of `a = LR²/ε` and `c = dκσ*²R²/ε²`.
pub fn moderate_iterations(a: f64, c: f64, batch: f64) -> f64 {
    (a / batch).max(libm::sqrt(a)).max(c / batch)
}

/// `κ'(p, d) = min{q, ln d} · d^{2/q − 1}` with `1/p + 1/q = 1`.
pub fn lp_constant(p: f64, d: usize) -> Result<f64, TheoryError> {
    if !(p >= 1.0) {
        return Err(TheoryError::InvalidNorm(p));
    }
    if d < 2 {
        return Err(TheoryError::DimensionTooSmall(d));
    }
    let ln_d = libm::log(d as f64);
    // q = p/(p-1); q = inf for p = 1 and q = 1 for p = inf. 2/q = 2 - 2/p.
    let two_over_q = if p.is_infinite() { 2.0 } else { 2.0 - 2.0 / p };
    let q_cap = if p == 1.0 {
        ln_d
    } else if p.is_infinite() {
        1.0f64.min(ln_d)
    } else {
        (p / (p - 1.0)).min(ln_d)
    };
    Ok(q_cap * libm::pow(d as f64, two_over_q - 1.0))
}

/// Total oracle calls in `ℓ_p` geometry:
/// `T = max(LR²/ε, κκ'dσ*²R²/ε², κ_β^{2/(β−1)} κκ' d² Δ² L^{2/(β−1)} R^{2+2/(β−1)} / ε^{2+2/(β−1)})`.
///
/// The third term is present for every regime here, since `Δ` is supplied.
pub fn lp_complexity(input: &TheoryInputs, delta: f64) -> Result<u64, TheoryError> {
    Ok(ceil(lp_complexity_value(input, delta)?))
}

pub fn lp_complexity_value(input: &TheoryInputs, delta: f64) -> Result<f64, TheoryError> {
    input.validate()?;
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(TheoryError::NonPositive("delta"));
    }
    let kp = lp_constant(input.p, input.dim)?;
    let over = input.clone().with_regime(Regime::Over).with_delta(delta);
    Ok(complexity_terms_with(&over, kp)?.oracle_calls)
}
