//! Kernel-smoothed two-point gradient estimates.
//!
//! A single estimate at `x` along direction `e` with radius `r` is
//!
//! ```text
//! g = d / (2h) · (f_δ(x + h r e, ξ) − f_δ(x − h r e, ξ)) · K(r) · e
//! ```
//!
//! and a batched estimate averages `B` of them with independent `(e, r, ξ)`.
//! Sample `i` of iteration `k` draws everything from the stream
//! `(seed, k, i)`: lane 0 for `(e, r, ξ)`, lanes 1 and 2 for the stochastic
//! noise of the two queries.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::kernel::{build_kernel, KernelError, KernelSpec};
use crate::oracle::{NoisyOracle, Objective, OracleError, SampleIndex};
use crate::sampling::{fill_direction, sample_radius, RngStream};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EstimatorError {
    #[error("smoothing parameter must be positive and finite, got {0}")]
    InvalidSmoothing(f64),
    #[error("batch size must be at least 1")]
    EmptyBatch,
    #[error("direction must have unit norm (got norm {0})")]
    NotUnit(f64),
    #[error("direction has dimension {got}, objective has {expected}")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Which kernel the batched estimator weights samples with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EstimatorMode {
    /// The configured order-`β` kernel.
    #[default]
    Kernel,
    /// The `β = 2` kernel `K(r) = 3r`, i.e. the classical two-point sphere
    /// estimator used by the smooth-case baseline.
    SmoothBaseline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    h: f64,
    kernel: KernelSpec,
    batch: usize,
    mode: EstimatorMode,
}

impl EstimatorConfig {
    /// In [`EstimatorMode::SmoothBaseline`] the given kernel is replaced by the
    /// `β = 2` kernel.
    pub fn new(h: f64, kernel: KernelSpec, batch: usize, mode: EstimatorMode) -> Result<Self, EstimatorError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(EstimatorError::InvalidSmoothing(h));
        }
        if batch == 0 {
            return Err(EstimatorError::EmptyBatch);
        }
        let kernel = match mode {
            EstimatorMode::Kernel => kernel,
            EstimatorMode::SmoothBaseline if kernel.beta() == 2 => kernel,
            EstimatorMode::SmoothBaseline => build_kernel(2)?,
        };
        Ok(Self { h, kernel, batch, mode })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// The kernel actually used for weighting.
    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn mode(&self) -> EstimatorMode {
        self.mode
    }
}

/// Reusable buffers for one estimate.
struct Scratch {
    e: Vec<f64>,
    plus: Vec<f64>,
    minus: Vec<f64>,
}

impl Scratch {
    fn new(d: usize) -> Self {
        Self {
            e: vec![0.0; d],
            plus: vec![0.0; d],
            minus: vec![0.0; d],
        }
    }
}

/// The scalar `c` with `g = c · e`. Consumes exactly two oracle calls.
#[allow(clippy::too_many_arguments)]
fn pair_coefficient<O: Objective>(
    oracle: &NoisyOracle<O>,
    kernel: &KernelSpec,
    h: f64,
    x: &[f64],
    e: &[f64],
    r: f64,
    xi: SampleIndex,
    stream: &RngStream,
    plus: &mut [f64],
    minus: &mut [f64],
) -> Result<f64, EstimatorError> {
    let step = h * r;
    for (((p, m), &xj), &ej) in plus.iter_mut().zip(minus.iter_mut()).zip(x).zip(e) {
        *p = xj + step * ej;
        *m = xj - step * ej;
    }
    let f_plus = oracle.query(plus, xi, &stream.child(1))?;
    let f_minus = oracle.query(minus, xi, &stream.child(2))?;
    let diff = f_plus - f_minus;
    let d = x.len() as f64;
    Ok(d / (2.0 * h) * diff * kernel.eval(r)?)
}

/// One kernel two-point estimate along the unit direction `e` with radius
/// `r`. Stochastic noise for the two queries comes from lanes 1 and 2 of
/// `stream`.
#[allow(clippy::too_many_arguments)]
pub fn single_estimate<O: Objective>(
    oracle: &NoisyOracle<O>,
    kernel: &KernelSpec,
    h: f64,
    x: &[f64],
    e: &[f64],
    r: f64,
    xi: SampleIndex,
    stream: &RngStream,
) -> Result<Vec<f64>, EstimatorError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(EstimatorError::InvalidSmoothing(h));
    }
    if e.len() != x.len() {
        return Err(EstimatorError::Dimension {
            expected: x.len(),
            got: e.len(),
        });
    }
    let n = libm::sqrt(e.iter().map(|v| v * v).sum());
    if (n - 1.0).abs() > 1e-9 {
        return Err(EstimatorError::NotUnit(n));
    }
    let mut scratch = Scratch::new(x.len());
    let c = pair_coefficient(oracle, kernel, h, x, e, r, xi, stream, &mut scratch.plus, &mut scratch.minus)?;
    Ok(e.iter().map(|v| c * v).collect())
}

/// Draws `(e, r, ξ)` for one batch member from lane 0 of `sample_stream`.
pub fn draw_sample<O: Objective>(
    objective: &O,
    sample_stream: &RngStream,
    e: &mut [f64],
) -> (f64, SampleIndex) {
    let mut rng = sample_stream.child(0).rng();
    fill_direction(e, &mut rng);
    let r = sample_radius(&mut rng);
    let n = objective.num_samples();
    let xi = if n > 1 { rng.random_range(0..n) } else { 0 };
    (r, SampleIndex(xi))
}

/// Mean of `B` kernel estimates at `x`, member `i` drawn from
/// `iteration_stream.child(i)`. Consumes exactly `2B` oracle calls.
pub fn batched_estimate<O: Objective>(
    oracle: &NoisyOracle<O>,
    cfg: &EstimatorConfig,
    x: &[f64],
    iteration_stream: &RngStream,
) -> Result<Vec<f64>, EstimatorError> {
    batched_with_kernel(oracle, cfg.kernel(), cfg.h, cfg.batch, x, iteration_stream)
}

/// [`batched_estimate`] with the `β = 2` kernel regardless of `cfg`'s kernel.
pub fn baseline_estimate<O: Objective>(
    oracle: &NoisyOracle<O>,
    cfg: &EstimatorConfig,
    x: &[f64],
    iteration_stream: &RngStream,
) -> Result<Vec<f64>, EstimatorError> {
    if cfg.kernel().beta() == 2 {
        return batched_with_kernel(oracle, cfg.kernel(), cfg.h, cfg.batch, x, iteration_stream);
    }
    let smooth = build_kernel(2)?;
    batched_with_kernel(oracle, &smooth, cfg.h, cfg.batch, x, iteration_stream)
}

fn batched_with_kernel<O: Objective>(
    oracle: &NoisyOracle<O>,
    kernel: &KernelSpec,
    h: f64,
    batch: usize,
    x: &[f64],
    iteration_stream: &RngStream,
) -> Result<Vec<f64>, EstimatorError> {
    let d = oracle.dim();
    if x.len() != d {
        return Err(EstimatorError::Dimension { expected: d, got: x.len() });
    }
    if batch == 0 {
        return Err(EstimatorError::EmptyBatch);
    }
    let mut acc = vec![0.0; d];
    let mut scratch = Scratch::new(d);
    // Summed in index order, so the result is reproducible bit for bit.
    for i in 0..batch {
        let stream = iteration_stream.child(i as u64);
        let (r, xi) = draw_sample(oracle.objective(), &stream, &mut scratch.e);
        let c = pair_coefficient(oracle, kernel, h, x, &scratch.e, r, xi, &stream, &mut scratch.plus, &mut scratch.minus)?;
        if c != 0.0 {
            for (a, &ej) in acc.iter_mut().zip(&scratch.e) {
                *a += c * ej;
            }
        }
    }
    let inv = 1.0 / batch as f64;
    acc.iter_mut().for_each(|a| *a *= inv);
    Ok(acc)
}
