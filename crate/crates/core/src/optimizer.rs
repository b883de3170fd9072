//! Accelerated zero-order SGD with projection onto the Euclidean ball.
//!
//! Starting from `x_0 = x_0^ag = 0`, iteration `k = 0..N-1` performs
//!
//! ```text
//! β_k      = 1 + k/6,   γ_k = γ (k + 1)
//! x_k^md   = β_k⁻¹ x_k + (1 − β_k⁻¹) x_k^ag
//! g_k      = batched kernel estimate at x_k^md
//! x̄_{k+1}  = x_k − step_k g_k
//! x_{k+1}  = min{1, R / ‖x̄_{k+1}‖} x̄_{k+1}
//! x_{k+1}^ag = β_k⁻¹ x_{k+1} + (1 − β_k⁻¹) x_k^ag
//! ```
//!
//! with `γ = min{1/(12L), B/(24L(N+1)), √(BR²/(L f* N³))}` and `step_k`
//! chosen by [`StepRule`].

use alloc::vec;
use alloc::vec::Vec;

use crate::estimator::{batched_estimate, EstimatorConfig, EstimatorError, EstimatorMode};
use crate::kernel::{build_kernel, KernelError, KernelSpec};
use crate::oracle::{NoisyOracle, Objective};
use crate::sampling::RngStream;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OptimizerError {
    #[error("smoothness constant must be positive, got {0}")]
    InvalidSmoothness(f64),
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("iterate became non-finite at iteration {iteration}")]
    NonFiniteIterate { iteration: usize },
    #[error("iteration {iteration}: {source}")]
    Estimator {
        iteration: usize,
        #[source]
        source: EstimatorError,
    },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Step size used in the `x̄_{k+1} = x_k − step · g_k` update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepRule {
    /// `step = γ_k = γ (k + 1)`.
    #[default]
    Growing,
    /// `step = γ` for every iteration.
    Constant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub iterations: usize,
    pub batch: usize,
    pub h: f64,
    pub radius: f64,
    /// Smoothness constant `L`.
    pub smoothness: f64,
    /// Minimum value estimate `f*`; zero drops the third term of `γ`.
    pub f_star: f64,
    pub master_seed: u64,
    pub mode: EstimatorMode,
    pub step_rule: StepRule,
}

impl OptimizerConfig {
    pub fn new(iterations: usize, batch: usize, h: f64, radius: f64, smoothness: f64) -> Self {
        Self {
            iterations,
            batch,
            h,
            radius,
            smoothness,
            f_star: 0.0,
            master_seed: 0,
            mode: EstimatorMode::Kernel,
            step_rule: StepRule::Growing,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_f_star(mut self, f_star: f64) -> Self {
        self.f_star = f_star;
        self
    }

    pub fn with_mode(mut self, mode: EstimatorMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_step_rule(mut self, rule: StepRule) -> Self {
        self.step_rule = rule;
        self
    }

    /// Raw oracle calls of a full run, `2 B N`.
    pub fn planned_calls(&self) -> u64 {
        2 * self.batch as u64 * self.iterations as u64
    }

    pub fn validate(&self) -> Result<(), OptimizerError> {
        if self.iterations == 0 {
            return Err(OptimizerError::InvalidConfig("iterations must be at least 1"));
        }
        if self.batch == 0 {
            return Err(OptimizerError::InvalidConfig("batch must be at least 1"));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(OptimizerError::InvalidConfig("smoothing parameter h must be positive"));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(OptimizerError::InvalidConfig("radius must be positive"));
        }
        if !(self.smoothness > 0.0 && self.smoothness.is_finite()) {
            return Err(OptimizerError::InvalidSmoothness(self.smoothness));
        }
        if !(self.f_star >= 0.0 && self.f_star.is_finite()) {
            return Err(OptimizerError::InvalidConfig("f_star must be finite and non-negative"));
        }
        Ok(())
    }

    pub fn gamma(&self) -> Result<f64, OptimizerError> {
        compute_gamma(self.smoothness, self.batch, self.iterations, self.radius, self.f_star)
    }
}

/// `γ = min{1/(12L), B/(24L(N+1)), √(BR²/(L f* N³))}`; the last term is
/// dropped when `f* = 0`.
pub fn compute_gamma(smoothness: f64, batch: usize, iterations: usize, radius: f64, f_star: f64) -> Result<f64, OptimizerError> {
    if !(smoothness > 0.0) {
        return Err(OptimizerError::InvalidSmoothness(smoothness));
    }
    let l = smoothness;
    let b = batch as f64;
    let n = iterations as f64;
    let mut gamma = (1.0 / (12.0 * l)).min(b / (24.0 * l * (n + 1.0)));
    if f_star > 0.0 {
        gamma = gamma.min(libm::sqrt(b * radius * radius / (l * f_star * n * n * n)));
    }
    Ok(gamma)
}

/// `β_k⁻¹ = 6 / (6 + k)`.
pub fn inverse_beta(k: usize) -> f64 {
    6.0 / (6.0 + k as f64)
}

/// `γ_k = γ (k + 1)`.
pub fn gamma_k(gamma: f64, k: usize) -> f64 {
    gamma * (k as f64 + 1.0)
}

/// Scales `x` onto the ball of radius `radius` if it lies outside.
pub fn project_ball(x: &mut [f64], radius: f64) {
    let n = norm(x);
    if n > radius {
        let s = radius / n;
        x.iter_mut().for_each(|v| *v *= s);
        // Rounding can leave the result a few ulps outside; shrink until it is not.
        while norm(x) > radius {
            x.iter_mut().for_each(|v| *v *= 1.0 - f64::EPSILON);
        }
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    libm::sqrt(x.iter().map(|v| v * v).sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    /// Number of completed iterations.
    pub k: usize,
    pub x: Vec<f64>,
    pub x_ag: Vec<f64>,
    /// Search point of the most recent iteration.
    pub x_md: Vec<f64>,
}

impl OptimizerState {
    pub fn zeros(d: usize) -> Self {
        Self {
            k: 0,
            x: vec![0.0; d],
            x_ag: vec![0.0; d],
            x_md: vec![0.0; d],
        }
    }
}

/// One trajectory row, recorded after each iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// Zero-based index of the iteration just executed.
    pub iter: usize,
    /// Cumulative raw oracle calls, `2 B (iter + 1)`.
    pub oracle_calls: u64,
    /// Noise-free mean objective at `x^ag` after the iteration.
    pub f_value: f64,
    /// `‖x‖` after projection.
    pub x_norm: f64,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub x_ag: Vec<f64>,
    pub trajectory: Vec<RunRecord>,
    pub gamma: f64,
}

impl RunOutput {
    pub fn final_value(&self) -> Option<f64> {
        self.trajectory.last().map(|r| r.f_value)
    }
}

/// Executes loop body `state.k` and advances the state. Consumes `2B`
/// oracle calls.
pub fn iterate<O: Objective>(
    state: &mut OptimizerState,
    cfg: &OptimizerConfig,
    estimator: &EstimatorConfig,
    oracle: &NoisyOracle<O>,
    gamma: f64,
) -> Result<(), OptimizerError> {
    let k = state.k;
    let w = inverse_beta(k);
    for ((md, &x), &ag) in state.x_md.iter_mut().zip(&state.x).zip(&state.x_ag) {
        *md = w * x + (1.0 - w) * ag;
    }
    let stream = RngStream::new(cfg.master_seed).child(k as u64);
    let g = batched_estimate(oracle, estimator, &state.x_md, &stream)
        .map_err(|source| OptimizerError::Estimator { iteration: k, source })?;
    let step = match cfg.step_rule {
        StepRule::Growing => gamma_k(gamma, k),
        StepRule::Constant => gamma,
    };
    for (x, gj) in state.x.iter_mut().zip(&g) {
        *x -= step * gj;
    }
    project_ball(&mut state.x, cfg.radius);
    for (ag, &x) in state.x_ag.iter_mut().zip(&state.x) {
        *ag = w * x + (1.0 - w) * *ag;
    }
    if state.x.iter().chain(&state.x_ag).any(|v| !v.is_finite()) {
        return Err(OptimizerError::NonFiniteIterate { iteration: k });
    }
    state.k += 1;
    Ok(())
}

/// Runs `N` iterations with the order-`β` kernel (or the smooth baseline
/// kernel when `cfg.mode` says so) and returns `x_N^ag` with the trajectory.
pub fn run<O: Objective>(cfg: &OptimizerConfig, oracle: &NoisyOracle<O>, kernel: &KernelSpec) -> Result<RunOutput, OptimizerError> {
    run_observed(cfg, oracle, kernel, |_, _| {})
}

/// [`run`] with a callback after every iteration, e.g. for invariant checks.
pub fn run_observed<O, F>(
    cfg: &OptimizerConfig,
    oracle: &NoisyOracle<O>,
    kernel: &KernelSpec,
    mut observe: F,
) -> Result<RunOutput, OptimizerError>
where
    O: Objective,
    F: FnMut(&OptimizerState, &RunRecord),
{
    cfg.validate()?;
    let gamma = cfg.gamma()?;
    let estimator = EstimatorConfig::new(cfg.h, kernel.clone(), cfg.batch, cfg.mode)
        .map_err(|source| OptimizerError::Estimator { iteration: 0, source })?;
    let mut state = OptimizerState::zeros(oracle.dim());
    let mut trajectory = Vec::with_capacity(cfg.iterations);
    let clock = Clock::start();
    for _ in 0..cfg.iterations {
        iterate(&mut state, cfg, &estimator, oracle, gamma)?;
        let record = RunRecord {
            iter: state.k - 1,
            oracle_calls: oracle.call_count(),
            f_value: oracle.objective().mean_value(&state.x_ag),
            x_norm: norm(&state.x),
            elapsed_ms: clock.elapsed_ms(),
        };
        observe(&state, &record);
        trajectory.push(record);
    }
    Ok(RunOutput {
        x_ag: state.x_ag,
        trajectory,
        gamma,
    })
}

/// The smooth-case baseline: the same loop with the `β = 2` kernel. `cfg`
/// carries the baseline's own smoothness constant.
pub fn run_baseline<O: Objective>(cfg: &OptimizerConfig, oracle: &NoisyOracle<O>) -> Result<RunOutput, OptimizerError> {
    let kernel = build_kernel(2)?;
    let cfg = cfg.clone().with_mode(EstimatorMode::SmoothBaseline);
    run(&cfg, oracle, &kernel)
}

#[cfg(feature = "std")]
struct Clock(std::time::Instant);

#[cfg(feature = "std")]
impl Clock {
    fn start() -> Self {
        Clock(std::time::Instant::now())
    }
    fn elapsed_ms(&self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1e3
    }
}

#[cfg(not(feature = "std"))]
struct Clock;

#[cfg(not(feature = "std"))]
impl Clock {
    fn start() -> Self {
        Clock
    }
    fn elapsed_ms(&self) -> f64 {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::NoiseModel;
    use crate::problems::{Constant, Quadratic};

    #[test]
    fn gamma_examples() {
        assert_eq!(compute_gamma(1.0, 1, 1, 1.0, 1.0).unwrap(), 1.0 / 48.0);
        assert_eq!(compute_gamma(1.0, 48, 1, 1.0, 1.0).unwrap(), 1.0 / 12.0);
        assert!(compute_gamma(0.0, 1, 1, 1.0, 0.0).is_err());
        assert!(compute_gamma(-2.0, 1, 1, 1.0, 0.0).is_err());
    }

    #[test]
    fn gamma_drops_third_term_without_f_star() {
        let with = compute_gamma(1.0, 1000, 10, 1e-3, 1.0).unwrap();
        let without = compute_gamma(1.0, 1000, 10, 1e-3, 0.0).unwrap();
        assert!(with < without);
        assert_eq!(without, 1.0 / 12.0);
    }

    #[test]
    fn projection_cases() {
        let mut x = [6.0, 8.0];
        project_ball(&mut x, 5.0);
        assert_eq!(x, [3.0, 4.0]);
        let mut y = [1.5, 2.0];
        project_ball(&mut y, 5.0);
        assert_eq!(y, [1.5, 2.0]);
        let mut z = [3.0, 4.0];
        project_ball(&mut z, 5.0);
        assert_eq!(z, [3.0, 4.0]);
        let mut w = [0.1, 0.7, 1e3, -3.3, 2.9];
        project_ball(&mut w, 10.0);
        assert!(norm(&w) <= 10.0);
        let mut o = [0.0, 0.0];
        project_ball(&mut o, 1.0);
        assert_eq!(o, [0.0, 0.0]);
    }

    #[test]
    fn schedules_are_exact_rationals() {
        assert_eq!(inverse_beta(0), 1.0);
        assert_eq!(inverse_beta(1), 6.0 / 7.0);
        assert_eq!(inverse_beta(6), 0.5);
        assert_eq!(inverse_beta(600), 6.0 / 606.0);
        assert_eq!(gamma_k(0.25, 0), 0.25);
        assert_eq!(gamma_k(0.25, 6), 1.75);
        assert_eq!(gamma_k(0.125, 600), 75.125);
    }

    #[test]
    fn first_iteration_puts_full_weight_on_new_iterate() {
        let obj = Quadratic::new(vec![0.5, -0.5], 1.0).unwrap();
        let oracle = NoisyOracle::new(obj, NoiseModel::None);
        let cfg = OptimizerConfig::new(10, 4, 0.1, 1.0, 1.0).with_seed(3);
        let est = EstimatorConfig::new(cfg.h, build_kernel(4).unwrap(), cfg.batch, cfg.mode).unwrap();
        let mut state = OptimizerState::zeros(2);
        state.x = vec![0.2, 0.1];
        state.x_ag = vec![-0.3, 0.4];
        iterate(&mut state, &cfg, &est, &oracle, cfg.gamma().unwrap()).unwrap();
        assert_eq!(state.x_md, vec![0.2, 0.1]);
        assert_eq!(state.x_ag, state.x);
        assert_eq!(oracle.call_count(), 8);
    }

    #[test]
    fn iteration_six_averages_evenly() {
        let oracle = NoisyOracle::new(Constant::new(2, 1.0), NoiseModel::None);
        let cfg = OptimizerConfig::new(10, 2, 0.1, 1.0, 1.0);
        let est = EstimatorConfig::new(cfg.h, build_kernel(2).unwrap(), cfg.batch, cfg.mode).unwrap();
        let mut state = OptimizerState::zeros(2);
        state.k = 6;
        state.x = vec![0.4, 0.2];
        state.x_ag = vec![0.0, -0.2];
        iterate(&mut state, &cfg, &est, &oracle, 0.1).unwrap();
        assert_eq!(state.x_md, vec![0.2, 0.0]);
        // Zero estimate: x is a fixed point.
        assert_eq!(state.x, vec![0.4, 0.2]);
    }

    #[test]
    fn constant_objective_stays_at_origin() {
        let oracle = NoisyOracle::new(Constant::new(3, -1.0), NoiseModel::None);
        let cfg = OptimizerConfig::new(20, 3, 0.1, 1.0, 1.0);
        let out = run(&cfg, &oracle, &build_kernel(4).unwrap()).unwrap();
        assert_eq!(out.x_ag, vec![0.0; 3]);
        assert_eq!(oracle.call_count(), cfg.planned_calls());
    }

    #[test]
    fn rejects_invalid_config() {
        let oracle = NoisyOracle::new(Constant::new(1, 0.0), NoiseModel::None);
        let k = build_kernel(2).unwrap();
        for cfg in [
            OptimizerConfig::new(0, 1, 0.1, 1.0, 1.0),
            OptimizerConfig::new(1, 0, 0.1, 1.0, 1.0),
            OptimizerConfig::new(1, 1, 0.0, 1.0, 1.0),
            OptimizerConfig::new(1, 1, 0.1, -1.0, 1.0),
            OptimizerConfig::new(1, 1, 0.1, 1.0, 0.0),
        ] {
            assert!(run(&cfg, &oracle, &k).is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn records_are_contiguous_and_counted() {
        let obj = Quadratic::new(vec![0.1; 4], 1.0).unwrap();
        let oracle = NoisyOracle::new(obj, NoiseModel::None);
        let cfg = OptimizerConfig::new(15, 5, 0.05, 1.0, 1.0);
        let out = run(&cfg, &oracle, &build_kernel(4).unwrap()).unwrap();
        for (k, rec) in out.trajectory.iter().enumerate() {
            assert_eq!(rec.iter, k);
            assert_eq!(rec.oracle_calls, 10 * (k as u64 + 1));
            assert!(rec.x_norm <= 1.0);
        }
    }
}
