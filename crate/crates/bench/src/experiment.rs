//! Resolving a configuration into optimizer runs, executing them and writing
//! their artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use azo_core::kernel::{build_kernel, KernelError, KernelSpec};
use azo_core::optimizer::{run, OptimizerConfig, OptimizerError, RunOutput};
use azo_core::oracle::{Adversary, NoiseModel, NoisyOracle, Objective, SampleIndex, StochasticNoise};
use azo_core::problems::{generate_synthetic, DatasetError, LogisticRegression, ProblemError, Quadratic, SyntheticSpec};
use azo_core::sampling::{sample_direction, RngStream};
use azo_core::theory::{max_noise, smoothing_parameter, NoiseKind, Regime, TheoryError, TheoryInputs};
use azo_core::EstimatorMode;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::config::{AdversaryChoice, ConfigError, ExperimentConfig, HChoice, Method, NoiseChoice, ProblemKind};
use crate::data::{load_dataset, DataError};
use crate::plot::{render_svg, Series};

pub const CSV_HEADER: &str = "iter,oracle_calls,f_value,x_norm,elapsed_ms";
pub const MANIFEST_FILE: &str = "manifest.txt";
pub const PLOT_FILE: &str = "loss.svg";

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error("{method} with B = {batch}: {source}")]
    Optimizer {
        method: &'static str,
        batch: usize,
        source: OptimizerError,
    },
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl BenchError {
    /// Whether the failure stems from the configuration rather than the run.
    pub fn is_config(&self) -> bool {
        !matches!(self, BenchError::Optimizer { .. } | BenchError::Io { .. })
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io { path: path.to_path_buf(), source }
}

/// The objective of a benchmark problem.
#[derive(Debug, Clone)]
pub enum BenchObjective {
    Logistic(LogisticRegression),
    Quadratic(Quadratic),
}

impl Objective for BenchObjective {
    fn dim(&self) -> usize {
        match self {
            Self::Logistic(f) => f.dim(),
            Self::Quadratic(f) => f.dim(),
        }
    }

    fn value(&self, x: &[f64], xi: SampleIndex) -> f64 {
        match self {
            Self::Logistic(f) => f.value(x, xi),
            Self::Quadratic(f) => f.value(x, xi),
        }
    }

    fn num_samples(&self) -> usize {
        match self {
            Self::Logistic(f) => f.num_samples(),
            Self::Quadratic(f) => f.num_samples(),
        }
    }

    fn mean_value(&self, x: &[f64]) -> f64 {
        match self {
            Self::Logistic(f) => f.mean_value(x),
            Self::Quadratic(f) => f.mean_value(x),
        }
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        match self {
            Self::Logistic(f) => f.gradient(x),
            Self::Quadratic(f) => f.gradient(x),
        }
    }

    fn min_value(&self) -> Option<f64> {
        match self {
            Self::Logistic(f) => f.min_value(),
            Self::Quadratic(f) => f.min_value(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub objective: BenchObjective,
    /// Gradient Lipschitz constant `L`.
    pub smoothness: f64,
}

impl Problem {
    pub fn dim(&self) -> usize {
        self.objective.dim()
    }
}

/// Builds the configured problem: a loaded or synthetic logistic regression,
/// or a quadratic centred at a random point of norm `R/2`.
pub fn build_problem(cfg: &ExperimentConfig) -> Result<Problem, BenchError> {
    match cfg.problem {
        ProblemKind::Logistic => {
            let ds = match &cfg.data {
                Some(path) => load_dataset(path)?,
                None => generate_synthetic(&SyntheticSpec {
                    n: cfg.n,
                    d: cfg.d,
                    seed: cfg.data_seed,
                    margin: cfg.margin,
                    intercept: cfg.intercept,
                })?,
            };
            let f = LogisticRegression::new(ds)?;
            let smoothness = f.smoothness();
            Ok(Problem { objective: BenchObjective::Logistic(f), smoothness })
        }
        ProblemKind::Quadratic => {
            let mut rng = RngStream::new(cfg.data_seed).rng();
            let e = sample_direction(cfg.d, &mut rng).map_err(|_| ConfigError::Invalid {
                field: "d",
                reason: "must be at least 1".into(),
            })?;
            let center = e.iter().map(|v| 0.5 * cfg.radius * v).collect();
            let f = Quadratic::new(center, cfg.radius)?;
            Ok(Problem { smoothness: f.smoothness(), objective: BenchObjective::Quadratic(f) })
        }
    }
}

pub fn regime_for(batch: usize, iters: usize) -> Regime {
    match batch {
        1 => Regime::Single,
        b if b < iters => Regime::Moderate,
        b if b == iters => Regime::Balanced,
        _ => Regime::Over,
    }
}

/// Fully resolved parameters of one `(method, B)` run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedRun {
    pub method: Method,
    pub batch: usize,
    /// Kernel order used by this method.
    pub beta: u32,
    pub h: f64,
    pub gamma: f64,
    pub seed: u64,
    pub regime: Regime,
    /// Admissible noise level for the configured noise kind, if any.
    pub delta_max: Option<f64>,
}

impl ResolvedRun {
    pub fn file_stem(&self) -> String {
        format!("{}_B{}", self.method.name(), self.batch)
    }

    pub fn warning(&self, delta: f64) -> Option<String> {
        let max = self.delta_max?;
        (delta > max).then(|| {
            format!(
                "{}: delta {delta:e} exceeds the admissible level {max:e} for this regime; the bound is advisory",
                self.file_stem()
            )
        })
    }
}

fn method_kernel(cfg: &ExperimentConfig, method: Method) -> Result<KernelSpec, KernelError> {
    match method {
        Method::Hs => build_kernel(cfg.beta),
        Method::Baseline => build_kernel(2),
    }
}

fn run_seed(master: u64, method: Method, batch: usize) -> u64 {
    RngStream::new(master).child(method.stream_id()).child(batch as u64).rng().next_u64()
}

pub fn resolve(cfg: &ExperimentConfig, problem: &Problem, method: Method, batch: usize) -> Result<ResolvedRun, BenchError> {
    let kernel = method_kernel(cfg, method)?;
    let inputs = TheoryInputs::new(cfg.eps, problem.smoothness, cfg.radius, problem.dim(), &kernel)
        .with_sigma_star(Some(cfg.sigma_star))
        .with_regime(regime_for(batch, cfg.iters))
        .with_batch(batch as u64)
        .with_delta(cfg.delta);
    let h = match cfg.h {
        HChoice::Auto => smoothing_parameter(&inputs)?,
        HChoice::Fixed(h) => h,
    };
    let delta_max = match cfg.noise {
        NoiseChoice::None => None,
        NoiseChoice::Det => Some(max_noise(&inputs.clone().with_noise(NoiseKind::Deterministic))?),
        NoiseChoice::Stoch => Some(max_noise(&inputs.clone().with_noise(NoiseKind::Stochastic))?),
    };
    let opt = optimizer_config(cfg, problem, method, batch, h);
    let gamma = opt.gamma().map_err(|source| BenchError::Optimizer { method: method.name(), batch, source })?;
    Ok(ResolvedRun {
        method,
        batch,
        beta: kernel.beta(),
        h,
        gamma,
        seed: opt.master_seed,
        regime: inputs.regime,
        delta_max,
    })
}

fn optimizer_config(cfg: &ExperimentConfig, problem: &Problem, method: Method, batch: usize, h: f64) -> OptimizerConfig {
    let mode = match method {
        Method::Hs => EstimatorMode::Kernel,
        Method::Baseline => EstimatorMode::SmoothBaseline,
    };
    OptimizerConfig::new(cfg.iters, batch, h, cfg.radius, problem.smoothness)
        .with_seed(run_seed(cfg.seed, method, batch))
        .with_f_star(cfg.f_star)
        .with_mode(mode)
        .with_step_rule(cfg.step_rule)
}

/// The oracle noise of a run. The oscillatory adversary's frequency vector
/// depends only on the master seed; its scale is the run's own `h`.
pub fn noise_model(cfg: &ExperimentConfig, dim: usize, h: f64) -> NoiseModel {
    match cfg.noise {
        NoiseChoice::None => NoiseModel::None,
        NoiseChoice::Stoch => NoiseModel::Stochastic(StochasticNoise::ClippedGaussian { delta: cfg.delta }),
        NoiseChoice::Det => match cfg.adversary {
            AdversaryChoice::Constant => NoiseModel::Deterministic(Adversary::Constant { delta: cfg.delta }),
            AdversaryChoice::Oscillatory => {
                let mut rng = RngStream::new(cfg.seed).child(2).rng();
                let direction = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
                NoiseModel::Deterministic(Adversary::Oscillatory {
                    delta: cfg.delta,
                    direction,
                    scale: h,
                })
            }
        },
    }
}

#[derive(Debug, Clone)]
pub struct MethodRun {
    pub resolved: ResolvedRun,
    pub output: RunOutput,
}

impl MethodRun {
    pub fn final_value(&self) -> f64 {
        self.output.final_value().unwrap_or(f64::NAN)
    }
}

/// Executes one resolved run.
pub fn execute(cfg: &ExperimentConfig, problem: &Problem, resolved: &ResolvedRun) -> Result<RunOutput, BenchError> {
    let kernel = method_kernel(cfg, resolved.method)?;
    let opt = optimizer_config(cfg, problem, resolved.method, resolved.batch, resolved.h);
    let oracle = NoisyOracle::new(&problem.objective, noise_model(cfg, problem.dim(), resolved.h));
    run(&opt, &oracle, &kernel).map_err(|source| BenchError::Optimizer {
        method: resolved.method.name(),
        batch: resolved.batch,
        source,
    })
}

/// Runs every `(method, B)` pair of the configuration, batch-major.
pub fn run_all(cfg: &ExperimentConfig, problem: &Problem) -> Result<Vec<MethodRun>, BenchError> {
    cfg.validate()?;
    let mut runs = Vec::new();
    for &batch in &cfg.batches {
        for &method in cfg.algo.members() {
            let resolved = resolve(cfg, problem, method, batch)?;
            let output = execute(cfg, problem, &resolved)?;
            runs.push(MethodRun { resolved, output });
        }
    }
    Ok(runs)
}

pub fn trajectory_csv(output: &RunOutput) -> String {
    let mut s = String::with_capacity(48 * (output.trajectory.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in &output.trajectory {
        let _ = writeln!(s, "{},{},{},{},{:.3}", r.iter, r.oracle_calls, r.f_value, r.x_norm, r.elapsed_ms);
    }
    s
}

pub fn manifest_text(cfg: &ExperimentConfig, problem: &Problem, runs: &[ResolvedRun]) -> String {
    let mut s = cfg.to_text();
    let _ = writeln!(s, "# resolved: L={} dim={}", problem.smoothness, problem.dim());
    for r in runs {
        let dmax = r.delta_max.map_or("-".to_string(), |v| format!("{v:e}"));
        let _ = writeln!(
            s,
            "# resolved: {} beta={} h={} gamma={} regime={} delta_max={} run_seed={}",
            r.file_stem(),
            r.beta,
            r.h,
            r.gamma,
            r.regime.name(),
            dmax,
            r.seed
        );
    }
    for r in runs {
        if let Some(w) = r.warning(cfg.delta) {
            let _ = writeln!(s, "# warning: {w}");
        }
    }
    s
}

/// Files written by [`run_experiment`].
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub csvs: Vec<PathBuf>,
    pub manifest: PathBuf,
    pub plot: Option<PathBuf>,
    pub runs: Vec<MethodRun>,
}

/// Runs the configuration and writes one CSV per run, the manifest and,
/// when requested, the SVG plot into `cfg.out`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Artifacts, BenchError> {
    cfg.validate()?;
    let problem = build_problem(cfg)?;
    // Resolve everything up front so configuration errors surface before
    // any long run starts.
    let mut resolved = Vec::new();
    for &batch in &cfg.batches {
        for &method in cfg.algo.members() {
            resolved.push(resolve(cfg, &problem, method, batch)?);
        }
    }
    fs::create_dir_all(&cfg.out).map_err(io_error(&cfg.out))?;
    let manifest = cfg.out.join(MANIFEST_FILE);
    fs::write(&manifest, manifest_text(cfg, &problem, &resolved)).map_err(io_error(&manifest))?;

    let mut runs = Vec::new();
    let mut csvs = Vec::new();
    for r in resolved {
        let output = execute(cfg, &problem, &r)?;
        let path = cfg.out.join(format!("{}.csv", r.file_stem()));
        fs::write(&path, trajectory_csv(&output)).map_err(io_error(&path))?;
        csvs.push(path);
        runs.push(MethodRun { resolved: r, output });
    }

    let plot = if cfg.plot {
        let series: Vec<Series> = runs
            .iter()
            .map(|r| Series {
                label: r.resolved.file_stem(),
                points: r.output.trajectory.iter().map(|t| (t.iter as f64, t.f_value)).collect(),
            })
            .collect();
        let path = cfg.out.join(PLOT_FILE);
        let svg = render_svg(&series, cfg.log_y, "training loss", "iteration", "f(x_ag)");
        fs::write(&path, svg).map_err(io_error(&path))?;
        Some(path)
    } else {
        None
    };
    Ok(Artifacts { csvs, manifest, plot, runs })
}
