use std::path::PathBuf;
use std::process::ExitCode;

use azo_bench::config::{ConfigError, ExperimentConfig};
use azo_bench::data::save_dataset;
use azo_bench::experiment::{build_problem, run_experiment, BenchError};
use azo_bench::plan::{plan, plan_json, plan_table, PlanInput};
use azo_core::problems::{generate_synthetic, SyntheticSpec};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(name = "azo-bench", version, about = "Zero-order optimization benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured methods and write CSV trajectories.
    Run(RunArgs),
    /// Print theory-derived parameters for every batch regime.
    Plan(PlanArgs),
    /// Generate a synthetic classification dataset as CSV.
    GenData(GenArgs),
}

/// Settings shared by `run` and `plan`; each overrides the config file.
#[derive(Args)]
struct Common {
    /// key=value config file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// logistic or quadratic.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    data_seed: Option<u64>,
    /// Dataset CSV to load instead of generating one.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    margin: Option<f64>,
    #[arg(long)]
    intercept: bool,
    #[arg(long)]
    beta: Option<u32>,
    #[arg(long)]
    iters: Option<usize>,
    /// Batch size; repeat or separate with commas for a sweep.
    #[arg(long, value_delimiter = ',')]
    batch: Vec<usize>,
    /// Target accuracy used for theory-driven parameters.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    sigma_star: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// hs, baseline or both.
    #[arg(long)]
    algo: Option<String>,
    /// auto or a positive smoothing parameter.
    #[arg(long)]
    h: Option<String>,
    /// none, det or stoch.
    #[arg(long)]
    noise: Option<String>,
    /// Deterministic adversary: oscillatory or constant.
    #[arg(long)]
    adversary: Option<String>,
    #[arg(long)]
    fstar: Option<f64>,
    /// growing (γ_k) or constant (γ).
    #[arg(long)]
    step_rule: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    plot: bool,
    #[arg(long)]
    log_y: bool,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    common: Common,
    /// Smoothness constant; computed from the problem when omitted.
    #[arg(long = "smoothness", short = 'L')]
    smoothness: Option<f64>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    data_seed: u64,
    #[arg(long, default_value_t = 4.0)]
    margin: f64,
    #[arg(long)]
    intercept: bool,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

fn overrides(c: &Common) -> Vec<(&'static str, String)> {
    let mut v = Vec::new();
    let mut push = |k: &'static str, val: Option<String>| {
        if let Some(val) = val {
            v.push((k, val));
        }
    };
    push("problem", c.problem.clone());
    push("n", c.n.map(|x| x.to_string()));
    push("d", c.d.map(|x| x.to_string()));
    push("data_seed", c.data_seed.map(|x| x.to_string()));
    push("data", c.data.as_ref().map(|p| p.display().to_string()));
    push("margin", c.margin.map(|x| x.to_string()));
    push("intercept", c.intercept.then(|| "true".into()));
    push("beta", c.beta.map(|x| x.to_string()));
    push("iters", c.iters.map(|x| x.to_string()));
    let batches: Vec<String> = c.batch.iter().map(|b| b.to_string()).collect();
    push("batch", (!batches.is_empty()).then(|| batches.join(",")));
    push("eps", c.eps.map(|x| x.to_string()));
    push("delta", c.delta.map(|x| x.to_string()));
    push("sigma_star", c.sigma_star.map(|x| x.to_string()));
    push("radius", c.radius.map(|x| x.to_string()));
    v
}

fn load_config(common: &Common, extra: Vec<(&'static str, String)>) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &common.config {
        cfg.apply_file(path)?;
    }
    for (k, v) in overrides(common).into_iter().chain(extra) {
        cfg.set(k, &v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_run(args: RunArgs) -> Result<(), BenchError> {
    let mut extra = Vec::new();
    let mut push = |k: &'static str, val: Option<String>| {
        if let Some(val) = val {
            extra.push((k, val));
        }
    };
    push("algo", args.algo);
    push("h", args.h);
    push("noise", args.noise);
    push("adversary", args.adversary);
    push("fstar", args.fstar.map(|x| x.to_string()));
    push("step_rule", args.step_rule);
    push("seed", args.seed.map(|x| x.to_string()));
    push("out", args.out.map(|p| p.display().to_string()));
    push("plot", args.plot.then(|| "true".into()));
    push("log_y", args.log_y.then(|| "true".into()));
    let cfg = load_config(&args.common, extra)?;
    let art = run_experiment(&cfg)?;
    if args.common.json {
        let runs: Vec<_> = art
            .runs
            .iter()
            .zip(&art.csvs)
            .map(|(r, path)| {
                json!({
                    "method": r.resolved.method.name(),
                    "batch": r.resolved.batch,
                    "beta": r.resolved.beta,
                    "h": r.resolved.h,
                    "gamma": r.resolved.gamma,
                    "regime": r.resolved.regime.name(),
                    "delta_max": r.resolved.delta_max,
                    "final_loss": r.final_value(),
                    "csv": path.display().to_string(),
                })
            })
            .collect();
        let out = json!({ "manifest": art.manifest.display().to_string(), "runs": runs });
        println!("{}", serde_json::to_string_pretty(&out).expect("json serialization"));
    } else {
        for (r, path) in art.runs.iter().zip(&art.csvs) {
            println!(
                "{:<16} h={:<12.5e} gamma={:<12.5e} final f={:.6e}  {}",
                r.resolved.file_stem(),
                r.resolved.h,
                r.resolved.gamma,
                r.final_value(),
                path.display()
            );
            if let Some(w) = r.resolved.warning(cfg.delta) {
                println!("  warning: {w}");
            }
        }
        println!("manifest: {}", art.manifest.display());
        if let Some(p) = &art.plot {
            println!("plot: {}", p.display());
        }
    }
    Ok(())
}

fn cmd_plan(args: PlanArgs) -> Result<(), BenchError> {
    let cfg = load_config(&args.common, Vec::new())?;
    let (smoothness, dim) = match args.smoothness {
        Some(l) => (l, cfg.d),
        None => {
            let p = build_problem(&cfg)?;
            (p.smoothness, p.dim())
        }
    };
    let input = PlanInput {
        eps: cfg.eps,
        smoothness,
        radius: cfg.radius,
        dim,
        beta: cfg.beta,
        batch: cfg.batches[0] as u64,
        sigma_star: cfg.sigma_star,
        delta: cfg.delta,
    };
    let rows = plan(&input)?;
    if args.common.json {
        println!("{}", serde_json::to_string_pretty(&plan_json(&input, &rows)).expect("json serialization"));
    } else {
        println!(
            "eps={} L={} R={} d={} beta={} B={} sigma*={} delta={}",
            input.eps, input.smoothness, input.radius, input.dim, input.beta, input.batch, input.sigma_star, input.delta
        );
        print!("{}", plan_table(&rows));
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), BenchError> {
    let spec = SyntheticSpec { n: args.n, d: args.d, seed: args.data_seed, margin: args.margin, intercept: args.intercept };
    let ds = generate_synthetic(&spec).map_err(|e| ConfigError::Invalid { field: "n/d", reason: e.to_string() })?;
    save_dataset(&ds, &args.out)?;
    println!("wrote {} samples x {} features to {}", ds.n(), ds.d(), args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Plan(a) => cmd_plan(a),
        Command::GenData(a) => cmd_gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
