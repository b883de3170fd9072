//! Experiment configuration: a flat `key=value` file, overridden by flags.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use azo_core::optimizer::StepRule;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}: {reason}")]
    Value { key: String, value: String, reason: String },
    #[error("{field}: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn value_error(key: &str, value: &str, reason: impl ToString) -> ConfigError {
    ConfigError::Value {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Logistic,
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Hs,
    Baseline,
    Both,
}

impl Algo {
    pub fn members(self) -> &'static [Method] {
        match self {
            Algo::Hs => &[Method::Hs],
            Algo::Baseline => &[Method::Baseline],
            Algo::Both => &[Method::Hs, Method::Baseline],
        }
    }
}

/// A single algorithm of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Hs,
    Baseline,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Hs => "hs",
            Method::Baseline => "baseline",
        }
    }

    pub(crate) fn stream_id(self) -> u64 {
        match self {
            Method::Hs => 0,
            Method::Baseline => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HChoice {
    /// Theory value for the method's own kernel order.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseChoice {
    None,
    Det,
    Stoch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryChoice {
    Constant,
    Oscillatory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub n: usize,
    pub d: usize,
    pub data_seed: u64,
    /// Load the dataset from this CSV instead of generating it.
    pub data: Option<PathBuf>,
    pub margin: f64,
    pub intercept: bool,
    pub algo: Algo,
    pub beta: u32,
    pub iters: usize,
    pub batches: Vec<usize>,
    pub h: HChoice,
    pub eps: f64,
    pub noise: NoiseChoice,
    pub adversary: AdversaryChoice,
    pub delta: f64,
    pub sigma_star: f64,
    pub radius: f64,
    pub f_star: f64,
    pub step_rule: StepRule,
    pub seed: u64,
    pub out: PathBuf,
    pub plot: bool,
    pub log_y: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::Logistic,
            n: 100,
            d: 1000,
            data_seed: 0,
            data: None,
            margin: 4.0,
            intercept: false,
            algo: Algo::Both,
            beta: 4,
            iters: 1000,
            batches: vec![2000],
            h: HChoice::Auto,
            eps: 1e-2,
            noise: NoiseChoice::Stoch,
            adversary: AdversaryChoice::Oscillatory,
            delta: 1e-4,
            sigma_star: 0.0,
            radius: 10.0,
            f_star: 0.0,
            step_rule: StepRule::Growing,
            seed: 0,
            out: PathBuf::from("out"),
            plot: false,
            log_y: false,
        }
    }
}

/// Every key accepted in config files and manifests.
pub const KEYS: &[&str] = &[
    "problem", "n", "d", "data_seed", "data", "margin", "intercept", "algo", "beta", "iters", "batch", "h", "eps",
    "noise", "adversary", "delta", "sigma_star", "radius", "fstar", "step_rule", "seed", "out", "plot", "log_y",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| value_error(key, value, e))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(value_error(key, value, "expected true or false")),
    }
}

impl FromStr for ProblemKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "logistic" => Ok(Self::Logistic),
            "quadratic" => Ok(Self::Quadratic),
            _ => Err("expected logistic or quadratic".into()),
        }
    }
}

impl FromStr for Algo {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "hs" => Ok(Self::Hs),
            "baseline" => Ok(Self::Baseline),
            "both" => Ok(Self::Both),
            _ => Err("expected hs, baseline or both".into()),
        }
    }
}

impl FromStr for HChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        match s.parse::<f64>() {
            Ok(h) if h > 0.0 && h.is_finite() => Ok(Self::Fixed(h)),
            _ => Err("expected auto or a positive number".into()),
        }
    }
}

impl FromStr for NoiseChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(Self::None),
            "det" => Ok(Self::Det),
            "stoch" => Ok(Self::Stoch),
            _ => Err("expected none, det or stoch".into()),
        }
    }
}

impl FromStr for AdversaryChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "constant" => Ok(Self::Constant),
            "oscillatory" => Ok(Self::Oscillatory),
            _ => Err("expected constant or oscillatory".into()),
        }
    }
}

pub fn parse_step_rule(s: &str) -> Result<StepRule, String> {
    match s {
        "growing" => Ok(StepRule::Growing),
        "constant" => Ok(StepRule::Constant),
        _ => Err("expected growing or constant".into()),
    }
}

fn step_rule_name(rule: StepRule) -> &'static str {
    match rule {
        StepRule::Growing => "growing",
        StepRule::Constant => "constant",
    }
}

impl ExperimentConfig {
    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.replace('-', "_");
        let k = key.as_str();
        match k {
            "problem" => self.problem = parse(k, value)?,
            "n" => self.n = parse(k, value)?,
            "d" => self.d = parse(k, value)?,
            "data_seed" => self.data_seed = parse(k, value)?,
            "data" => self.data = if value.is_empty() { None } else { Some(PathBuf::from(value)) },
            "margin" => self.margin = parse(k, value)?,
            "intercept" => self.intercept = parse_bool(k, value)?,
            "algo" => self.algo = parse(k, value)?,
            "beta" => self.beta = parse(k, value)?,
            "iters" => self.iters = parse(k, value)?,
            "batch" => {
                self.batches = value
                    .split(',')
                    .map(|b| parse::<usize>(k, b.trim()))
                    .collect::<Result<_, _>>()?
            }
            "h" => self.h = parse(k, value)?,
            "eps" => self.eps = parse(k, value)?,
            "noise" => self.noise = parse(k, value)?,
            "adversary" => self.adversary = parse(k, value)?,
            "delta" => self.delta = parse(k, value)?,
            "sigma_star" => self.sigma_star = parse(k, value)?,
            "radius" => self.radius = parse(k, value)?,
            "fstar" | "f_star" => self.f_star = parse(k, value)?,
            "step_rule" => self.step_rule = parse_step_rule(value).map_err(|e| value_error(k, value, e))?,
            "seed" => self.seed = parse(k, value)?,
            "out" => self.out = PathBuf::from(value),
            "plot" => self.plot = parse_bool(k, value)?,
            "log_y" => self.log_y = parse_bool(k, value)?,
            _ => return Err(ConfigError::UnknownKey(key)),
        }
        Ok(())
    }

    /// Applies a config file's settings on top of `self`. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |field, reason: &str| Err(ConfigError::Invalid { field, reason: reason.into() });
        if self.data.is_none() && (self.n == 0 || self.d == 0) {
            return invalid("n/d", "must be at least 1");
        }
        if self.beta < 2 {
            return invalid("beta", "must be at least 2");
        }
        if self.iters == 0 {
            return invalid("iters", "must be at least 1");
        }
        if self.batches.is_empty() || self.batches.contains(&0) {
            return invalid("batch", "need a non-empty list of positive sizes");
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.eps) {
            return invalid("eps", "must be positive");
        }
        if !positive(self.radius) {
            return invalid("radius", "must be positive");
        }
        if !positive(self.margin) {
            return invalid("margin", "must be positive");
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return invalid("delta", "must be non-negative");
        }
        if !(self.sigma_star >= 0.0 && self.sigma_star.is_finite()) {
            return invalid("sigma_star", "must be non-negative");
        }
        if !(self.f_star >= 0.0 && self.f_star.is_finite()) {
            return invalid("fstar", "must be non-negative");
        }
        Ok(())
    }

    /// The configuration as `key=value` lines, readable by [`apply_text`].
    ///
    /// [`apply_text`]: ExperimentConfig::apply_text
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let problem = match self.problem {
            ProblemKind::Logistic => "logistic",
            ProblemKind::Quadratic => "quadratic",
        };
        let algo = match self.algo {
            Algo::Hs => "hs",
            Algo::Baseline => "baseline",
            Algo::Both => "both",
        };
        let h = match self.h {
            HChoice::Auto => "auto".to_string(),
            HChoice::Fixed(h) => h.to_string(),
        };
        let noise = match self.noise {
            NoiseChoice::None => "none",
            NoiseChoice::Det => "det",
            NoiseChoice::Stoch => "stoch",
        };
        let adversary = match self.adversary {
            AdversaryChoice::Constant => "constant",
            AdversaryChoice::Oscillatory => "oscillatory",
        };
        let batches: Vec<String> = self.batches.iter().map(|b| b.to_string()).collect();
        let data = self.data.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let _ = writeln!(s, "problem={problem}");
        let _ = writeln!(s, "n={}", self.n);
        let _ = writeln!(s, "d={}", self.d);
        let _ = writeln!(s, "data_seed={}", self.data_seed);
        let _ = writeln!(s, "data={data}");
        let _ = writeln!(s, "margin={}", self.margin);
        let _ = writeln!(s, "intercept={}", self.intercept);
        let _ = writeln!(s, "algo={algo}");
        let _ = writeln!(s, "beta={}", self.beta);
        let _ = writeln!(s, "iters={}", self.iters);
        let _ = writeln!(s, "batch={}", batches.join(","));
        let _ = writeln!(s, "h={h}");
        let _ = writeln!(s, "eps={}", self.eps);
        let _ = writeln!(s, "noise={noise}");
        let _ = writeln!(s, "adversary={adversary}");
        let _ = writeln!(s, "delta={}", self.delta);
        let _ = writeln!(s, "sigma_star={}", self.sigma_star);
        let _ = writeln!(s, "radius={}", self.radius);
        let _ = writeln!(s, "fstar={}", self.f_star);
        let _ = writeln!(s, "step_rule={}", step_rule_name(self.step_rule));
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "out={}", self.out.display());
        let _ = writeln!(s, "plot={}", self.plot);
        let _ = writeln!(s, "log_y={}", self.log_y);
        s
    }
}
