//! Theory-driven parameter tables.

use std::fmt::Write as _;

use azo_core::kernel::build_kernel;
use azo_core::theory::{complexity, max_noise, smoothing_parameter, NoiseKind, Regime, TheoryInputs};
use serde_json::{json, Value};

use crate::experiment::BenchError;

#[derive(Debug, Clone, PartialEq)]
pub struct PlanInput {
    pub eps: f64,
    pub smoothness: f64,
    pub radius: f64,
    pub dim: usize,
    pub beta: u32,
    /// Batch size of the `1 < B < N` and `B > N` rows.
    pub batch: u64,
    pub sigma_star: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanRow {
    pub regime: Regime,
    pub h: f64,
    pub delta_max_det: f64,
    pub delta_max_stoch: f64,
    pub iterations: u64,
    pub oracle_calls: u64,
    pub batch: u64,
}

pub fn plan(input: &PlanInput) -> Result<Vec<PlanRow>, BenchError> {
    let kernel = build_kernel(input.beta)?;
    let base = TheoryInputs::new(input.eps, input.smoothness, input.radius, input.dim, &kernel)
        .with_sigma_star(Some(input.sigma_star))
        .with_batch(input.batch)
        .with_delta(input.delta);
    Regime::ALL
        .iter()
        .map(|&regime| {
            let ti = base.clone().with_regime(regime);
            let c = complexity(&ti)?;
            Ok(PlanRow {
                regime,
                h: smoothing_parameter(&ti)?,
                delta_max_det: max_noise(&ti.clone().with_noise(NoiseKind::Deterministic))?,
                delta_max_stoch: max_noise(&ti.clone().with_noise(NoiseKind::Stochastic))?,
                iterations: c.iterations,
                oracle_calls: c.oracle_calls,
                batch: c.batch,
            })
        })
        .collect()
}

pub fn plan_table(rows: &[PlanRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<10} {:>12} {:>14} {:>14} {:>12} {:>14} {:>10}",
        "regime", "h", "delta_max_det", "delta_max_sto", "N", "T", "B"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<10} {:>12.5e} {:>14.5e} {:>14.5e} {:>12} {:>14} {:>10}",
            r.regime.name(),
            r.h,
            r.delta_max_det,
            r.delta_max_stoch,
            r.iterations,
            r.oracle_calls,
            r.batch
        );
    }
    s
}

pub fn plan_json(input: &PlanInput, rows: &[PlanRow]) -> Value {
    json!({
        "eps": input.eps,
        "L": input.smoothness,
        "R": input.radius,
        "d": input.dim,
        "beta": input.beta,
        "sigma_star": input.sigma_star,
        "delta": input.delta,
        "regimes": rows.iter().map(|r| json!({
            "regime": r.regime.name(),
            "h": r.h,
            "delta_max_det": r.delta_max_det,
            "delta_max_stoch": r.delta_max_stoch,
            "N": r.iterations,
            "T": r.oracle_calls,
            "B": r.batch,
        })).collect::<Vec<_>>(),
    })
}
