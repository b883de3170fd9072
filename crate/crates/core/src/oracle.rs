//! Zero-order oracles: objectives seen only through (noisy) function values.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;
use core::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use crate::sampling::RngStream;

/// Index of the random sample `ξ` that an objective is evaluated at.
///
/// For finite-sum objectives this is a data index; objectives without
/// randomness ignore it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SampleIndex(pub usize);

/// A stochastic objective `f(x, ξ)` whose mean `E_ξ f(x, ξ)` is minimized.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    /// `f(x, ξ)`; deterministic in `(x, ξ)`.
    fn value(&self, x: &[f64], xi: SampleIndex) -> f64;

    /// Number of distinct `ξ`; the estimator draws `ξ` uniformly from
    /// `0..num_samples()`.
    fn num_samples(&self) -> usize {
        1
    }

    /// Noise-free `E_ξ f(x, ξ)`, used for diagnostics only.
    fn mean_value(&self, x: &[f64]) -> f64 {
        let n = self.num_samples();
        (0..n).map(|i| self.value(x, SampleIndex(i))).sum::<f64>() / n as f64
    }

    /// Exact gradient of the mean objective, when known.
    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Minimum value `f*`, when known.
    fn min_value(&self) -> Option<f64> {
        None
    }

    /// Bound `R` on the distance of a minimizer from the origin, when known.
    fn solution_radius(&self) -> Option<f64> {
        None
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64], xi: SampleIndex) -> f64 {
        (**self).value(x, xi)
    }
    fn num_samples(&self) -> usize {
        (**self).num_samples()
    }
    fn mean_value(&self, x: &[f64]) -> f64 {
        (**self).mean_value(x)
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        (**self).gradient(x)
    }
    fn min_value(&self) -> Option<f64> {
        (**self).min_value()
    }
    fn solution_radius(&self) -> Option<f64> {
        (**self).solution_radius()
    }
}

type AdversaryFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type SamplerFn = dyn Fn(&mut dyn RngCore) -> f64 + Send + Sync;

/// Deterministic noise `δ(x)` with `|δ(x)| ≤ Δ`.
pub enum Adversary {
    /// `δ(x) = Δ`.
    Constant { delta: f64 },
    /// `δ(x) = Δ sin(⟨v, x⟩ / scale)`.
    Oscillatory { delta: f64, direction: Vec<f64>, scale: f64 },
    /// User-supplied `δ`; the bound is checked on every query.
    Custom { delta: f64, noise: Box<AdversaryFn> },
}

impl Adversary {
    pub fn bound(&self) -> f64 {
        match self {
            Adversary::Constant { delta } | Adversary::Oscillatory { delta, .. } | Adversary::Custom { delta, .. } => {
                *delta
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Adversary::Constant { delta } => *delta,
            Adversary::Oscillatory { delta, direction, scale } => {
                let s: f64 = direction.iter().zip(x).map(|(v, x)| v * x).sum();
                delta * libm::sin(s / scale)
            }
            Adversary::Custom { noise, .. } => noise(x),
        }
    }
}

impl fmt::Debug for Adversary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Adversary::Constant { delta } => f.debug_struct("Constant").field("delta", delta).finish(),
            Adversary::Oscillatory { delta, direction, scale } => f
                .debug_struct("Oscillatory")
                .field("delta", delta)
                .field("dim", &direction.len())
                .field("scale", scale)
                .finish(),
            Adversary::Custom { delta, .. } => f.debug_struct("Custom").field("delta", delta).finish_non_exhaustive(),
        }
    }
}

/// Stochastic noise with `E[δ²] ≤ Δ²`, drawn fresh on every query.
pub enum StochasticNoise {
    /// `N(0, Δ²)` clipped to `[-Δ, Δ]`.
    ClippedGaussian { delta: f64 },
    Custom { delta: f64, sampler: Box<SamplerFn> },
}

impl StochasticNoise {
    pub fn bound(&self) -> f64 {
        match self {
            StochasticNoise::ClippedGaussian { delta } | StochasticNoise::Custom { delta, .. } => *delta,
        }
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            StochasticNoise::ClippedGaussian { delta } => {
                let z: f64 = rng.sample(StandardNormal);
                (delta * z).clamp(-delta, *delta)
            }
            StochasticNoise::Custom { sampler, .. } => sampler(rng),
        }
    }
}

impl fmt::Debug for StochasticNoise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StochasticNoise::ClippedGaussian { delta } => {
                f.debug_struct("ClippedGaussian").field("delta", delta).finish()
            }
            StochasticNoise::Custom { delta, .. } => f.debug_struct("Custom").field("delta", delta).finish_non_exhaustive(),
        }
    }
}

#[derive(Debug, Default)]
pub enum NoiseModel {
    #[default]
    None,
    Deterministic(Adversary),
    Stochastic(StochasticNoise),
}

impl NoiseModel {
    /// The bound `Δ` (zero without noise).
    pub fn delta(&self) -> f64 {
        match self {
            NoiseModel::None => 0.0,
            NoiseModel::Deterministic(a) => a.bound(),
            NoiseModel::Stochastic(s) => s.bound(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("objective is not finite ({value}) at a point of dimension {} with norm {}", .x.len(), norm(.x))]
    NonFinite { x: Vec<f64>, value: f64 },
    #[error("adversarial noise {value} exceeds the bound {delta}")]
    NoiseBound { value: f64, delta: f64 },
    #[error("query of dimension {got} for an objective of dimension {expected}")]
    Dimension { expected: usize, got: usize },
}

fn norm(x: &[f64]) -> f64 {
    libm::sqrt(x.iter().map(|v| v * v).sum())
}

/// An objective behind a noisy zero-order oracle with an exact call counter.
#[derive(Debug)]
pub struct NoisyOracle<O> {
    objective: O,
    noise: NoiseModel,
    calls: AtomicU64,
}

impl<O: Objective> NoisyOracle<O> {
    pub fn new(objective: O, noise: NoiseModel) -> Self {
        Self {
            objective,
            noise,
            calls: AtomicU64::new(0),
        }
    }

    pub fn objective(&self) -> &O {
        &self.objective
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    /// `f(x, ξ) + δ`. Stochastic noise is drawn from `stream`, so two
    /// queries that must carry independent noise need distinct streams.
    pub fn query(&self, x: &[f64], xi: SampleIndex, stream: &RngStream) -> Result<f64, OracleError> {
        if x.len() != self.objective.dim() {
            return Err(OracleError::Dimension {
                expected: self.objective.dim(),
                got: x.len(),
            });
        }
        self.calls.fetch_add(1, Ordering::Relaxed);
        let value = self.objective.value(x, xi);
        if !value.is_finite() {
            return Err(OracleError::NonFinite { x: x.to_vec(), value });
        }
        let delta = match &self.noise {
            NoiseModel::None => 0.0,
            NoiseModel::Deterministic(adv) => {
                let v = adv.eval(x);
                if !(v.abs() <= adv.bound()) {
                    return Err(OracleError::NoiseBound {
                        value: v,
                        delta: adv.bound(),
                    });
                }
                v
            }
            NoiseModel::Stochastic(s) => s.draw(&mut stream.rng()),
        };
        Ok(value + delta)
    }

    /// Queries issued since construction or the last [`reset_count`](Self::reset_count).
    pub fn call_count(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset_count(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }

    pub fn into_objective(self) -> O {
        self.objective
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    struct Zero(usize);

    impl Objective for Zero {
        fn dim(&self) -> usize {
            self.0
        }
        fn value(&self, _x: &[f64], _xi: SampleIndex) -> f64 {
            0.0
        }
    }

    struct Blowup;

    impl Objective for Blowup {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, x: &[f64], _xi: SampleIndex) -> f64 {
            1.0 / x[0]
        }
    }

    #[test]
    fn constant_adversary_adds_delta() {
        let oracle = NoisyOracle::new(Zero(3), NoiseModel::Deterministic(Adversary::Constant { delta: 0.25 }));
        let v = oracle.query(&[1.0, 2.0, 3.0], SampleIndex(0), &RngStream::new(0)).unwrap();
        assert_eq!(v, 0.25);
    }

    #[test]
    fn no_noise_is_exact_and_counted() {
        let oracle = NoisyOracle::new(Zero(2), NoiseModel::None);
        assert_eq!(oracle.call_count(), 0);
        assert_eq!(oracle.query(&[0.5, 0.5], SampleIndex(0), &RngStream::new(0)).unwrap(), 0.0);
        assert_eq!(oracle.call_count(), 1);
        oracle.reset_count();
        assert_eq!(oracle.call_count(), 0);
    }

    #[test]
    fn adversary_bound_violation_is_reported() {
        let adv = Adversary::Custom {
            delta: 0.1,
            noise: Box::new(|x: &[f64]| x[0]),
        };
        let oracle = NoisyOracle::new(Zero(1), NoiseModel::Deterministic(adv));
        assert!(oracle.query(&[0.05], SampleIndex(0), &RngStream::new(0)).is_ok());
        assert_eq!(
            oracle.query(&[0.5], SampleIndex(0), &RngStream::new(0)),
            Err(OracleError::NoiseBound { value: 0.5, delta: 0.1 })
        );
    }

    #[test]
    fn oscillatory_adversary_is_bounded() {
        let adv = Adversary::Oscillatory {
            delta: 0.01,
            direction: vec![3.0, -1.0],
            scale: 1e-3,
        };
        let oracle = NoisyOracle::new(Zero(2), NoiseModel::Deterministic(adv));
        let mut rng = RngStream::new(4).rng();
        for _ in 0..1000 {
            let x = [rng.random::<f64>(), rng.random::<f64>()];
            let v = oracle.query(&x, SampleIndex(0), &RngStream::new(0)).unwrap();
            assert!(v.abs() <= 0.01);
        }
    }

    #[test]
    fn non_finite_value_names_point() {
        let oracle = NoisyOracle::new(Blowup, NoiseModel::None);
        match oracle.query(&[0.0], SampleIndex(0), &RngStream::new(0)) {
            Err(OracleError::NonFinite { x, .. }) => assert_eq!(x, vec![0.0]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dimension_mismatch() {
        let oracle = NoisyOracle::new(Zero(2), NoiseModel::None);
        assert!(matches!(
            oracle.query(&[0.0], SampleIndex(0), &RngStream::new(0)),
            Err(OracleError::Dimension { expected: 2, got: 1 })
        ));
        assert_eq!(oracle.call_count(), 0);
    }

    #[test]
    fn clipped_gaussian_second_moment_below_bound() {
        let delta = 0.1;
        let noise = StochasticNoise::ClippedGaussian { delta };
        let mut rng = RngStream::new(17).rng();
        let m = 100_000;
        let mut sq = 0.0;
        for _ in 0..m {
            let v = noise.draw(&mut rng);
            assert!(v.abs() <= delta);
            sq += v * v;
        }
        assert!(sq / m as f64 <= delta * delta * 1.05);
    }

    #[test]
    fn stochastic_noise_mean_is_centered() {
        let delta = 0.1;
        let oracle = NoisyOracle::new(
            Zero(1),
            NoiseModel::Stochastic(StochasticNoise::ClippedGaussian { delta }),
        );
        let root = RngStream::new(23);
        let m = 100_000;
        let mut sum = 0.0;
        for i in 0..m {
            sum += oracle.query(&[0.0], SampleIndex(0), &root.child(i)).unwrap();
        }
        let mean = sum / m as f64;
        assert!(mean.abs() <= 3.0 * delta / libm::sqrt(m as f64), "{mean}");
        assert_eq!(oracle.call_count(), m);
    }
}
