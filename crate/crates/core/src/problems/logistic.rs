//! Logistic regression with the mean-loss convention.
//!
//! The model probability is `p_i = 1 / (1 + exp(⟨w, X_i⟩))`, so a sample's
//! loss is `y softplus(z) + (1 − y) softplus(−z)` with `z = ⟨w, X_i⟩`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{dot, norm, sigmoid, softplus};
use crate::oracle::{Objective, SampleIndex};
use crate::sampling::RngStream;

const POWER_TOL: f64 = 1e-8;
const POWER_MAX_ITERS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DatasetError {
    #[error("dataset needs at least one sample and one feature (n = {n}, d = {d})")]
    Empty { n: usize, d: usize },
    #[error("feature buffer has {got} entries, expected {expected}")]
    Shape { expected: usize, got: usize },
    #[error("label {label} at row {row} is not 0 or 1")]
    Label { row: usize, label: u8 },
    #[error("non-finite feature at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("feature matrix is identically zero")]
    ZeroMatrix,
}

/// Row-major features with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<u8>,
    n: usize,
    d: usize,
}

impl Dataset {
    pub fn new(features: Vec<f64>, labels: Vec<u8>, d: usize) -> Result<Self, DatasetError> {
        let n = labels.len();
        if n == 0 || d == 0 {
            return Err(DatasetError::Empty { n, d });
        }
        if features.len() != n * d {
            return Err(DatasetError::Shape { expected: n * d, got: features.len() });
        }
        if let Some((row, &label)) = labels.iter().enumerate().find(|(_, &y)| y > 1) {
            return Err(DatasetError::Label { row, label });
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(DatasetError::NonFinite { row: pos / d, col: pos % d });
        }
        Ok(Self { features, labels, n, d })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.d..(i + 1) * self.d]
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }
}

/// Loss of sample `i` at weights `w`.
pub fn logistic_loss(w: &[f64], ds: &Dataset, i: usize) -> f64 {
    let z = dot(w, ds.row(i));
    if ds.label(i) == 1 {
        softplus(z)
    } else {
        softplus(-z)
    }
}

/// `λ_max(XᵀX) / (4n)`, the gradient Lipschitz constant of the mean loss.
pub fn logistic_smoothness(ds: &Dataset) -> Result<f64, DatasetError> {
    if ds.features.iter().all(|&v| v == 0.0) {
        return Err(DatasetError::ZeroMatrix);
    }
    let (n, d) = (ds.n, ds.d);
    // Iterate on the smaller Gram matrix; both share the top eigenvalue.
    let apply = |v: &[f64], out: &mut [f64]| {
        if d <= n {
            let mut xv = vec![0.0; n];
            for (i, xi) in xv.iter_mut().enumerate() {
                *xi = dot(ds.row(i), v);
            }
            out.fill(0.0);
            for (i, &xi) in xv.iter().enumerate() {
                for (o, &a) in out.iter_mut().zip(ds.row(i)) {
                    *o += a * xi;
                }
            }
        } else {
            let mut xtv = vec![0.0; d];
            for (i, &vi) in v.iter().enumerate() {
                for (t, &a) in xtv.iter_mut().zip(ds.row(i)) {
                    *t += a * vi;
                }
            }
            for (i, o) in out.iter_mut().enumerate() {
                *o = dot(ds.row(i), &xtv);
            }
        }
    };
    let m = d.min(n);
    let mut v: Vec<f64> = (0..m).map(|j| 1.0 + 1e-3 * j as f64).collect();
    let mut w = vec![0.0; m];
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        apply(&v, &mut w);
        let next = dot(&v, &w);
        core::mem::swap(&mut v, &mut w);
        if (next - lambda).abs() <= POWER_TOL * next.abs() {
            lambda = next;
            break;
        }
        lambda = next;
    }
    Ok(lambda / (4.0 * n as f64))
}

/// Empirical logistic risk over a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticRegression {
    data: Dataset,
    smoothness: f64,
}

impl LogisticRegression {
    pub fn new(data: Dataset) -> Result<Self, DatasetError> {
        let smoothness = logistic_smoothness(&data)?;
        Ok(Self { data, smoothness })
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn smoothness(&self) -> f64 {
        self.smoothness
    }
}

impl Objective for LogisticRegression {
    fn dim(&self) -> usize {
        self.data.d
    }

    fn value(&self, x: &[f64], xi: SampleIndex) -> f64 {
        logistic_loss(x, &self.data, xi.0)
    }

    fn num_samples(&self) -> usize {
        self.data.n
    }

    fn mean_value(&self, x: &[f64]) -> f64 {
        (0..self.data.n).map(|i| logistic_loss(x, &self.data, i)).sum::<f64>() / self.data.n as f64
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let mut g = vec![0.0; self.data.d];
        for i in 0..self.data.n {
            let row = self.data.row(i);
            let coef = sigmoid(dot(x, row)) - f64::from(1 - self.data.label(i));
            for (gj, &a) in g.iter_mut().zip(row) {
                *gj += coef * a;
            }
        }
        let n = self.data.n as f64;
        g.iter_mut().for_each(|v| *v /= n);
        Some(g)
    }

    fn min_value(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// Parameters of the synthetic classification data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    /// Scale of `⟨w†, X_i⟩` inside the label sigmoid.
    pub margin: f64,
    /// Replace the last feature by a constant 1.
    pub intercept: bool,
}

impl SyntheticSpec {
    pub fn new(n: usize, d: usize, seed: u64) -> Self {
        Self { n, d, seed, margin: 4.0, intercept: false }
    }
}

/// Gaussian features; labels drawn so that `P(y = 1) = p_i(w†)` at `margin` scale
/// for a random unit `w†`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset, DatasetError> {
    let SyntheticSpec { n, d, seed, margin, intercept } = *spec;
    if n == 0 || d == 0 {
        return Err(DatasetError::Empty { n, d });
    }
    let root = RngStream::new(seed);
    let mut rng = root.child(0).rng();
    let mut w_true: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
    let nw = norm(&w_true);
    w_true.iter_mut().for_each(|v| *v /= nw);

    let mut rng = root.child(1).rng();
    let mut features = Vec::with_capacity(n * d);
    for _ in 0..n {
        for j in 0..d {
            let v = if intercept && j + 1 == d { 1.0 } else { StandardNormal.sample(&mut rng) };
            features.push(v);
        }
    }
    let mut rng = root.child(2).rng();
    let labels = features
        .chunks_exact(d)
        .map(|row| {
            let p = sigmoid(-margin * dot(&w_true, row));
            u8::from(rng.random::<f64>() < p)
        })
        .collect();
    Dataset::new(features, labels, d)
}
