//! Binary logistic regression over sparse TF-IDF features.
//!
//! Training minimizes the class-weighted mean cross-entropy
//! `(1/B) Σ wᵢ · CE(tᵢ, σ(w·xᵢ + b))` (plus an optional `l2/2 · ‖w‖²`) with
//! minibatch Adam. Weights start at zero.

mod adam;
mod grid;
mod io;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::Label;
use crate::tfidf::SparseVector;

pub use adam::{adam_step, AdamHyper, AdamState};
pub use grid::{default_grid, grid_search, GridRow, GridSearchResult};

/// Probabilities are clamped into `[PROB_EPS, 1 - PROB_EPS]` before taking logs.
pub const PROB_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum LogRegError {
    #[error("feature dimension {got} does not match model dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{what}: expected length {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("empty batch")]
    EmptyBatch,
    #[error("class counts must be positive (non-toxic {n_nontoxic}, toxic {n_toxic})")]
    ZeroClassCount { n_nontoxic: usize, n_toxic: usize },
    #[error("non-finite gradient component at index {index}")]
    NonFiniteGradient { index: usize },
    #[error("training diverged at epoch {epoch}, batch {batch}")]
    Diverged { epoch: usize, batch: usize },
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("empty hyperparameter grid")]
    EmptyGrid,
    #[error("every grid configuration failed; first error: {0}")]
    AllConfigsFailed(String),
    #[error("validation data needs both classes")]
    SingleClassValidation,
    #[error("malformed model file at line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("io error: {0}")]
    Io(String),
}

/// Per-class loss multipliers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassWeights {
    /// `N / (2 · n_c)`, computed from the training labels.
    Balanced,
    /// `(1, 1)`.
    Uniform,
    /// Explicit `(w_nontoxic, w_toxic)`.
    Custom(f64, f64),
}

impl fmt::Display for ClassWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassWeights::Balanced => f.write_str("balanced"),
            ClassWeights::Uniform => f.write_str("none"),
            ClassWeights::Custom(a, b) => write!(f, "{a},{b}"),
        }
    }
}

impl FromStr for ClassWeights {
    type Err = LogRegError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "balanced" | "balance" => Ok(ClassWeights::Balanced),
            "none" | "uniform" => Ok(ClassWeights::Uniform),
            other => {
                let bad = || {
                    LogRegError::InvalidConfig(format!(
                        "class_weights `{other}`: expected balanced, none or `w0,w1`"
                    ))
                };
                let (a, b) = other.split_once(',').ok_or_else(bad)?;
                let a: f64 = a.trim().parse().map_err(|_| bad())?;
                let b: f64 = b.trim().parse().map_err(|_| bad())?;
                if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                    return Err(bad());
                }
                Ok(ClassWeights::Custom(a, b))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimizer {
    Adam,
    /// Plain (minibatch) gradient descent.
    Sgd,
}

impl fmt::Display for Optimizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Optimizer::Adam => "adam",
            Optimizer::Sgd => "sgd",
        })
    }
}

impl FromStr for Optimizer {
    type Err = LogRegError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "adam" => Ok(Optimizer::Adam),
            "sgd" | "gd" => Ok(Optimizer::Sgd),
            other => Err(LogRegError::InvalidConfig(format!(
                "unknown optimizer `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub class_weights: ClassWeights,
    pub seed: u64,
    pub adam: AdamHyper,
    pub optimizer: Optimizer,
    /// L2 penalty strength; 0 disables it.
    pub l2: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-4,
            batch_size: 100,
            epochs: 5,
            class_weights: ClassWeights::Balanced,
            seed: 42,
            adam: AdamHyper::default(),
            optimizer: Optimizer::Adam,
            l2: 0.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), LogRegError> {
        let bad = |m: String| Err(LogRegError::InvalidConfig(m));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate {} must be > 0", self.learning_rate));
        }
        if self.batch_size == 0 {
            return bad("batch_size must be >= 1".into());
        }
        if self.epochs == 0 {
            return bad("epochs must be >= 1".into());
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return bad(format!("l2 {} must be >= 0", self.l2));
        }
        self.adam.validate()
    }
}

/// Trained weights, bias and the configuration that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRegModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub trained_config: TrainConfig,
}

impl LogRegModel {
    pub fn zeros(dimension: usize, config: TrainConfig) -> Self {
        Self {
            weights: vec![0.0; dimension],
            bias: 0.0,
            trained_config: config,
        }
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    /// `σ(w·x + b)`.
    pub fn predict_proba(&self, x: &SparseVector) -> Result<f64, LogRegError> {
        self.check_dim(x)?;
        Ok(self.proba_unchecked(x))
    }

    pub fn predict_many(&self, xs: &[SparseVector]) -> Result<Vec<f64>, LogRegError> {
        xs.iter().map(|x| self.predict_proba(x)).collect()
    }

    fn check_dim(&self, x: &SparseVector) -> Result<(), LogRegError> {
        if x.dimension() != self.weights.len() {
            return Err(LogRegError::DimensionMismatch {
                expected: self.weights.len(),
                got: x.dimension(),
            });
        }
        Ok(())
    }

    fn proba_unchecked(&self, x: &SparseVector) -> f64 {
        sigmoid(x.dot(&self.weights) + self.bias)
    }
}

/// Free-function form of [`LogRegModel::predict_proba`].
pub fn predict_proba(model: &LogRegModel, x: &SparseVector) -> Result<f64, LogRegError> {
    model.predict_proba(x)
}

const SIGMOID_MAX: f64 = 1.0 - f64::EPSILON / 2.0;

/// Logistic function, evaluated without overflow and kept strictly inside (0, 1).
pub fn sigmoid(z: f64) -> f64 {
    let s = if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    };
    s.clamp(f64::MIN_POSITIVE, SIGMOID_MAX)
}

/// `(N / (2 · n_nontoxic), N / (2 · n_toxic))`.
pub fn balanced_class_weights(
    n_nontoxic: usize,
    n_toxic: usize,
) -> Result<(f64, f64), LogRegError> {
    if n_nontoxic == 0 || n_toxic == 0 {
        return Err(LogRegError::ZeroClassCount {
            n_nontoxic,
            n_toxic,
        });
    }
    let n = (n_nontoxic + n_toxic) as f64;
    Ok((n / (2.0 * n_nontoxic as f64), n / (2.0 * n_toxic as f64)))
}

fn sample_ce(label: Label, p: f64) -> f64 {
    let p = p.clamp(PROB_EPS, 1.0 - PROB_EPS);
    if label.is_toxic() {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// Mean over samples of `weightᵢ · cross-entropy(labelᵢ, probᵢ)`.
pub fn weighted_cross_entropy(
    labels: &[Label],
    probs: &[f64],
    sample_weights: &[f64],
) -> Result<f64, LogRegError> {
    if probs.len() != labels.len() {
        return Err(LogRegError::LengthMismatch {
            what: "probs",
            expected: labels.len(),
            got: probs.len(),
        });
    }
    if sample_weights.len() != labels.len() {
        return Err(LogRegError::LengthMismatch {
            what: "sample_weights",
            expected: labels.len(),
            got: sample_weights.len(),
        });
    }
    if labels.is_empty() {
        return Err(LogRegError::EmptyBatch);
    }
    let total: f64 = labels
        .iter()
        .zip(probs)
        .zip(sample_weights)
        .map(|((l, p), w)| w * sample_ce(*l, *p))
        .sum();
    Ok(total / labels.len() as f64)
}

/// A minibatch: rows, labels and per-sample weights of equal length.
#[derive(Debug, Clone, Copy)]
pub struct Batch<'a> {
    pub features: &'a [SparseVector],
    pub labels: &'a [Label],
    pub sample_weights: &'a [f64],
}

impl Batch<'_> {
    fn validate(&self, dim: usize) -> Result<(), LogRegError> {
        let n = self.features.len();
        if n == 0 {
            return Err(LogRegError::EmptyBatch);
        }
        if self.labels.len() != n {
            return Err(LogRegError::LengthMismatch {
                what: "labels",
                expected: n,
                got: self.labels.len(),
            });
        }
        if self.sample_weights.len() != n {
            return Err(LogRegError::LengthMismatch {
                what: "sample_weights",
                expected: n,
                got: self.sample_weights.len(),
            });
        }
        if let Some(x) = self.features.iter().find(|x| x.dimension() != dim) {
            return Err(LogRegError::DimensionMismatch {
                expected: dim,
                got: x.dimension(),
            });
        }
        Ok(())
    }
}

/// Gradient of the weighted mean cross-entropy of `batch` under `model`
/// (no L2 term): `(1/B) Σ wᵢ (yᵢ − tᵢ) xᵢ` and the matching bias scalar.
pub fn gradient(batch: &Batch<'_>, model: &LogRegModel) -> Result<(Vec<f64>, f64), LogRegError> {
    batch.validate(model.dimension())?;
    let mut grad = vec![0.0; model.dimension()];
    let rows = (0..batch.features.len())
        .map(|i| (&batch.features[i], batch.labels[i], batch.sample_weights[i]));
    let gb = accumulate(rows, model, &mut grad);
    Ok((grad, gb))
}

/// Adds the mean weighted residual gradient into `grad` and returns the bias part.
fn accumulate<'a>(
    rows: impl ExactSizeIterator<Item = (&'a SparseVector, Label, f64)>,
    model: &LogRegModel,
    grad: &mut [f64],
) -> f64 {
    let scale = 1.0 / rows.len() as f64;
    let mut gb = 0.0;
    for (x, label, w) in rows {
        let residual = w * (model.proba_unchecked(x) - label.as_f64()) * scale;
        for &(j, v) in x.entries() {
            grad[j as usize] += residual * v;
        }
        gb += residual;
    }
    gb
}

/// Model plus the full-training-set loss recorded after each epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: LogRegModel,
    pub loss_trace: Vec<f64>,
}

fn resolve_weights(cfg: &TrainConfig, labels: &[Label]) -> Result<(f64, f64), LogRegError> {
    let n_toxic = labels.iter().filter(|l| l.is_toxic()).count();
    let n_nontoxic = labels.len() - n_toxic;
    if n_toxic == 0 || n_nontoxic == 0 {
        return Err(LogRegError::ZeroClassCount {
            n_nontoxic,
            n_toxic,
        });
    }
    match cfg.class_weights {
        ClassWeights::Balanced => balanced_class_weights(n_nontoxic, n_toxic),
        ClassWeights::Uniform => Ok((1.0, 1.0)),
        ClassWeights::Custom(a, b) => Ok((a, b)),
    }
}

fn objective(
    model: &LogRegModel,
    features: &[SparseVector],
    labels: &[Label],
    sample_weights: &[f64],
) -> f64 {
    let ce: f64 = features
        .iter()
        .zip(labels)
        .zip(sample_weights)
        .map(|((x, l), w)| w * sample_ce(*l, model.proba_unchecked(x)))
        .sum::<f64>()
        / features.len() as f64;
    let l2 = model.trained_config.l2;
    if l2 > 0.0 {
        ce + 0.5 * l2 * model.weights.iter().map(|w| w * w).sum::<f64>()
    } else {
        ce
    }
}

/// Trains from zero weights with seeded per-epoch shuffling and minibatches.
pub fn train(
    features: &[SparseVector],
    labels: &[Label],
    cfg: &TrainConfig,
) -> Result<TrainOutcome, LogRegError> {
    cfg.validate()?;
    if features.len() != labels.len() {
        return Err(LogRegError::LengthMismatch {
            what: "labels",
            expected: features.len(),
            got: labels.len(),
        });
    }
    let (w0, w1) = resolve_weights(cfg, labels)?;
    let dim = features.first().map_or(0, SparseVector::dimension);
    if let Some(x) = features.iter().find(|x| x.dimension() != dim) {
        return Err(LogRegError::DimensionMismatch {
            expected: dim,
            got: x.dimension(),
        });
    }
    let sample_weights: Vec<f64> = labels
        .iter()
        .map(|l| if l.is_toxic() { w1 } else { w0 })
        .collect();

    let mut model = LogRegModel::zeros(dim, cfg.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..features.len()).collect();
    // bias is the last parameter
    let mut params = vec![0.0; dim + 1];
    let mut grad = vec![0.0; dim + 1];
    let mut state = AdamState::new(dim + 1);
    let mut loss_trace = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for (batch_no, chunk) in order.chunks(cfg.batch_size).enumerate() {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let rows = chunk
                .iter()
                .map(|&i| (&features[i], labels[i], sample_weights[i]));
            let (gw, gb) = grad.split_at_mut(dim);
            gb[0] = accumulate(rows, &model, gw);
            if cfg.l2 > 0.0 {
                for (g, w) in gw.iter_mut().zip(&model.weights) {
                    *g += cfg.l2 * w;
                }
            }
            let diverged = || LogRegError::Diverged {
                epoch,
                batch: batch_no,
            };
            match cfg.optimizer {
                Optimizer::Adam => {
                    adam_step(&mut params, &grad, &mut state, &cfg.adam, cfg.learning_rate)
                        .map_err(|_| diverged())?
                }
                Optimizer::Sgd => {
                    if grad.iter().any(|g| !g.is_finite()) {
                        return Err(diverged());
                    }
                    for (p, g) in params.iter_mut().zip(&grad) {
                        *p -= cfg.learning_rate * g;
                    }
                }
            }
            if params.iter().any(|p| !p.is_finite()) {
                return Err(diverged());
            }
            model.weights.copy_from_slice(&params[..dim]);
            model.bias = params[dim];
        }
        let loss = objective(&model, features, labels, &sample_weights);
        if !loss.is_finite() {
            return Err(LogRegError::Diverged {
                epoch,
                batch: order.len().div_ceil(cfg.batch_size).saturating_sub(1),
            });
        }
        loss_trace.push(loss);
    }
    Ok(TrainOutcome { model, loss_trace })
}
