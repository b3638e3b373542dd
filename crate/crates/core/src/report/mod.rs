//! Exploratory statistics, prediction files, bias evaluation and rendering.

mod eda;
mod evaluate;
mod predictions;
mod render;

use std::path::Path;

use thiserror::Error;

use crate::fairmetrics::MetricError;

pub use eda::{
    pearson, stats, weighted_toxicity, ClassDistribution, CorrelationMatrix, EdaSummary, Histogram,
    IdentityToxicity, HISTOGRAM_BINS,
};
pub use evaluate::{evaluate, evaluate_with, CtfInput, EvalOptions, PinnedOptions};
pub use predictions::{import_predictions, PredictionFile};
pub use render::{render_eda, render_grid, render_report};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReportError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("{what} is undefined: {reason}")]
    Missing { what: String, reason: String },
    #[error("prediction file line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("prediction file line {line}: score {score} outside [0, 1]")]
    ScoreOutOfRange { line: u64, score: f64 },
    #[error("prediction file line {line}: duplicate id `{id}`")]
    DuplicateId { line: u64, id: String },
    #[error("{count} prediction ids not in corpus, first: {}", first.join(", "))]
    UnknownIds { count: usize, first: Vec<String> },
    #[error("no scored examples")]
    NoExamples,
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("write failed: {0}")]
    Write(String),
}

/// Output encoding of rendered tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// Fixed-width text table with 4-decimal values.
    Plain,
    /// Pretty-printed JSON with full-precision values.
    Json,
}

impl Format {
    /// `.json` selects JSON; anything else is plain text.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Plain,
        }
    }
}
