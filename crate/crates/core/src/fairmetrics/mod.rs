//! Classification and unintended-bias metrics.
//!
//! All metrics consume [`ScoredExample`]s: a binary label, a model score in
//! `[0, 1]` and the set of identity subgroups the example belongs to.

mod auc;
mod ctf;
mod rates;
mod score;

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::Label;

pub use auc::{
    bnsp_auc, bpsn_auc, pinned_auc, roc_auc, roc_auc_labels, subgroup_auc, PinnedAuc,
    PINNED_RETRY_BUDGET,
};
pub use ctf::{ctf_gap, ctf_summary, CounterfactualGenerator, CtfSummary, DEFAULT_MAX_TOKENS};
pub use rates::{confusion_at, fped_fned, ConfusionCounts, ErrorGapRow, ErrorGaps};
pub use score::{
    final_score, power_mean, BiasReport, PinnedRow, ScoreConfig, SubgroupRow, SubmetricSet,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("metric undefined: need at least one positive and one negative example ({positives} positive, {negatives} negative)")]
    SingleClass { positives: usize, negatives: usize },
    #[error("{metric} for `{subgroup}` is missing: {detail}")]
    Insufficient {
        metric: &'static str,
        subgroup: String,
        detail: String,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("score {score} for `{id}` outside [0, 1]")]
    InvalidScore { id: String, score: f64 },
    #[error("text has {tokens} tokens; counterfactual gap is limited to {max}")]
    TooManyTokens { tokens: usize, max: usize },
    #[error("no identity terms to substitute")]
    NoCounterfactual,
}

impl MetricError {
    /// True for the "not enough data" signals that reports show as missing cells.
    pub fn is_missing_signal(&self) -> bool {
        matches!(
            self,
            MetricError::Insufficient { .. } | MetricError::SingleClass { .. }
        )
    }
}

/// One scored, labelled example with its subgroup memberships.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredExample {
    pub id: String,
    pub label: Label,
    pub score: f64,
    pub subgroups: BTreeSet<String>,
}

impl ScoredExample {
    pub fn new(
        id: impl Into<String>,
        label: Label,
        score: f64,
        subgroups: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self, MetricError> {
        let id = id.into();
        if !(0.0..=1.0).contains(&score) {
            return Err(MetricError::InvalidScore { id, score });
        }
        Ok(Self {
            id,
            label,
            score,
            subgroups: subgroups.into_iter().map(Into::into).collect(),
        })
    }

    pub fn in_subgroup(&self, subgroup: &str) -> bool {
        self.subgroups.contains(subgroup)
    }
}

/// Minimum positives and negatives a subgroup needs before its metrics are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MinCounts {
    pub positives: usize,
    pub negatives: usize,
}

impl Default for MinCounts {
    fn default() -> Self {
        Self {
            positives: 1,
            negatives: 1,
        }
    }
}
