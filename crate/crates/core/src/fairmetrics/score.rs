use serde::Serialize;

use super::ctf::CtfSummary;
use super::rates::ErrorGaps;
use super::{MetricError, MinCounts};

/// Weights and aggregation power of the combined bias score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreConfig {
    /// Weight of the overall AUC.
    pub w0: f64,
    pub w_subgroup: f64,
    pub w_bpsn: f64,
    pub w_bnsp: f64,
    /// Power of the generalized mean across subgroups.
    pub power: f64,
    pub min_counts: MinCounts,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        Self {
            w0: 0.25,
            w_subgroup: 0.25,
            w_bpsn: 0.25,
            w_bnsp: 0.25,
            power: -5.0,
            min_counts: MinCounts::default(),
        }
    }
}

impl ScoreConfig {
    pub fn validate(&self) -> Result<(), MetricError> {
        for (name, w) in [
            ("w0", self.w0),
            ("w_subgroup", self.w_subgroup),
            ("w_bpsn", self.w_bpsn),
            ("w_bnsp", self.w_bnsp),
        ] {
            if !w.is_finite() || w < 0.0 {
                return Err(MetricError::Domain(format!(
                    "weight {name} must be finite and non-negative, got {w}"
                )));
            }
        }
        if !self.power.is_finite() {
            return Err(MetricError::Domain(format!(
                "power must be finite, got {}",
                self.power
            )));
        }
        if self.min_counts.positives == 0 || self.min_counts.negatives == 0 {
            return Err(MetricError::Domain(
                "minimum subgroup counts must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Generalized mean `(mean of v^p)^(1/p)`; `p = 0` is the geometric mean.
pub fn power_mean(values: &[f64], p: f64) -> Result<f64, MetricError> {
    if values.is_empty() {
        return Err(MetricError::Empty("power mean of no values"));
    }
    if !p.is_finite() {
        return Err(MetricError::Domain(format!("power {p} is not finite")));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(MetricError::Domain(format!(
            "power mean needs finite non-negative values, got {v}"
        )));
    }
    let n = values.len() as f64;
    if p == 0.0 {
        if values.contains(&0.0) {
            return Ok(0.0);
        }
        return Ok((values.iter().map(|v| v.ln()).sum::<f64>() / n).exp());
    }
    if p < 0.0 && values.contains(&0.0) {
        return Err(MetricError::Domain(format!(
            "0 raised to negative power {p}"
        )));
    }
    let m = (values.iter().map(|v| v.powf(p)).sum::<f64>() / n).powf(1.0 / p);
    // rounding can push a constant sequence a hair outside its own range
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(*v), hi.max(*v))
        });
    Ok(m.clamp(lo, hi))
}

/// The three per-subgroup AUCs that enter the final score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubmetricSet {
    pub subgroup_auc: f64,
    pub bpsn_auc: f64,
    pub bnsp_auc: f64,
}

/// `w0·overall + Σ_a w_a · M_p(family a across subgroups)`.
pub fn final_score(
    overall_auc: f64,
    per_subgroup: &[SubmetricSet],
    cfg: &ScoreConfig,
) -> Result<f64, MetricError> {
    if per_subgroup.is_empty() {
        return Err(MetricError::Empty(
            "final score needs at least one complete subgroup",
        ));
    }
    cfg.validate()?;
    let family = |f: fn(&SubmetricSet) -> f64| -> Result<f64, MetricError> {
        let values: Vec<f64> = per_subgroup.iter().map(f).collect();
        power_mean(&values, cfg.power)
    };
    Ok(cfg.w0 * overall_auc
        + cfg.w_subgroup * family(|s| s.subgroup_auc)?
        + cfg.w_bpsn * family(|s| s.bpsn_auc)?
        + cfg.w_bnsp * family(|s| s.bnsp_auc)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgroupRow {
    pub subgroup: String,
    pub n_members: usize,
    pub subgroup_auc: Option<f64>,
    pub bpsn_auc: Option<f64>,
    pub bnsp_auc: Option<f64>,
    /// Set when any of the three metrics failed the minimum counts.
    pub missing: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub missing_reason: Option<String>,
}

impl SubgroupRow {
    pub fn submetrics(&self) -> Option<SubmetricSet> {
        Some(SubmetricSet {
            subgroup_auc: self.subgroup_auc?,
            bpsn_auc: self.bpsn_auc?,
            bnsp_auc: self.bnsp_auc?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PinnedRow {
    pub subgroup: String,
    pub auc: Option<f64>,
    pub sample_size: usize,
    pub clamped: bool,
}

/// Per-subgroup AUC table with the overall AUC and combined score,
/// plus optional threshold-based, pinned and counterfactual sections.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    pub n_examples: usize,
    pub overall_auc: f64,
    pub rows: Vec<SubgroupRow>,
    /// `None` when every subgroup is missing.
    pub final_score: Option<f64>,
    pub score_config: ScoreConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_gaps: Option<ErrorGaps>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pinned: Option<Vec<PinnedRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ctf: Option<CtfSummary>,
}
