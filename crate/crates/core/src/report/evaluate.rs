use rayon::prelude::*;

use super::ReportError;
use crate::corpus::{Label, TOXIC_THRESHOLD};
use crate::fairmetrics::{
    bnsp_auc, bpsn_auc, ctf_summary, final_score, fped_fned, pinned_auc, roc_auc, subgroup_auc,
    BiasReport, CounterfactualGenerator, MetricError, PinnedRow, ScoreConfig, ScoredExample,
    SubgroupRow,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PinnedOptions {
    pub sample_size: usize,
    pub seed: u64,
}

impl Default for PinnedOptions {
    fn default() -> Self {
        Self {
            sample_size: 1000,
            seed: 42,
        }
    }
}

/// Optional report sections.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    /// Threshold for FPED/FNED; `None` omits the section.
    pub error_gap_threshold: Option<f64>,
    pub pinned: Option<PinnedOptions>,
    pub ctf: Option<CounterfactualGenerator>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            error_gap_threshold: Some(TOXIC_THRESHOLD),
            pinned: None,
            ctf: None,
        }
    }
}

impl EvalOptions {
    /// Only the AUC table.
    pub fn auc_only() -> Self {
        Self {
            error_gap_threshold: None,
            pinned: None,
            ctf: None,
        }
    }
}

/// A scorer over raw text plus the labelled texts to perturb.
pub struct CtfInput<'a> {
    pub scorer: &'a (dyn Fn(&str) -> f64 + Sync),
    pub items: &'a [(String, Label)],
}

/// Overall AUC, per-subgroup AUC rows and the combined score.
pub fn evaluate(
    scored: &[ScoredExample],
    subgroups: &[String],
    cfg: &ScoreConfig,
) -> Result<BiasReport, ReportError> {
    evaluate_with(scored, subgroups, cfg, &EvalOptions::auc_only(), None)
}

/// [`evaluate`] plus the sections enabled in `opts`. The counterfactual
/// section is filled only when `opts.ctf` is set and `ctf` is provided.
pub fn evaluate_with(
    scored: &[ScoredExample],
    subgroups: &[String],
    cfg: &ScoreConfig,
    opts: &EvalOptions,
    ctf: Option<CtfInput<'_>>,
) -> Result<BiasReport, ReportError> {
    if scored.is_empty() {
        return Err(ReportError::NoExamples);
    }
    cfg.validate()?;
    let overall_auc = roc_auc(scored)?;

    let rows = subgroups
        .par_iter()
        .map(|g| subgroup_row(scored, g, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let complete: Vec<_> = rows.iter().filter_map(SubgroupRow::submetrics).collect();
    let final_score = if complete.is_empty() {
        None
    } else {
        Some(final_score(overall_auc, &complete, cfg)?)
    };

    let error_gaps = opts
        .error_gap_threshold
        .map(|t| fped_fned(scored, subgroups, t))
        .transpose()?;

    let pinned = opts
        .pinned
        .map(|p| {
            subgroups
                .par_iter()
                .map(|g| match pinned_auc(scored, g, p.sample_size, p.seed) {
                    Ok(r) => Ok(PinnedRow {
                        subgroup: g.clone(),
                        auc: Some(r.auc),
                        sample_size: r.sample_size,
                        clamped: r.clamped,
                    }),
                    Err(e) if e.is_missing_signal() => Ok(PinnedRow {
                        subgroup: g.clone(),
                        auc: None,
                        sample_size: 0,
                        clamped: false,
                    }),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>, MetricError>>()
        })
        .transpose()?;

    let ctf = match (&opts.ctf, ctf) {
        (Some(generator), Some(input)) => Some(ctf_summary(input.scorer, input.items, generator)?),
        _ => None,
    };

    Ok(BiasReport {
        provenance: None,
        n_examples: scored.len(),
        overall_auc,
        rows,
        final_score,
        score_config: *cfg,
        error_gaps,
        pinned,
        ctf,
    })
}

fn subgroup_row(
    scored: &[ScoredExample],
    g: &str,
    cfg: &ScoreConfig,
) -> Result<SubgroupRow, MetricError> {
    let mut reasons = Vec::new();
    let mut cell = |r: Result<f64, MetricError>| match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_missing_signal() => {
            reasons.push(e.to_string());
            Ok(None)
        }
        Err(e) => Err(e),
    };
    let subgroup_auc = cell(subgroup_auc(scored, g, cfg.min_counts))?;
    let bpsn_auc = cell(bpsn_auc(scored, g, cfg.min_counts))?;
    let bnsp_auc = cell(bnsp_auc(scored, g, cfg.min_counts))?;
    Ok(SubgroupRow {
        subgroup: g.to_string(),
        n_members: scored.iter().filter(|e| e.in_subgroup(g)).count(),
        subgroup_auc,
        bpsn_auc,
        bnsp_auc,
        missing: !reasons.is_empty(),
        missing_reason: (!reasons.is_empty()).then(|| reasons.join("; ")),
    })
}
