use serde::Serialize;

use super::{MetricError, ScoredExample};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn fpr(&self) -> Option<f64> {
        let d = self.fp + self.tn;
        (d > 0).then(|| self.fp as f64 / d as f64)
    }

    pub fn fnr(&self) -> Option<f64> {
        let d = self.fn_ + self.tp;
        (d > 0).then(|| self.fn_ as f64 / d as f64)
    }

    fn add(&mut self, e: &ScoredExample, threshold: f64) {
        match (e.score >= threshold, e.label.is_toxic()) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fn_ += 1,
        }
    }
}

/// Counts with "predicted toxic" meaning `score >= threshold`.
pub fn confusion_at(examples: &[ScoredExample], threshold: f64) -> ConfusionCounts {
    let mut c = ConfusionCounts::default();
    for e in examples {
        c.add(e, threshold);
    }
    c
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorGapRow {
    pub subgroup: String,
    pub counts: ConfusionCounts,
    /// `None` when the subgroup has no negatives; skipped in the FPED sum.
    pub fpr: Option<f64>,
    /// `None` when the subgroup has no positives; skipped in the FNED sum.
    pub fnr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorGaps {
    pub threshold: f64,
    pub overall: ConfusionCounts,
    pub overall_fpr: f64,
    pub overall_fnr: f64,
    pub fped: f64,
    pub fned: f64,
    pub rows: Vec<ErrorGapRow>,
}

/// False positive / false negative equality gaps:
/// `FPED = Σ_t |FPR − FPR_t|`, `FNED = Σ_t |FNR − FNR_t|`.
pub fn fped_fned(
    examples: &[ScoredExample],
    subgroups: &[String],
    threshold: f64,
) -> Result<ErrorGaps, MetricError> {
    if !threshold.is_finite() {
        return Err(MetricError::Domain(format!(
            "threshold {threshold} is not finite"
        )));
    }
    let overall = confusion_at(examples, threshold);
    let (Some(overall_fpr), Some(overall_fnr)) = (overall.fpr(), overall.fnr()) else {
        return Err(MetricError::SingleClass {
            positives: overall.tp + overall.fn_,
            negatives: overall.fp + overall.tn,
        });
    };
    let rows: Vec<ErrorGapRow> = subgroups
        .iter()
        .map(|g| {
            let mut counts = ConfusionCounts::default();
            for e in examples.iter().filter(|e| e.in_subgroup(g)) {
                counts.add(e, threshold);
            }
            ErrorGapRow {
                subgroup: g.clone(),
                counts,
                fpr: counts.fpr(),
                fnr: counts.fnr(),
            }
        })
        .collect();
    let fped = rows
        .iter()
        .filter_map(|r| r.fpr)
        .map(|r| (overall_fpr - r).abs())
        .sum();
    let fned = rows
        .iter()
        .filter_map(|r| r.fnr)
        .map(|r| (overall_fnr - r).abs())
        .sum();
    Ok(ErrorGaps {
        threshold,
        overall,
        overall_fpr,
        overall_fnr,
        fped,
        fned,
        rows,
    })
}
