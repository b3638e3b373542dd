use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{MetricError, MinCounts, ScoredExample};
use crate::corpus::Label;

/// ROC-AUC as the Mann-Whitney statistic with midranks for ties, so tied
/// positive/negative pairs earn half credit. O(n log n).
pub fn roc_auc_labels(labels: &[Label], scores: &[f64]) -> Result<f64, MetricError> {
    if labels.len() != scores.len() {
        return Err(MetricError::Domain(format!(
            "{} labels but {} scores",
            labels.len(),
            scores.len()
        )));
    }
    let positives = labels.iter().filter(|l| l.is_toxic()).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(MetricError::SingleClass {
            positives,
            negatives,
        });
    }
    if let Some(bad) = scores.iter().find(|s| s.is_nan()) {
        return Err(MetricError::Domain(format!("score {bad} is not a number")));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // midranks are half-integers, so the sum is exact
    let mut positive_rank_sum = 0.0;
    let mut start = 0;
    while start < order.len() {
        let value = scores[order[start]];
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == value {
            end += 1;
        }
        let midrank = (start + 1 + end) as f64 / 2.0;
        let tied_pos = order[start..end]
            .iter()
            .filter(|&&i| labels[i].is_toxic())
            .count();
        positive_rank_sum += midrank * tied_pos as f64;
        start = end;
    }
    let p = positives as f64;
    let u = positive_rank_sum - p * (p + 1.0) / 2.0;
    Ok(u / (p * negatives as f64))
}

fn auc_of<'a>(examples: impl Iterator<Item = &'a ScoredExample>) -> Result<f64, MetricError> {
    let (labels, scores): (Vec<Label>, Vec<f64>) = examples.map(|e| (e.label, e.score)).unzip();
    roc_auc_labels(&labels, &scores)
}

pub fn roc_auc(examples: &[ScoredExample]) -> Result<f64, MetricError> {
    auc_of(examples.iter())
}

struct Counts {
    sub_pos: usize,
    sub_neg: usize,
    bg_pos: usize,
    bg_neg: usize,
}

fn counts(examples: &[ScoredExample], subgroup: &str) -> Counts {
    let mut c = Counts {
        sub_pos: 0,
        sub_neg: 0,
        bg_pos: 0,
        bg_neg: 0,
    };
    for e in examples {
        match (e.in_subgroup(subgroup), e.label.is_toxic()) {
            (true, true) => c.sub_pos += 1,
            (true, false) => c.sub_neg += 1,
            (false, true) => c.bg_pos += 1,
            (false, false) => c.bg_neg += 1,
        }
    }
    c
}

fn require(
    metric: &'static str,
    subgroup: &str,
    pos: (&str, usize),
    neg: (&str, usize),
    min: MinCounts,
) -> Result<(), MetricError> {
    if pos.1 < min.positives || neg.1 < min.negatives {
        return Err(MetricError::Insufficient {
            metric,
            subgroup: subgroup.to_string(),
            detail: format!(
                "{} {} (need {}), {} {} (need {})",
                pos.1, pos.0, min.positives, neg.1, neg.0, min.negatives
            ),
        });
    }
    Ok(())
}

/// ROC-AUC restricted to subgroup members.
pub fn subgroup_auc(
    examples: &[ScoredExample],
    subgroup: &str,
    min: MinCounts,
) -> Result<f64, MetricError> {
    let c = counts(examples, subgroup);
    require(
        "subgroup_auc",
        subgroup,
        ("subgroup positives", c.sub_pos),
        ("subgroup negatives", c.sub_neg),
        min,
    )?;
    auc_of(examples.iter().filter(|e| e.in_subgroup(subgroup)))
}

/// ROC-AUC over background positives and subgroup negatives.
/// Low values mean non-toxic identity mentions score like toxic comments.
pub fn bpsn_auc(
    examples: &[ScoredExample],
    subgroup: &str,
    min: MinCounts,
) -> Result<f64, MetricError> {
    let c = counts(examples, subgroup);
    require(
        "bpsn_auc",
        subgroup,
        ("background positives", c.bg_pos),
        ("subgroup negatives", c.sub_neg),
        min,
    )?;
    auc_of(
        examples
            .iter()
            .filter(|e| e.in_subgroup(subgroup) != e.label.is_toxic()),
    )
}

/// ROC-AUC over subgroup positives and background negatives.
/// Low values mean toxic identity mentions score like harmless comments.
pub fn bnsp_auc(
    examples: &[ScoredExample],
    subgroup: &str,
    min: MinCounts,
) -> Result<f64, MetricError> {
    let c = counts(examples, subgroup);
    require(
        "bnsp_auc",
        subgroup,
        ("subgroup positives", c.sub_pos),
        ("background negatives", c.bg_neg),
        min,
    )?;
    auc_of(
        examples
            .iter()
            .filter(|e| e.in_subgroup(subgroup) == e.label.is_toxic()),
    )
}

/// Number of resampling attempts before pinned AUC reports a missing value.
pub const PINNED_RETRY_BUDGET: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PinnedAuc {
    pub auc: f64,
    /// Per-side sample size actually used.
    pub sample_size: usize,
    /// Set when the requested size exceeded the subgroup and was reduced.
    pub clamped: bool,
}

/// AUC of a subgroup sample concatenated with an equal-size sample of the
/// whole dataset. Both draws are uniform without replacement and seeded.
pub fn pinned_auc(
    examples: &[ScoredExample],
    subgroup: &str,
    sample_size: usize,
    seed: u64,
) -> Result<PinnedAuc, MetricError> {
    if sample_size == 0 {
        return Err(MetricError::Domain(
            "pinned AUC sample size must be positive".into(),
        ));
    }
    let members: Vec<&ScoredExample> = examples
        .iter()
        .filter(|e| e.in_subgroup(subgroup))
        .collect();
    if members.is_empty() {
        return Err(MetricError::Insufficient {
            metric: "pinned_auc",
            subgroup: subgroup.to_string(),
            detail: "subgroup has no members".into(),
        });
    }
    let k = sample_size.min(members.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..PINNED_RETRY_BUDGET {
        let pinned = sample(&mut rng, members.len(), k)
            .into_iter()
            .map(|i| members[i])
            .chain(
                sample(&mut rng, examples.len(), k)
                    .into_iter()
                    .map(|i| &examples[i]),
            );
        match auc_of(pinned) {
            Ok(auc) => {
                return Ok(PinnedAuc {
                    auc,
                    sample_size: k,
                    clamped: k < sample_size,
                })
            }
            Err(MetricError::SingleClass { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(MetricError::Insufficient {
        metric: "pinned_auc",
        subgroup: subgroup.to_string(),
        detail: format!("no two-class sample in {PINNED_RETRY_BUDGET} attempts"),
    })
}
