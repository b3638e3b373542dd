use rayon::prelude::*;
use serde::Serialize;

use super::ReportError;
use crate::corpus::{Corpus, Reaction, Subtype};

pub const HISTOGRAM_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassDistribution {
    pub toxic: usize,
    pub non_toxic: usize,
    pub toxic_fraction: f64,
    pub non_toxic_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityToxicity {
    pub identity: String,
    /// Rows with a positive score for the identity.
    pub n_mentions: usize,
    pub weighted_toxicity: Option<f64>,
}

/// Equal-width bins over `[0, 1]`; the last bin is closed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub name: String,
    pub bins: Vec<usize>,
    pub absent: usize,
}

/// Symmetric Pearson matrix; `None` where a variable is constant over the
/// pairwise-complete rows or fewer than two rows overlap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub variables: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdaSummary {
    pub n_rows: usize,
    pub class_distribution: ClassDistribution,
    pub weighted_toxicity: Vec<IdentityToxicity>,
    pub subtype_histograms: Vec<Histogram>,
    pub reaction_correlations: CorrelationMatrix,
    pub identity_correlations: CorrelationMatrix,
}

/// `Σ identity·target / #{rows with identity > 0}`.
pub fn weighted_toxicity(corpus: &Corpus, identity: &str) -> Result<f64, ReportError> {
    if !corpus.registry().contains(identity) {
        return Err(ReportError::UnknownIdentity(identity.to_string()));
    }
    let (sum, n) = identity_sums(corpus, identity);
    if n == 0 {
        return Err(ReportError::Missing {
            what: format!("weighted toxicity of `{identity}`"),
            reason: "no row has a positive score".into(),
        });
    }
    Ok(sum / n as f64)
}

fn identity_sums(corpus: &Corpus, identity: &str) -> (f64, usize) {
    corpus
        .iter()
        .filter_map(|c| {
            c.identity_score(identity)
                .filter(|v| *v > 0.0)
                .map(|v| v * c.target)
        })
        .fold((0.0, 0), |(s, n), x| (s + x, n + 1))
}

/// Pearson correlation over pairs where both values are present.
pub fn pearson(xs: &[Option<f64>], ys: &[Option<f64>]) -> Option<f64> {
    let (mut n, mut mx, mut my, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (Some(x), Some(y)) = (x, y) else { continue };
        n += 1.0;
        let dx = x - mx;
        mx += dx / n;
        let dy = y - my;
        my += dy / n;
        sxx += dx * (x - mx);
        syy += dy * (y - my);
        sxy += dx * (y - my);
    }
    if n < 2.0 || sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn correlations(columns: Vec<(String, Vec<Option<f64>>)>) -> CorrelationMatrix {
    let k = columns.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
    let rs: Vec<Option<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let r = pearson(&columns[i].1, &columns[j].1);
            if i == j {
                r.map(|_| 1.0)
            } else {
                r
            }
        })
        .collect();
    let mut values = vec![vec![None; k]; k];
    for (&(i, j), r) in pairs.iter().zip(rs) {
        values[i][j] = r;
        values[j][i] = r;
    }
    CorrelationMatrix {
        variables: columns.into_iter().map(|(n, _)| n).collect(),
        values,
    }
}

pub fn stats(corpus: &Corpus) -> Result<EdaSummary, ReportError> {
    if corpus.is_empty() {
        return Err(ReportError::EmptyCorpus);
    }
    let n = corpus.len();
    let toxic = corpus.iter().filter(|c| c.label().is_toxic()).count();
    let class_distribution = ClassDistribution {
        toxic,
        non_toxic: n - toxic,
        toxic_fraction: toxic as f64 / n as f64,
        non_toxic_fraction: (n - toxic) as f64 / n as f64,
    };

    let weighted_toxicity = corpus
        .registry()
        .names()
        .map(|id| {
            let (sum, k) = identity_sums(corpus, id);
            IdentityToxicity {
                identity: id.to_string(),
                n_mentions: k,
                weighted_toxicity: (k > 0).then(|| sum / k as f64),
            }
        })
        .collect();

    let present: Vec<Subtype> = Subtype::ALL
        .into_iter()
        .filter(|s| corpus.iter().any(|c| c.subtype_scores.contains_key(s)))
        .collect();
    let subtype_histograms = present
        .iter()
        .map(|s| {
            let mut h = Histogram {
                name: s.name().to_string(),
                bins: vec![0; HISTOGRAM_BINS],
                absent: 0,
            };
            for c in corpus {
                match c.subtype_scores.get(s) {
                    Some(v) => {
                        h.bins[((v * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1)] += 1
                    }
                    None => h.absent += 1,
                }
            }
            h
        })
        .collect();

    let target = (
        "target".to_string(),
        corpus.iter().map(|c| Some(c.target)).collect::<Vec<_>>(),
    );
    let mut reaction_cols = vec![target.clone()];
    for r in Reaction::ALL {
        reaction_cols.push((
            r.name().to_string(),
            corpus
                .iter()
                .map(|c| c.reactions.get(&r).map(|v| *v as f64))
                .collect(),
        ));
    }
    let mut identity_cols = vec![target];
    for s in &present {
        identity_cols.push((
            s.name().to_string(),
            corpus
                .iter()
                .map(|c| c.subtype_scores.get(s).copied())
                .collect(),
        ));
    }
    for id in corpus.registry().names() {
        identity_cols.push((
            id.to_string(),
            corpus.iter().map(|c| c.identity_score(id)).collect(),
        ));
    }

    Ok(EdaSummary {
        n_rows: n,
        class_distribution,
        weighted_toxicity,
        subtype_histograms,
        reaction_correlations: correlations(reaction_cols),
        identity_correlations: correlations(identity_cols),
    })
}
