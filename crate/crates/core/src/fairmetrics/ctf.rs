use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::MetricError;
use crate::config::ConfigError;
use crate::corpus::Label;

const DEFAULT_TABLE: &str = include_str!("../../data/ctf_terms_en.txt");

/// Longest input, in whitespace tokens, that counterfactual evaluation accepts.
pub const DEFAULT_MAX_TOKENS: usize = 10;

/// Produces counterfactual texts by swapping identity terms within a group.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterfactualGenerator {
    groups: Vec<Vec<String>>,
    max_tokens: usize,
}

impl Default for CounterfactualGenerator {
    fn default() -> Self {
        Self::from_table(DEFAULT_TABLE).expect("embedded substitution table is valid")
    }
}

impl CounterfactualGenerator {
    pub fn new(groups: Vec<Vec<String>>, max_tokens: usize) -> Result<Self, ConfigError> {
        for g in &groups {
            if g.len() < 2 {
                return Err(ConfigError::Invalid {
                    key: "ctf_table".into(),
                    message: format!("group {g:?} needs at least two terms"),
                });
            }
            if let Some(t) = g
                .iter()
                .find(|t| t.is_empty() || t.chars().any(char::is_whitespace))
            {
                return Err(ConfigError::Invalid {
                    key: "ctf_table".into(),
                    message: format!("term {t:?} must be a single non-empty token"),
                });
            }
        }
        if max_tokens == 0 {
            return Err(ConfigError::Invalid {
                key: "ctf_max_tokens".into(),
                message: "must be positive".into(),
            });
        }
        let groups = groups
            .into_iter()
            .map(|g| g.into_iter().map(|t| t.to_lowercase()).collect())
            .collect();
        Ok(Self { groups, max_tokens })
    }

    /// Parses one comma-separated group per line; `#` starts a comment.
    pub fn from_table(table: &str) -> Result<Self, ConfigError> {
        let groups = table
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| l.split(',').map(|t| t.trim().to_string()).collect())
            .collect();
        Self::new(groups, DEFAULT_MAX_TOKENS)
    }

    pub fn load(path: &Path) -> crate::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| crate::Error::io(path, e))?;
        Ok(Self::from_table(&text)?)
    }

    pub fn with_max_tokens(mut self, max_tokens: usize) -> Result<Self, ConfigError> {
        self = Self::new(self.groups, max_tokens)?;
        Ok(self)
    }

    pub fn max_tokens(&self) -> usize {
        self.max_tokens
    }

    pub fn groups(&self) -> &[Vec<String>] {
        &self.groups
    }

    fn alternatives(&self, term: &str) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for g in self.groups.iter().filter(|g| g.iter().any(|t| t == term)) {
            for alt in g.iter().filter(|t| *t != term) {
                if !out.contains(&alt.as_str()) {
                    out.push(alt);
                }
            }
        }
        out
    }

    /// All counterfactuals of `text`, one per (present term, alternative) pair.
    /// Every occurrence of the term is replaced; surrounding punctuation is kept.
    pub fn counterfactuals(&self, text: &str) -> Result<Vec<String>, MetricError> {
        let tokens: Vec<Token> = text.split_whitespace().map(Token::split).collect();
        if tokens.len() > self.max_tokens {
            return Err(MetricError::TooManyTokens {
                tokens: tokens.len(),
                max: self.max_tokens,
            });
        }
        let mut seen: Vec<&str> = Vec::new();
        let mut out: Vec<String> = Vec::new();
        for tok in &tokens {
            if tok.key.is_empty() || seen.contains(&tok.key.as_str()) {
                continue;
            }
            seen.push(&tok.key);
            for alt in self.alternatives(&tok.key) {
                let cf = tokens
                    .iter()
                    .map(|t| {
                        let core = if t.key == tok.key { alt } else { t.core };
                        format!("{}{}{}", t.pre, core, t.post)
                    })
                    .collect::<Vec<_>>()
                    .join(" ");
                if !out.contains(&cf) {
                    out.push(cf);
                }
            }
        }
        if out.is_empty() {
            return Err(MetricError::NoCounterfactual);
        }
        Ok(out)
    }
}

struct Token<'a> {
    pre: &'a str,
    core: &'a str,
    post: &'a str,
    key: String,
}

impl<'a> Token<'a> {
    fn split(raw: &'a str) -> Self {
        let start = raw.find(|c: char| c.is_alphanumeric()).unwrap_or(raw.len());
        let end = raw
            .rfind(|c: char| c.is_alphanumeric())
            .map(|i| i + raw[i..].chars().next().map_or(1, char::len_utf8))
            .unwrap_or(start)
            .max(start);
        let core = &raw[start..end];
        Token {
            pre: &raw[..start],
            core,
            post: &raw[end..],
            key: core.to_lowercase(),
        }
    }
}

/// Mean `|f(x) − f(x′)|` over the counterfactuals of `text`.
pub fn ctf_gap<F>(
    score_fn: F,
    text: &str,
    generator: &CounterfactualGenerator,
) -> Result<f64, MetricError>
where
    F: Fn(&str) -> f64,
{
    let cfs = generator.counterfactuals(text)?;
    let base = score_fn(text);
    let total: f64 = cfs.iter().map(|cf| (base - score_fn(cf)).abs()).sum();
    Ok(total / cfs.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CtfSummary {
    pub max_tokens: usize,
    pub evaluated: usize,
    pub skipped_too_long: usize,
    pub skipped_no_identity: usize,
    pub mean_gap: Option<f64>,
    pub mean_gap_toxic: Option<f64>,
    pub mean_gap_nontoxic: Option<f64>,
}

/// Averages [`ctf_gap`] over short texts that contain at least one identity term.
pub fn ctf_summary<F>(
    score_fn: F,
    items: &[(String, Label)],
    generator: &CounterfactualGenerator,
) -> Result<CtfSummary, MetricError>
where
    F: Fn(&str) -> f64 + Sync,
{
    let gaps: Vec<Result<f64, MetricError>> = items
        .par_iter()
        .map(|(text, _)| ctf_gap(&score_fn, text, generator))
        .collect();
    let mut summary = CtfSummary {
        max_tokens: generator.max_tokens(),
        evaluated: 0,
        skipped_too_long: 0,
        skipped_no_identity: 0,
        mean_gap: None,
        mean_gap_toxic: None,
        mean_gap_nontoxic: None,
    };
    let (mut all, mut tox, mut non) = (Vec::new(), Vec::new(), Vec::new());
    for ((_, label), gap) in items.iter().zip(gaps) {
        match gap {
            Ok(g) => {
                all.push(g);
                if label.is_toxic() {
                    tox.push(g)
                } else {
                    non.push(g)
                }
            }
            Err(MetricError::TooManyTokens { .. }) => summary.skipped_too_long += 1,
            Err(MetricError::NoCounterfactual) => summary.skipped_no_identity += 1,
            Err(e) => return Err(e),
        }
    }
    let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    summary.evaluated = all.len();
    summary.mean_gap = mean(&all);
    summary.mean_gap_toxic = mean(&tox);
    summary.mean_gap_nontoxic = mean(&non);
    Ok(summary)
}
