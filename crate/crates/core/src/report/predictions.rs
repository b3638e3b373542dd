use std::collections::HashSet;
use std::io::{Read, Write};

use super::ReportError;
use crate::corpus::Corpus;
use crate::fairmetrics::ScoredExample;

/// Model scores keyed by comment id, stored as CSV with header `id,score`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PredictionFile {
    /// Free-form label of the producing model, e.g. `logreg` or `external-bert`.
    pub provenance: Option<String>,
    pub rows: Vec<(String, f64)>,
}

impl PredictionFile {
    pub fn new(rows: Vec<(String, f64)>) -> Self {
        Self {
            provenance: None,
            rows,
        }
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = Some(provenance.into());
        self
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reads and validates `id,score` rows. Line numbers in errors are 1-based
    /// and count the header.
    pub fn read_csv<R: Read>(source: R) -> Result<Self, ReportError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(source);
        let header = reader.headers().map_err(|e| ReportError::Csv {
            line: 1,
            message: e.to_string(),
        })?;
        let col = |name: &str| header.iter().position(|h| h.trim() == name);
        let (Some(id_col), Some(score_col)) = (col("id"), col("score")) else {
            return Err(ReportError::Csv {
                line: 1,
                message: "header must contain `id` and `score`".into(),
            });
        };
        let mut rows = Vec::new();
        let mut seen = HashSet::new();
        for record in reader.records() {
            let record = record.map_err(|e| ReportError::Csv {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line());
            let id = record.get(id_col).unwrap_or("").trim().to_string();
            if id.is_empty() {
                return Err(ReportError::Csv {
                    line,
                    message: "empty id".into(),
                });
            }
            let raw = record.get(score_col).unwrap_or("").trim();
            let score: f64 = raw.parse().map_err(|_| ReportError::Csv {
                line,
                message: format!("score `{raw}` is not a number"),
            })?;
            if !(0.0..=1.0).contains(&score) {
                return Err(ReportError::ScoreOutOfRange { line, score });
            }
            if !seen.insert(id.clone()) {
                return Err(ReportError::DuplicateId { line, id });
            }
            rows.push((id, score));
        }
        Ok(Self::new(rows))
    }

    /// Writes `id,score` with shortest round-trip float formatting.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<(), ReportError> {
        let mut w = csv::Writer::from_writer(sink);
        let err = |e: csv::Error| ReportError::Write(e.to_string());
        w.write_record(["id", "score"]).map_err(err)?;
        for (id, score) in &self.rows {
            w.write_record([id.as_str(), &score.to_string()])
                .map_err(err)?;
        }
        w.flush().map_err(|e| ReportError::Write(e.to_string()))
    }
}

/// Joins scores to corpus labels and identity memberships (at `threshold`),
/// in prediction-file order.
pub fn import_predictions(
    file: &PredictionFile,
    corpus: &Corpus,
    threshold: f64,
) -> Result<Vec<ScoredExample>, ReportError> {
    let index = corpus.index_by_id();
    let unknown: Vec<&String> = file
        .rows
        .iter()
        .map(|(id, _)| id)
        .filter(|id| !index.contains_key(id.as_str()))
        .collect();
    if !unknown.is_empty() {
        return Err(ReportError::UnknownIds {
            count: unknown.len(),
            first: unknown.iter().take(5).map(|s| s.to_string()).collect(),
        });
    }
    let mut seen = HashSet::new();
    file.rows
        .iter()
        .map(|(id, score)| {
            if !seen.insert(id.as_str()) {
                return Err(ReportError::DuplicateId {
                    line: 0,
                    id: id.clone(),
                });
            }
            let c = &corpus.comments()[index[id.as_str()]];
            Ok(ScoredExample::new(
                id.clone(),
                c.label(),
                *score,
                c.identities_at(threshold),
            )?)
        })
        .collect()
}
