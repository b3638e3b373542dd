//! Corpus data model, Jigsaw CSV ingestion, splitting and subgroup slicing.

mod csv_io;
mod schema;
mod synth;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

pub use csv_io::{parse_csv, write_csv, IngestStats, RejectedRow};
pub use schema::{
    identity_category, ColumnSchema, IdentityCategory, IdentityRegistry, Reaction, RegistryEntry,
    Subtype, DEFAULT_SUBGROUPS, JIGSAW_IDENTITIES,
};
pub use synth::{synth_corpus, IdentityBias, SynthSpec, SynthVocabulary};

/// Score at or above which a comment is toxic (and, by default, a subgroup member).
pub const TOXIC_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("csv parse error at line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("schema error: missing mandatory column `{0}`")]
    MissingColumn(String),
    #[error("value {value} outside [0, 1]")]
    OutOfRange { value: f64 },
    #[error("unknown identity `{name}`; known identities: {known}")]
    UnknownIdentity { name: String, known: String },
    #[error("invalid comment `{id}`: {reason}")]
    InvalidComment { id: String, reason: String },
    #[error("duplicate comment id `{0}`")]
    DuplicateId(String),
    #[error("corpus has {0} comments; at least 2 are required to split")]
    TooSmallToSplit(usize),
    #[error("invalid split fraction {0}; must lie strictly between 0 and 1")]
    InvalidFraction(f64),
    #[error("invalid synthetic corpus spec: {0}")]
    InvalidSynthSpec(String),
    #[error("write error: {0}")]
    Write(String),
}

/// Binary toxicity label. `NonToxic < Toxic`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    NonToxic,
    Toxic,
}

impl Label {
    pub fn is_toxic(self) -> bool {
        self == Label::Toxic
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Label::NonToxic => 0.0,
            Label::Toxic => 1.0,
        }
    }
}

/// Maps a continuous toxicity score to a label: toxic iff `score >= 0.5`.
pub fn binarize_target(score: f64) -> Result<Label, CorpusError> {
    if !(0.0..=1.0).contains(&score) {
        return Err(CorpusError::OutOfRange { value: score });
    }
    Ok(if score >= TOXIC_THRESHOLD {
        Label::Toxic
    } else {
        Label::NonToxic
    })
}

/// One corpus row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comment {
    pub id: String,
    pub text: String,
    pub target: f64,
    pub subtype_scores: BTreeMap<Subtype, f64>,
    /// Absent keys mean the identity was not annotated for this row.
    pub identity_scores: BTreeMap<String, f64>,
    pub reactions: BTreeMap<Reaction, u64>,
}

impl Comment {
    pub fn new(id: impl Into<String>, text: impl Into<String>, target: f64) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            target,
            subtype_scores: BTreeMap::new(),
            identity_scores: BTreeMap::new(),
            reactions: BTreeMap::new(),
        }
    }

    pub fn label(&self) -> Label {
        if self.target >= TOXIC_THRESHOLD {
            Label::Toxic
        } else {
            Label::NonToxic
        }
    }

    pub fn identity_score(&self, identity: &str) -> Option<f64> {
        self.identity_scores.get(identity).copied()
    }

    /// Identities whose score meets `threshold`, in map order.
    pub fn identities_at(&self, threshold: f64) -> impl Iterator<Item = &str> {
        self.identity_scores
            .iter()
            .filter(move |(_, v)| **v >= threshold)
            .map(|(k, _)| k.as_str())
    }

    fn validate(&self, registry: &IdentityRegistry) -> Result<(), CorpusError> {
        let bad = |reason: String| CorpusError::InvalidComment {
            id: self.id.clone(),
            reason,
        };
        if self.id.is_empty() {
            return Err(bad("empty id".into()));
        }
        if !in_unit(self.target) {
            return Err(bad(format!("target {} outside [0, 1]", self.target)));
        }
        for (s, v) in &self.subtype_scores {
            if !in_unit(*v) {
                return Err(bad(format!("{} score {v} outside [0, 1]", s.name())));
            }
        }
        for (name, v) in &self.identity_scores {
            if !registry.contains(name) {
                return Err(bad(format!("identity `{name}` not in registry")));
            }
            if !in_unit(*v) {
                return Err(bad(format!("{name} score {v} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

pub(crate) fn in_unit(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

/// An ordered, validated collection of comments. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Corpus {
    comments: Vec<Comment>,
    registry: IdentityRegistry,
}

impl Corpus {
    /// Validates ids (non-empty, unique), score ranges and identity keys.
    pub fn new(comments: Vec<Comment>, registry: IdentityRegistry) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(comments.len());
        for c in &comments {
            c.validate(&registry)?;
            if !seen.insert(c.id.as_str()) {
                return Err(CorpusError::DuplicateId(c.id.clone()));
            }
        }
        Ok(Self { comments, registry })
    }

    pub fn comments(&self) -> &[Comment] {
        &self.comments
    }

    pub fn registry(&self) -> &IdentityRegistry {
        &self.registry
    }

    pub fn len(&self) -> usize {
        self.comments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comments.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Comment> {
        self.comments.iter()
    }

    pub fn get(&self, id: &str) -> Option<&Comment> {
        self.comments.iter().find(|c| c.id == id)
    }

    /// Id → position lookup table.
    pub fn index_by_id(&self) -> std::collections::HashMap<&str, usize> {
        self.comments
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id.as_str(), i))
            .collect()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.comments.iter().map(Comment::label).collect()
    }

    fn subset(&self, mut indices: Vec<usize>) -> Corpus {
        indices.sort_unstable();
        Corpus {
            comments: indices
                .into_iter()
                .map(|i| self.comments[i].clone())
                .collect(),
            registry: self.registry.clone(),
        }
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Comment;
    type IntoIter = std::slice::Iter<'a, Comment>;

    fn into_iter(self) -> Self::IntoIter {
        self.comments.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
            seed: 42,
        }
    }
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> Result<Self, CorpusError> {
        let spec = Self {
            train_fraction,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), CorpusError> {
        if self.train_fraction > 0.0 && self.train_fraction < 1.0 {
            Ok(())
        } else {
            Err(CorpusError::InvalidFraction(self.train_fraction))
        }
    }

    /// `round(train_fraction * n)`, kept within `[1, n - 1]` so neither side is empty.
    pub fn train_size(&self, n: usize) -> usize {
        let raw = (self.train_fraction * n as f64).round() as usize;
        raw.clamp(1, n.saturating_sub(1).max(1))
    }
}

/// Seeded Fisher-Yates shuffle of row positions followed by a prefix cut.
///
/// Both halves keep the corpus' original relative order.
pub fn split(corpus: &Corpus, spec: &SplitSpec) -> Result<(Corpus, Corpus), CorpusError> {
    spec.validate()?;
    let n = corpus.len();
    if n < 2 {
        return Err(CorpusError::TooSmallToSplit(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    order.shuffle(&mut rng);
    let test = order.split_off(spec.train_size(n));
    Ok((corpus.subset(order), corpus.subset(test)))
}

/// Comments whose score for one identity meets a threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgroupSlice {
    pub identity: String,
    pub member_ids: BTreeSet<String>,
    pub membership_threshold: f64,
}

impl SubgroupSlice {
    pub fn contains(&self, id: &str) -> bool {
        self.member_ids.contains(id)
    }

    pub fn len(&self) -> usize {
        self.member_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.member_ids.is_empty()
    }
}

/// Rows with an absent identity cell are never members.
pub fn subgroup_members(
    corpus: &Corpus,
    identity: &str,
    threshold: f64,
) -> Result<SubgroupSlice, CorpusError> {
    if !corpus.registry().contains(identity) {
        return Err(CorpusError::UnknownIdentity {
            name: identity.to_string(),
            known: corpus.registry().names().collect::<Vec<_>>().join(", "),
        });
    }
    let member_ids = corpus
        .iter()
        .filter(|c| c.identity_score(identity).is_some_and(|s| s >= threshold))
        .map(|c| c.id.clone())
        .collect();
    Ok(SubgroupSlice {
        identity: identity.to_string(),
        member_ids,
        membership_threshold: threshold,
    })
}
