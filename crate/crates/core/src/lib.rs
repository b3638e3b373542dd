//! Toxic-comment classification and unintended identity-bias auditing.
//!
//! The crate is organised as a pipeline:
//!
//! - [`corpus`]: Jigsaw-style CSV ingestion, label binarization, seeded splits,
//!   identity subgroup slices and a synthetic corpus generator.
//! - [`textprep`]: HTML stripping, lowercasing, contraction expansion,
//!   punctuation/stopword/non-alphabetic token removal.
//! - [`tfidf`]: vocabulary fitting and sparse TF-IDF feature vectors.
//! - [`logreg`]: class-weighted logistic regression trained with Adam, plus grid search.
//! - [`fairmetrics`]: ROC-AUC, Subgroup/BPSN/BNSP-AUC, generalized-mean score,
//!   FPED/FNED, counterfactual token fairness gap and pinned AUC.
//! - [`report`]: EDA statistics, prediction import, bias evaluation and report rendering.
//! - [`workflow`]: file-level jobs behind the `toxbias` command-line tool.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod config;
pub mod corpus;
pub mod error;
pub mod fairmetrics;
pub mod logreg;
pub mod report;
pub mod textprep;
pub mod tfidf;
pub mod workflow;

pub use error::{Error, Result};
