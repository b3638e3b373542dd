use thiserror::Error;

use crate::config::ConfigError;
use crate::corpus::CorpusError;
use crate::fairmetrics::MetricError;
use crate::logreg::LogRegError;
use crate::report::ReportError;
use crate::tfidf::TfidfError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate-level error. Each module has its own error enum; this wraps them.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Tfidf(#[from] TfidfError),
    #[error(transparent)]
    LogReg(#[from] LogRegError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short machine-parsable category used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Corpus(_) => "corpus",
            Error::Tfidf(_) => "tfidf",
            Error::LogReg(_) => "logreg",
            Error::Metric(_) => "metric",
            Error::Report(_) => "report",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
