//! File-level jobs: each reads its inputs from disk, runs one stage of the
//! pipeline and writes its artifact. The `toxbias` binary is a thin wrapper.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{ConfigError, GridFile, Settings};
use crate::corpus::{self, parse_csv, split, write_csv, Corpus, IngestStats, Label, SynthSpec};
use crate::fairmetrics::roc_auc_labels;
use crate::logreg::{self, default_grid, grid_search, LogRegModel, TrainConfig, TrainOutcome};
use crate::report::{
    evaluate_with, import_predictions, render_eda, render_grid, render_report, stats, CtfInput,
    Format, PredictionFile, ReportError,
};
use crate::textprep::{clean_tokens, CleanConfig};
use crate::tfidf::{self, LineReader, SparseVector, TfidfError, Vocabulary};
use crate::{Error, Result};

const PIPELINE_MAGIC: &str = "toxbias-pipeline";
const PIPELINE_VERSION: u32 = 1;

/// Cleaning rules, vocabulary and classifier bundled into one scorer over raw text.
#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    pub clean: CleanConfig,
    pub vocabulary: Vocabulary,
    pub model: LogRegModel,
}

impl Pipeline {
    /// Cleans and vectorizes `corpus`, then trains the classifier on it.
    pub fn fit(
        corpus: &Corpus,
        clean: &CleanConfig,
        max_features: Option<usize>,
        train: &TrainConfig,
    ) -> Result<(Self, TrainOutcome)> {
        let tokens: Vec<_> = corpus
            .comments()
            .par_iter()
            .map(|c| clean_tokens(&c.text, clean))
            .collect();
        let vocabulary = tfidf::fit(&tokens, max_features)?;
        let features: Vec<SparseVector> = tokens
            .par_iter()
            .map(|t| tfidf::transform(t, &vocabulary))
            .collect();
        let outcome = logreg::train(&features, &corpus.labels(), train)?;
        let pipeline = Self {
            clean: clean.clone(),
            vocabulary,
            model: outcome.model.clone(),
        };
        Ok((pipeline, outcome))
    }

    pub fn features(&self, text: &str) -> SparseVector {
        tfidf::transform(&clean_tokens(text, &self.clean), &self.vocabulary)
    }

    pub fn score_text(&self, text: &str) -> f64 {
        self.model
            .predict_proba(&self.features(text))
            .expect("vocabulary and model dimensions agree")
    }

    /// Scores every comment, in corpus order.
    pub fn score_corpus(&self, corpus: &Corpus) -> Vec<f64> {
        corpus
            .comments()
            .par_iter()
            .map(|c| self.score_text(&c.text))
            .collect()
    }

    pub fn predictions(&self, corpus: &Corpus) -> PredictionFile {
        let scores = self.score_corpus(corpus);
        PredictionFile::new(corpus.iter().map(|c| c.id.clone()).zip(scores).collect())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e: std::io::Error| Error::from(TfidfError::Io(e.to_string()));
        let c = &self.clean;
        writeln!(w, "{PIPELINE_MAGIC} {PIPELINE_VERSION}").map_err(io)?;
        writeln!(w, "strip_html {}", c.strip_html).map_err(io)?;
        writeln!(w, "keep_alpha_only {}", c.keep_alpha_only).map_err(io)?;
        writeln!(w, "remove_stopwords {}", c.remove_stopwords).map_err(io)?;
        writeln!(w, "stopwords {}", c.stopword_list.len()).map_err(io)?;
        for s in &c.stopword_list {
            writeln!(w, "{s}").map_err(io)?;
        }
        writeln!(w, "contractions {}", c.contraction_map.len()).map_err(io)?;
        for (k, v) in &c.contraction_map {
            writeln!(w, "{k}={v}").map_err(io)?;
        }
        self.vocabulary.write_to(&mut w)?;
        self.model.write_to(&mut w)?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: &mut R) -> Result<Self> {
        let clean = {
            let mut lines = LineReader::new(r);
            let version: u32 = lines.keyed(PIPELINE_MAGIC)?;
            if version != PIPELINE_VERSION {
                return Err(lines
                    .err(format!("unsupported pipeline version {version}"))
                    .into());
            }
            let strip_html = lines.keyed("strip_html")?;
            let keep_alpha_only = lines.keyed("keep_alpha_only")?;
            let remove_stopwords = lines.keyed("remove_stopwords")?;
            let n: usize = lines.keyed("stopwords")?;
            let stopword_list = (0..n)
                .map(|_| lines.next_line())
                .collect::<std::result::Result<_, _>>()?;
            let n: usize = lines.keyed("contractions")?;
            let mut contraction_map = std::collections::BTreeMap::new();
            for _ in 0..n {
                let line = lines.next_line()?;
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| lines.err("expected `key=expansion`".into()))?;
                contraction_map.insert(k.to_string(), v.to_string());
            }
            CleanConfig {
                stopword_list,
                contraction_map,
                strip_html,
                keep_alpha_only,
                remove_stopwords,
            }
        };
        let vocabulary = Vocabulary::read_from(r)?;
        let model = LogRegModel::read_from(r)?;
        if model.dimension() != vocabulary.len() {
            return Err(TfidfError::Format {
                line: 0,
                message: format!(
                    "model dimension {} does not match vocabulary size {}",
                    model.dimension(),
                    vocabulary.len()
                ),
            }
            .into());
        }
        Ok(Self {
            clean,
            vocabulary,
            model,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w)?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(&mut BufReader::new(file))
    }
}

pub fn load_settings(config: Option<&Path>) -> Result<Settings> {
    match config {
        Some(p) => Settings::load(p),
        None => Ok(Settings::default()),
    }
}

pub fn read_corpus(path: &Path, settings: &Settings) -> Result<(Corpus, IngestStats)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_csv(BufReader::new(file), &settings.columns)?)
}

/// Writes `text` to `out`, creating or truncating the file.
pub fn write_text(out: &Path, text: &str) -> Result<()> {
    std::fs::write(out, text).map_err(|e| Error::io(out, e))
}

fn write_corpus(path: &Path, corpus: &Corpus) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(corpus, BufWriter::new(file))?;
    Ok(())
}

fn format_for(out: Option<&Path>) -> Format {
    out.map_or(Format::Plain, Format::from_path)
}

/// Rendered output of a job plus ingest diagnostics for the caller to print.
#[derive(Debug, Clone)]
pub struct JobOutput {
    pub rendered: String,
    pub ingest: Option<IngestStats>,
}

pub struct StatsJob {
    pub input: PathBuf,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

pub fn run_stats(job: &StatsJob) -> Result<JobOutput> {
    let settings = load_settings(job.config.as_deref())?;
    let (corpus, ingest) = read_corpus(&job.input, &settings)?;
    let rendered = render_eda(&stats(&corpus)?, format_for(job.out.as_deref()));
    if let Some(out) = &job.out {
        write_text(out, &rendered)?;
    }
    Ok(JobOutput {
        rendered,
        ingest: Some(ingest),
    })
}

pub struct TrainJob {
    pub input: PathBuf,
    pub config: Option<PathBuf>,
    pub model_out: PathBuf,
    pub split_seed: Option<u64>,
    /// Where to write the held-out split as CSV.
    pub test_out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSummary {
    pub n_train: usize,
    pub n_test: usize,
    pub vocabulary_size: usize,
    pub loss_trace: Vec<f64>,
    /// Held-out AUC; `None` when the test split has a single class.
    pub test_auc: Option<f64>,
    pub ingest: IngestStats,
}

pub fn run_train(job: &TrainJob) -> Result<TrainSummary> {
    let mut settings = load_settings(job.config.as_deref())?;
    if let Some(seed) = job.split_seed {
        settings.split.seed = seed;
    }
    let (corpus, ingest) = read_corpus(&job.input, &settings)?;
    let (train_part, test_part) = split(&corpus, &settings.split)?;
    let (pipeline, outcome) = Pipeline::fit(
        &train_part,
        &settings.clean,
        settings.max_features,
        &settings.train,
    )?;
    pipeline.save(&job.model_out)?;
    if let Some(out) = &job.test_out {
        write_corpus(out, &test_part)?;
    }
    let test_auc = roc_auc_labels(&test_part.labels(), &pipeline.score_corpus(&test_part)).ok();
    Ok(TrainSummary {
        n_train: train_part.len(),
        n_test: test_part.len(),
        vocabulary_size: pipeline.vocabulary.len(),
        loss_trace: outcome.loss_trace,
        test_auc,
        ingest,
    })
}

pub struct PredictJob {
    pub model: PathBuf,
    pub input: PathBuf,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
}

pub fn run_predict(job: &PredictJob) -> Result<IngestStats> {
    let settings = load_settings(job.config.as_deref())?;
    let pipeline = Pipeline::load(&job.model)?;
    let (corpus, ingest) = read_corpus(&job.input, &settings)?;
    let preds = pipeline.predictions(&corpus);
    let file = File::create(&job.out).map_err(|e| Error::io(&job.out, e))?;
    preds.write_csv(BufWriter::new(file))?;
    Ok(ingest)
}

pub struct EvaluateJob {
    pub input: PathBuf,
    pub predictions: PathBuf,
    /// Overrides the configured subgroup list.
    pub subgroups: Option<Vec<String>>,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    /// Pipeline bundle used as the scorer for the counterfactual section.
    pub model: Option<PathBuf>,
    pub provenance: Option<String>,
}

pub fn run_evaluate(job: &EvaluateJob) -> Result<JobOutput> {
    let settings = load_settings(job.config.as_deref())?;
    let (corpus, ingest) = read_corpus(&job.input, &settings)?;
    let subgroups = job
        .subgroups
        .clone()
        .unwrap_or_else(|| settings.subgroups.clone());
    if let Some(g) = subgroups.iter().find(|g| !corpus.registry().contains(g)) {
        return Err(ReportError::UnknownIdentity(g.clone()).into());
    }
    let file = File::open(&job.predictions).map_err(|e| Error::io(&job.predictions, e))?;
    let preds = PredictionFile::read_csv(BufReader::new(file))?;
    let scored = import_predictions(&preds, &corpus, settings.membership_threshold)?;

    let pipeline = match (&settings.eval.ctf, &job.model) {
        (Some(_), Some(m)) => Some(Pipeline::load(m)?),
        (Some(_), None) => {
            return Err(ConfigError::Invalid {
                key: "ctf".into(),
                message: "counterfactual evaluation needs a model bundle (--model)".into(),
            }
            .into())
        }
        _ => None,
    };
    let items: Vec<(String, Label)> = match &pipeline {
        Some(_) => {
            let index = corpus.index_by_id();
            scored
                .iter()
                .map(|e| {
                    (
                        corpus.comments()[index[e.id.as_str()]].text.clone(),
                        e.label,
                    )
                })
                .collect()
        }
        None => Vec::new(),
    };
    let scorer = |t: &str| pipeline.as_ref().map_or(0.0, |p| p.score_text(t));
    let ctf = pipeline.as_ref().map(|_| CtfInput {
        scorer: &scorer,
        items: &items,
    });

    let mut report = evaluate_with(&scored, &subgroups, &settings.score, &settings.eval, ctf)?;
    report.provenance = job.provenance.clone().or(settings.provenance.clone());
    let rendered = render_report(&report, format_for(job.out.as_deref()));
    if let Some(out) = &job.out {
        write_text(out, &rendered)?;
    }
    Ok(JobOutput {
        rendered,
        ingest: Some(ingest),
    })
}

pub struct GridJob {
    pub input: PathBuf,
    /// Without a grid file the default learning-rate × class-weight grid is used.
    pub grid: Option<PathBuf>,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

/// Splits the input into train/validation parts with the configured split,
/// fits the vocabulary on the train part and searches the grid.
pub fn run_grid_search(job: &GridJob) -> Result<JobOutput> {
    let settings = load_settings(job.config.as_deref())?;
    let grid = match &job.grid {
        Some(p) => GridFile::load(p)?.expand(&settings.train)?,
        None => default_grid(&settings.train),
    };
    let (corpus, ingest) = read_corpus(&job.input, &settings)?;
    let (train_part, val_part) = split(&corpus, &settings.split)?;
    let clean = &settings.clean;
    let train_tokens: Vec<_> = train_part
        .comments()
        .par_iter()
        .map(|c| clean_tokens(&c.text, clean))
        .collect();
    let vocab = tfidf::fit(&train_tokens, settings.max_features)?;
    let train_x: Vec<SparseVector> = train_tokens
        .par_iter()
        .map(|t| tfidf::transform(t, &vocab))
        .collect();
    let val_x: Vec<SparseVector> = val_part
        .comments()
        .par_iter()
        .map(|c| tfidf::transform(&clean_tokens(&c.text, clean), &vocab))
        .collect();
    let result = grid_search(
        (&train_x, &train_part.labels()),
        (&val_x, &val_part.labels()),
        &grid,
    )?;
    let rendered = render_grid(&result, format_for(job.out.as_deref()));
    if let Some(out) = &job.out {
        write_text(out, &rendered)?;
    }
    Ok(JobOutput {
        rendered,
        ingest: Some(ingest),
    })
}

pub struct SynthJob {
    pub out: PathBuf,
    pub spec: SynthSpec,
}

pub fn run_synth(job: &SynthJob) -> Result<Corpus> {
    let corpus = corpus::synth_corpus(&job.spec)?;
    write_corpus(&job.out, &corpus)?;
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::synth_corpus;

    #[test]
    fn pipeline_round_trip() {
        let corpus = synth_corpus(&SynthSpec {
            n_comments: 300,
            ..SynthSpec::default()
        })
        .unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.01,
            epochs: 2,
            ..TrainConfig::default()
        };
        let (p, _) = Pipeline::fit(&corpus, &CleanConfig::default(), Some(200), &cfg).unwrap();
        let mut buf = Vec::new();
        p.write_to(&mut buf).unwrap();
        let back = Pipeline::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back, p);
        let text = "You are a stupid muslim";
        assert_eq!(back.score_text(text), p.score_text(text));
    }

    #[test]
    fn truncated_bundle_is_rejected() {
        assert!(
            Pipeline::read_from(&mut "toxbias-pipeline 1\nstrip_html true\n".as_bytes()).is_err()
        );
        assert!(Pipeline::read_from(&mut "toxbias-pipeline 9\n".as_bytes()).is_err());
    }
}
