//! Run configuration: a flat TOML key-value file where every key is optional
//! and unknown keys are rejected.
//!
//! Column overrides use `column_<field> = "header"` keys, e.g.
//! `column_comment_text = "body"` or `column_female = "gender_female"`.
//! Relative file paths are resolved against the config file's directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::corpus::{ColumnSchema, SplitSpec, DEFAULT_SUBGROUPS, TOXIC_THRESHOLD};
use crate::fairmetrics::{CounterfactualGenerator, MinCounts, ScoreConfig};
use crate::logreg::{ClassWeights, Optimizer, TrainConfig};
use crate::report::{EvalOptions, PinnedOptions};
use crate::textprep::{self, CleanConfig};
use crate::tfidf::DEFAULT_MAX_FEATURES;
use crate::{Error, Result};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: &str, message: impl std::fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message: message.to_string(),
    }
}

/// Raw file contents; `None` means "use the default".
#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub membership_threshold: Option<f64>,
    pub subgroups: Option<Vec<String>>,
    pub provenance: Option<String>,

    pub split_train_fraction: Option<f64>,
    pub split_seed: Option<u64>,

    pub strip_html: Option<bool>,
    pub keep_alpha_only: Option<bool>,
    pub remove_stopwords: Option<bool>,
    pub stopwords_file: Option<PathBuf>,
    pub contractions_file: Option<PathBuf>,
    /// 0 keeps every term.
    pub max_features: Option<usize>,

    pub learning_rate: Option<f64>,
    pub batch_size: Option<usize>,
    pub epochs: Option<usize>,
    pub class_weights: Option<String>,
    pub train_seed: Option<u64>,
    pub optimizer: Option<String>,
    pub adam_beta1: Option<f64>,
    pub adam_beta2: Option<f64>,
    pub adam_epsilon: Option<f64>,
    pub l2: Option<f64>,

    pub score_w0: Option<f64>,
    pub score_w_subgroup: Option<f64>,
    pub score_w_bpsn: Option<f64>,
    pub score_w_bnsp: Option<f64>,
    pub score_power: Option<f64>,
    pub min_subgroup_pos: Option<usize>,
    pub min_subgroup_neg: Option<usize>,

    pub error_gaps: Option<bool>,
    pub error_threshold: Option<f64>,

    pub pinned_auc: Option<bool>,
    pub pinned_sample_size: Option<usize>,
    pub pinned_seed: Option<u64>,

    pub ctf: Option<bool>,
    pub ctf_table: Option<PathBuf>,
    pub ctf_max_tokens: Option<usize>,
}

/// Fully resolved settings used by the workflows.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub membership_threshold: f64,
    pub subgroups: Vec<String>,
    pub provenance: Option<String>,
    pub columns: ColumnSchema,
    pub split: SplitSpec,
    pub clean: CleanConfig,
    pub max_features: Option<usize>,
    pub train: TrainConfig,
    pub score: ScoreConfig,
    pub eval: EvalOptions,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            membership_threshold: TOXIC_THRESHOLD,
            subgroups: DEFAULT_SUBGROUPS.iter().map(|s| s.to_string()).collect(),
            provenance: None,
            columns: ColumnSchema::default(),
            split: SplitSpec::default(),
            clean: CleanConfig::default(),
            max_features: Some(DEFAULT_MAX_FEATURES),
            train: TrainConfig::default(),
            score: ScoreConfig::default(),
            eval: EvalOptions::default(),
        }
    }
}

impl Settings {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        let column_keys: Vec<String> = table
            .keys()
            .filter(|k| k.starts_with("column_"))
            .cloned()
            .collect();
        let mut columns = ColumnSchema::default();
        for key in column_keys {
            let value = table.remove(&key).expect("key listed above");
            let header = value
                .as_str()
                .ok_or_else(|| invalid(&key, "expected a string"))?;
            if !columns.set_column(&key["column_".len()..], header) {
                return Err(ConfigError::UnknownKey(key).into());
            }
        }
        let file = ConfigFile::deserialize(toml::Value::Table(table)).map_err(|e| {
            let msg = e.to_string();
            match msg
                .split('`')
                .nth(1)
                .filter(|_| msg.contains("unknown field"))
            {
                Some(k) => ConfigError::UnknownKey(k.to_string()),
                None => ConfigError::Parse(msg),
            }
        })?;
        let mut settings = Settings {
            columns,
            ..Settings::default()
        };
        settings.apply(file, base_dir)?;
        Ok(settings)
    }

    fn apply(&mut self, f: ConfigFile, base: &Path) -> Result<()> {
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };

        if let Some(t) = f.membership_threshold {
            if !(0.0..=1.0).contains(&t) {
                return Err(invalid("membership_threshold", "must lie in [0, 1]").into());
            }
            self.membership_threshold = t;
        }
        if let Some(s) = f.subgroups {
            if s.is_empty() {
                return Err(invalid("subgroups", "list is empty").into());
            }
            self.subgroups = s;
        }
        self.provenance = f.provenance.or(self.provenance.take());

        let fraction = f.split_train_fraction.unwrap_or(self.split.train_fraction);
        let seed = f.split_seed.unwrap_or(self.split.seed);
        self.split =
            SplitSpec::new(fraction, seed).map_err(|e| invalid("split_train_fraction", e))?;

        if let Some(v) = f.strip_html {
            self.clean.strip_html = v;
        }
        if let Some(v) = f.keep_alpha_only {
            self.clean.keep_alpha_only = v;
        }
        if let Some(v) = f.remove_stopwords {
            self.clean.remove_stopwords = v;
        }
        if let Some(p) = f.stopwords_file {
            self.clean.stopword_list = textprep::load_stopwords(resolve(p))?;
        }
        if let Some(p) = f.contractions_file {
            self.clean.contraction_map = textprep::load_contractions(resolve(p))?;
        }
        if let Some(m) = f.max_features {
            self.max_features = (m > 0).then_some(m);
        }

        let t = &mut self.train;
        if let Some(v) = f.learning_rate {
            t.learning_rate = v;
        }
        if let Some(v) = f.batch_size {
            t.batch_size = v;
        }
        if let Some(v) = f.epochs {
            t.epochs = v;
        }
        if let Some(v) = f.class_weights {
            t.class_weights = v
                .parse::<ClassWeights>()
                .map_err(|e| invalid("class_weights", e))?;
        }
        if let Some(v) = f.train_seed {
            t.seed = v;
        }
        if let Some(v) = f.optimizer {
            t.optimizer = v
                .parse::<Optimizer>()
                .map_err(|e| invalid("optimizer", e))?;
        }
        if let Some(v) = f.adam_beta1 {
            t.adam.beta1 = v;
        }
        if let Some(v) = f.adam_beta2 {
            t.adam.beta2 = v;
        }
        if let Some(v) = f.adam_epsilon {
            t.adam.epsilon = v;
        }
        if let Some(v) = f.l2 {
            t.l2 = v;
        }
        t.validate().map_err(|e| invalid("training", e))?;

        let s = &mut self.score;
        if let Some(v) = f.score_w0 {
            s.w0 = v;
        }
        if let Some(v) = f.score_w_subgroup {
            s.w_subgroup = v;
        }
        if let Some(v) = f.score_w_bpsn {
            s.w_bpsn = v;
        }
        if let Some(v) = f.score_w_bnsp {
            s.w_bnsp = v;
        }
        if let Some(v) = f.score_power {
            s.power = v;
        }
        s.min_counts = MinCounts {
            positives: f.min_subgroup_pos.unwrap_or(s.min_counts.positives),
            negatives: f.min_subgroup_neg.unwrap_or(s.min_counts.negatives),
        };
        s.validate().map_err(|e| invalid("score", e))?;

        let e = &mut self.eval;
        if let Some(t) = f.error_threshold {
            if !t.is_finite() {
                return Err(invalid("error_threshold", "must be finite").into());
            }
            e.error_gap_threshold = Some(t);
        }
        if f.error_gaps == Some(false) {
            e.error_gap_threshold = None;
        } else if f.error_gaps == Some(true) && e.error_gap_threshold.is_none() {
            e.error_gap_threshold = Some(TOXIC_THRESHOLD);
        }

        let pinned_wanted = f.pinned_auc.unwrap_or(e.pinned.is_some());
        if pinned_wanted {
            let d = e.pinned.unwrap_or_default();
            let sample_size = f.pinned_sample_size.unwrap_or(d.sample_size);
            if sample_size == 0 {
                return Err(invalid("pinned_sample_size", "must be positive").into());
            }
            e.pinned = Some(PinnedOptions {
                sample_size,
                seed: f.pinned_seed.unwrap_or(d.seed),
            });
        } else {
            e.pinned = None;
        }

        if f.ctf.unwrap_or(false) || f.ctf_table.is_some() {
            let generator = match f.ctf_table {
                Some(p) => CounterfactualGenerator::load(&resolve(p))?,
                None => CounterfactualGenerator::default(),
            };
            let generator = match f.ctf_max_tokens {
                Some(m) => generator.with_max_tokens(m)?,
                None => generator,
            };
            e.ctf = (f.ctf != Some(false)).then_some(generator);
        }
        Ok(())
    }
}

/// Hyperparameter grid: every key holds an array; the grid is their cartesian
/// product in the order learning_rate, class_weights, batch_size, epochs, l2.
/// Absent keys keep the base configuration's value.
#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub learning_rate: Option<Vec<f64>>,
    pub class_weights: Option<Vec<String>>,
    pub batch_size: Option<Vec<usize>>,
    pub epochs: Option<Vec<usize>>,
    pub l2: Option<Vec<f64>>,
}

impl GridFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?)
    }

    pub fn expand(&self, base: &TrainConfig) -> Result<Vec<TrainConfig>> {
        fn axis<T: Clone>(key: &str, v: &Option<Vec<T>>, default: T) -> Result<Vec<T>> {
            match v {
                Some(v) if v.is_empty() => Err(invalid(key, "empty list").into()),
                Some(v) => Ok(v.clone()),
                None => Ok(vec![default]),
            }
        }
        let weights = match &self.class_weights {
            Some(ws) if ws.is_empty() => return Err(invalid("class_weights", "empty list").into()),
            Some(ws) => ws
                .iter()
                .map(|w| {
                    w.parse::<ClassWeights>()
                        .map_err(|e| invalid("class_weights", e))
                })
                .collect::<std::result::Result<Vec<_>, _>>()?,
            None => vec![base.class_weights],
        };
        let mut grid = Vec::new();
        for lr in axis("learning_rate", &self.learning_rate, base.learning_rate)? {
            for cw in &weights {
                for bs in axis("batch_size", &self.batch_size, base.batch_size)? {
                    for ep in axis("epochs", &self.epochs, base.epochs)? {
                        for l2 in axis("l2", &self.l2, base.l2)? {
                            let cfg = TrainConfig {
                                learning_rate: lr,
                                class_weights: *cw,
                                batch_size: bs,
                                epochs: ep,
                                l2,
                                ..base.clone()
                            };
                            cfg.validate().map_err(|e| invalid("grid", e))?;
                            grid.push(cfg);
                        }
                    }
                }
            }
        }
        Ok(grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Settings> {
        Settings::from_toml(text, Path::new("."))
    }

    #[test]
    fn empty_file_is_all_defaults() {
        assert_eq!(parse("").unwrap(), Settings::default());
    }

    #[test]
    fn overrides_apply() {
        let s = parse(
            r#"
            membership_threshold = 0.3
            subgroups = ["male", "muslim"]
            learning_rate = 0.01
            class_weights = "none"
            max_features = 0
            score_power = 1.0
            min_subgroup_pos = 5
            column_comment_text = "body"
            pinned_auc = true
            pinned_sample_size = 50
            error_gaps = false
            "#,
        )
        .unwrap();
        assert_eq!(s.membership_threshold, 0.3);
        assert_eq!(s.subgroups, vec!["male", "muslim"]);
        assert_eq!(s.train.learning_rate, 0.01);
        assert_eq!(s.train.class_weights, ClassWeights::Uniform);
        assert_eq!(s.max_features, None);
        assert_eq!(s.score.power, 1.0);
        assert_eq!(s.score.min_counts.positives, 5);
        assert_eq!(s.columns.text, "body");
        assert_eq!(s.eval.pinned.unwrap().sample_size, 50);
        assert_eq!(s.eval.error_gap_threshold, None);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let err = parse("learning_rat = 0.1").unwrap_err();
        assert!(
            matches!(err, Error::Config(ConfigError::UnknownKey(ref k)) if k == "learning_rat"),
            "{err}"
        );
        let err = parse("column_nonsense = \"x\"").unwrap_err();
        assert!(matches!(err, Error::Config(ConfigError::UnknownKey(_))));
    }

    #[test]
    fn bad_values_are_errors() {
        assert!(parse("membership_threshold = 1.5").is_err());
        assert!(parse("learning_rate = -1.0").is_err());
        assert!(parse("class_weights = \"heavy\"").is_err());
        assert!(parse("split_train_fraction = 1.0").is_err());
        assert!(parse("subgroups = []").is_err());
        assert!(parse("score_w0 = -0.5").is_err());
        assert!(parse("learning_rate = \"fast\"").is_err());
        assert!(parse("not toml at all [").is_err());
    }

    #[test]
    fn ctf_uses_default_table() {
        let s = parse("ctf = true\nctf_max_tokens = 8").unwrap();
        assert_eq!(s.eval.ctf.unwrap().max_tokens(), 8);
    }

    #[test]
    fn grid_expansion_order() {
        let g = GridFile::from_toml(
            "learning_rate = [0.1, 0.01]\nclass_weights = [\"balanced\", \"none\"]",
        )
        .unwrap();
        let grid = g.expand(&TrainConfig::default()).unwrap();
        let got: Vec<(f64, ClassWeights)> = grid
            .iter()
            .map(|c| (c.learning_rate, c.class_weights))
            .collect();
        assert_eq!(
            got,
            vec![
                (0.1, ClassWeights::Balanced),
                (0.1, ClassWeights::Uniform),
                (0.01, ClassWeights::Balanced),
                (0.01, ClassWeights::Uniform),
            ]
        );
        assert_eq!(
            GridFile::default()
                .expand(&TrainConfig::default())
                .unwrap()
                .len(),
            1
        );
        assert!(GridFile::from_toml("learning_rate = []")
            .unwrap()
            .expand(&TrainConfig::default())
            .is_err());
        assert!(GridFile::from_toml("momentum = [0.9]").is_err());
    }
}
