//! Seeded synthetic corpora that mimic the Jigsaw class imbalance and let
//! identity terms co-occur with toxicity at configured rates.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Comment, Corpus, CorpusError, IdentityRegistry, Reaction, Subtype};

const NEUTRAL_WORDS: &[&str] = &[
    "article",
    "policy",
    "city",
    "council",
    "budget",
    "school",
    "road",
    "weather",
    "market",
    "election",
    "report",
    "study",
    "community",
    "project",
    "plan",
    "house",
    "family",
    "history",
    "government",
    "economy",
    "river",
    "forest",
    "music",
    "game",
    "team",
    "season",
    "ticket",
    "garden",
    "library",
    "museum",
    "bridge",
    "train",
    "coffee",
    "morning",
    "evening",
    "summer",
    "winter",
    "question",
    "answer",
    "opinion",
    "editor",
    "story",
    "letter",
    "office",
    "vote",
    "people",
    "think",
    "agree",
    "interesting",
    "important",
    "local",
    "national",
    "support",
    "reason",
    "point",
    "money",
    "taxes",
    "housing",
    "service",
    "doctor",
    "hospital",
    "student",
];

const TOXIC_WORDS: &[&str] = &[
    "idiot",
    "stupid",
    "loser",
    "pathetic",
    "moron",
    "garbage",
    "disgusting",
    "trash",
    "dumb",
    "ignorant",
    "clown",
    "hate",
    "worthless",
    "liar",
    "scum",
    "fool",
];

/// Word lists used to assemble synthetic comments.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthVocabulary {
    pub neutral: Vec<String>,
    pub toxic: Vec<String>,
}

impl Default for SynthVocabulary {
    fn default() -> Self {
        Self {
            neutral: NEUTRAL_WORDS.iter().map(|w| w.to_string()).collect(),
            toxic: TOXIC_WORDS.iter().map(|w| w.to_string()).collect(),
        }
    }
}

/// How often an identity term is inserted into toxic and non-toxic comments.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityBias {
    /// Jigsaw identity column name, e.g. `muslim`.
    pub identity: String,
    /// Surface term inserted into the text, e.g. `muslim`.
    pub term: String,
    pub toxic_rate: f64,
    pub nontoxic_rate: f64,
}

impl IdentityBias {
    pub fn new(identity: &str, term: &str, toxic_rate: f64, nontoxic_rate: f64) -> Self {
        Self {
            identity: identity.into(),
            term: term.into(),
            toxic_rate,
            nontoxic_rate,
        }
    }

    /// Default terms for the nine reported subgroups, all at the same rates.
    pub fn default_table(toxic_rate: f64, nontoxic_rate: f64) -> Vec<IdentityBias> {
        [
            ("male", "man"),
            ("female", "woman"),
            ("christian", "christian"),
            ("muslim", "muslim"),
            ("white", "white"),
            ("jewish", "jewish"),
            ("black", "black"),
            ("homosexual_gay_or_lesbian", "gay"),
            ("psychiatric_or_mental_illness", "mentally"),
        ]
        .iter()
        .map(|(i, t)| IdentityBias::new(i, t, toxic_rate, nontoxic_rate))
        .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n_comments: usize,
    pub toxic_fraction: f64,
    pub identity_bias: Vec<IdentityBias>,
    pub vocabulary: SynthVocabulary,
    pub min_words: usize,
    pub max_words: usize,
    /// Probability that a word of a toxic comment is drawn from the toxic list.
    pub toxic_word_rate: f64,
    /// Same probability for non-toxic comments.
    pub nontoxic_toxic_word_rate: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n_comments: 1000,
            toxic_fraction: 0.08,
            identity_bias: IdentityBias::default_table(0.2, 0.05),
            vocabulary: SynthVocabulary::default(),
            min_words: 6,
            max_words: 14,
            toxic_word_rate: 0.2,
            nontoxic_toxic_word_rate: 0.02,
            seed: 7,
        }
    }
}

impl SynthSpec {
    fn validate(&self) -> Result<IdentityRegistry, CorpusError> {
        let bad = |m: String| Err(CorpusError::InvalidSynthSpec(m));
        if !(0.0..=1.0).contains(&self.toxic_fraction) {
            return bad(format!(
                "toxic_fraction {} outside [0, 1]",
                self.toxic_fraction
            ));
        }
        if self.vocabulary.neutral.is_empty() {
            return bad("empty vocabulary".into());
        }
        if self.toxic_word_rate > 0.0 && self.vocabulary.toxic.is_empty() {
            return bad("empty toxic vocabulary with non-zero toxic_word_rate".into());
        }
        if self.min_words == 0 || self.min_words > self.max_words {
            return bad(format!(
                "word count range {}..={} is empty or zero",
                self.min_words, self.max_words
            ));
        }
        for rate in [self.toxic_word_rate, self.nontoxic_toxic_word_rate] {
            if !(0.0..=1.0).contains(&rate) {
                return bad(format!("word rate {rate} outside [0, 1]"));
            }
        }
        let mut seen = BTreeSet::new();
        for b in &self.identity_bias {
            if !seen.insert(b.identity.as_str()) {
                return bad(format!("identity `{}` listed twice", b.identity));
            }
            if b.term.trim().is_empty() || b.term.contains(char::is_whitespace) {
                return bad(format!("identity term `{}` must be a single word", b.term));
            }
            for rate in [b.toxic_rate, b.nontoxic_rate] {
                if !(0.0..=1.0).contains(&rate) {
                    return bad(format!("rate {rate} for `{}` outside [0, 1]", b.identity));
                }
            }
        }
        IdentityRegistry::from_names(self.identity_bias.iter().map(|b| b.identity.as_str()))
            .map_err(|n| CorpusError::InvalidSynthSpec(format!("unknown identity `{n}`")))
    }
}

/// Generates a deterministic corpus with exactly `round(n * toxic_fraction)` toxic rows.
pub fn synth_corpus(spec: &SynthSpec) -> Result<Corpus, CorpusError> {
    let registry = spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_comments;
    let n_toxic = (spec.toxic_fraction * n as f64).round() as usize;

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut is_toxic = vec![false; n];
    for &i in &order[..n_toxic.min(n)] {
        is_toxic[i] = true;
    }

    let vocab = &spec.vocabulary;
    let mut comments = Vec::with_capacity(n);
    for (i, &toxic) in is_toxic.iter().enumerate() {
        let len = rng.gen_range(spec.min_words..=spec.max_words);
        let word_rate = if toxic {
            spec.toxic_word_rate
        } else {
            spec.nontoxic_toxic_word_rate
        };
        let mut words: Vec<&str> = (0..len)
            .map(|_| {
                if rng.gen_bool(word_rate) {
                    vocab.toxic[rng.gen_range(0..vocab.toxic.len())].as_str()
                } else {
                    vocab.neutral[rng.gen_range(0..vocab.neutral.len())].as_str()
                }
            })
            .collect();

        // targets on a 1e-4 grid so CSV output stays short
        let target = if toxic {
            rng.gen_range(5000..=10000) as f64 / 10000.0
        } else {
            rng.gen_range(0..5000) as f64 / 10000.0
        };

        let mut identities = Vec::with_capacity(spec.identity_bias.len());
        for b in &spec.identity_bias {
            let rate = if toxic { b.toxic_rate } else { b.nontoxic_rate };
            let present = rng.gen_bool(rate);
            if present {
                let pos = rng.gen_range(0..=words.len());
                words.insert(pos, b.term.as_str());
            }
            identities.push((b.identity.clone(), if present { 1.0 } else { 0.0 }));
        }
        let any_identity = identities.iter().any(|(_, v)| *v > 0.0);

        let mut text = words.join(" ");
        if let Some(first) = text.get_mut(0..1) {
            first.make_ascii_uppercase();
        }
        text.push('.');

        let mut c = Comment::new((i + 1).to_string(), text, target);
        c.identity_scores.extend(identities);
        for s in Subtype::ALL {
            let v = match s {
                Subtype::Insult => target,
                Subtype::IdentityAttack if any_identity => target,
                _ => 0.0,
            };
            c.subtype_scores.insert(s, v);
        }
        for r in Reaction::ALL {
            c.reactions.insert(r, rng.gen_range(0..4));
        }
        comments.push(c);
    }
    Corpus::new(comments, registry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::write_csv;

    #[test]
    fn exact_toxic_count() {
        let spec = SynthSpec {
            n_comments: 100,
            toxic_fraction: 0.08,
            ..SynthSpec::default()
        };
        let c = synth_corpus(&spec).unwrap();
        assert_eq!(c.len(), 100);
        assert_eq!(c.iter().filter(|c| c.label().is_toxic()).count(), 8);
    }

    #[test]
    fn identity_cooccurrence_matches_rate() {
        let spec = SynthSpec {
            n_comments: 10_000,
            toxic_fraction: 0.08,
            identity_bias: vec![IdentityBias::new("muslim", "muslim", 0.9, 0.1)],
            seed: 11,
            ..SynthSpec::default()
        };
        let c = synth_corpus(&spec).unwrap();
        // count the term in the text, not the score column
        let has_term = |c: &Comment| {
            c.text
                .to_lowercase()
                .split(|ch: char| !ch.is_alphabetic())
                .any(|w| w == "muslim")
        };
        let (mut tox, mut tox_with) = (0usize, 0usize);
        let (mut non, mut non_with) = (0usize, 0usize);
        for comment in &c {
            if comment.label().is_toxic() {
                tox += 1;
                tox_with += has_term(comment) as usize;
            } else {
                non += 1;
                non_with += has_term(comment) as usize;
            }
        }
        let tox_rate = tox_with as f64 / tox as f64;
        let non_rate = non_with as f64 / non as f64;
        assert!((tox_rate - 0.9).abs() <= 0.05, "toxic rate {tox_rate}");
        assert!((non_rate - 0.1).abs() <= 0.05, "non-toxic rate {non_rate}");
    }

    #[test]
    fn same_seed_same_bytes() {
        let spec = SynthSpec::default();
        let render = |c: &Corpus| {
            let mut buf = Vec::new();
            write_csv(c, &mut buf).unwrap();
            buf
        };
        let a = render(&synth_corpus(&spec).unwrap());
        let b = render(&synth_corpus(&spec).unwrap());
        assert_eq!(a, b);
        let other = render(&synth_corpus(&SynthSpec { seed: 8, ..spec }).unwrap());
        assert_ne!(a, other);
    }

    #[test]
    fn rejects_bad_specs() {
        let empty = SynthSpec {
            vocabulary: SynthVocabulary {
                neutral: vec![],
                toxic: vec!["x".into()],
            },
            ..SynthSpec::default()
        };
        assert!(
            matches!(synth_corpus(&empty), Err(CorpusError::InvalidSynthSpec(m)) if m.contains("empty vocabulary"))
        );
        let frac = SynthSpec {
            toxic_fraction: 1.5,
            ..SynthSpec::default()
        };
        assert!(synth_corpus(&frac).is_err());
        let unknown = SynthSpec {
            identity_bias: vec![IdentityBias::new("martian", "martian", 0.5, 0.5)],
            ..SynthSpec::default()
        };
        assert!(synth_corpus(&unknown).is_err());
    }

    #[test]
    fn labels_follow_targets() {
        let c = synth_corpus(&SynthSpec::default()).unwrap();
        for comment in &c {
            assert!((0.0..=1.0).contains(&comment.target));
            assert_eq!(comment.identity_scores.len(), 9);
        }
    }
}
