//! Comment text cleaning and tokenization.
//!
//! Stage order is fixed: HTML tag strip, lowercase, contraction expansion,
//! punctuation/special characters to spaces, stopword removal, then removal of
//! tokens that are not purely `a-z`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::config::ConfigError;
use crate::{Error, Result};

const STOPWORDS_EN: &str = include_str!("../data/stopwords_en.txt");
const CONTRACTIONS_EN: &str = include_str!("../data/contractions_en.txt");

/// Embedded English stopword list.
pub fn default_stopwords() -> BTreeSet<String> {
    parse_stopwords(STOPWORDS_EN)
}

/// Embedded contraction map (`aren't` -> `are not`, ...).
pub fn default_contractions() -> BTreeMap<String, String> {
    parse_contractions(CONTRACTIONS_EN).expect("embedded contraction map is well formed")
}

fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(|l| l.trim().to_lowercase())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

fn parse_contractions(text: &str) -> std::result::Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Invalid {
            key: format!("contractions line {}", i + 1),
            message: "expected `key=expansion`".into(),
        })?;
        map.insert(
            normalize_apostrophes(&k.trim().to_lowercase()),
            v.trim().to_string(),
        );
    }
    Ok(map)
}

/// Reads a stopword file: one entry per line, `#` comments allowed.
pub fn load_stopwords(path: impl AsRef<Path>) -> Result<BTreeSet<String>> {
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(parse_stopwords(&text))
}

/// Reads a contraction file with `key=expansion` lines.
pub fn load_contractions(path: impl AsRef<Path>) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(parse_contractions(&text)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CleanConfig {
    pub stopword_list: BTreeSet<String>,
    /// Keys are lowercase and use ASCII apostrophes.
    pub contraction_map: BTreeMap<String, String>,
    pub strip_html: bool,
    pub keep_alpha_only: bool,
    pub remove_stopwords: bool,
}

impl Default for CleanConfig {
    fn default() -> Self {
        Self {
            stopword_list: default_stopwords(),
            contraction_map: default_contractions(),
            strip_html: true,
            keep_alpha_only: true,
            remove_stopwords: true,
        }
    }
}

/// Ordered tokens produced by [`tokenize`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenSeq {
    pub tokens: Vec<String>,
}

impl TokenSeq {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }
}

impl<S: Into<String>> FromIterator<S> for TokenSeq {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self {
            tokens: iter.into_iter().map(Into::into).collect(),
        }
    }
}

fn normalize_apostrophes(s: &str) -> String {
    s.replace(['\u{2019}', '\u{2018}'], "'")
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\''
}

/// Replaces every word (run of letters, digits and apostrophes) that matches a
/// map key case-insensitively with its expansion. Other text is untouched.
pub fn expand_contractions(text: &str, map: &BTreeMap<String, String>) -> String {
    let text = normalize_apostrophes(text);
    let mut out = String::with_capacity(text.len());
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut String| {
        if word.is_empty() {
            return;
        }
        let lower = word.to_lowercase();
        if let Some(exp) = map.get(&lower) {
            out.push_str(exp);
        } else {
            // quotes around a word: 'don't' -> don't
            let trimmed = lower.trim_matches('\'');
            match map.get(trimmed) {
                Some(exp) if !trimmed.is_empty() => {
                    let lead = lower.len() - lower.trim_start_matches('\'').len();
                    let trail = lower.len() - lower.trim_end_matches('\'').len();
                    out.push_str(&"'".repeat(lead));
                    out.push_str(exp);
                    out.push_str(&"'".repeat(trail));
                }
                _ => out.push_str(word),
            }
        }
        word.clear();
    };
    for c in text.chars() {
        if is_word_char(c) {
            word.push(c);
        } else {
            flush(&mut word, &mut out);
            out.push(c);
        }
    }
    flush(&mut word, &mut out);
    out
}

/// Removes `<...>` spans, replacing each with a space. An unterminated `<` is kept.
fn strip_html_tags(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(open) = rest.find('<') {
        match rest[open..].find('>') {
            Some(close) => {
                out.push_str(&rest[..open]);
                out.push(' ');
                rest = &rest[open + close + 1..];
            }
            None => break,
        }
    }
    out.push_str(rest);
    out
}

/// Runs the full cleaning pipeline and returns surviving tokens joined by single spaces.
pub fn clean(text: &str, cfg: &CleanConfig) -> String {
    clean_tokens(text, cfg).tokens.join(" ")
}

/// Same as [`clean`] without the final join.
pub fn clean_tokens(text: &str, cfg: &CleanConfig) -> TokenSeq {
    let stripped = if cfg.strip_html {
        strip_html_tags(text)
    } else {
        text.to_string()
    };
    let lowered = stripped.to_lowercase();
    let expanded = expand_contractions(&lowered, &cfg.contraction_map);
    let spaced: String = expanded
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    spaced
        .split_whitespace()
        .filter(|t| !(cfg.remove_stopwords && cfg.stopword_list.contains(*t)))
        .filter(|t| !cfg.keep_alpha_only || t.bytes().all(|b| b.is_ascii_lowercase()))
        .collect()
}

/// Splits on runs of whitespace.
pub fn tokenize(text: &str) -> TokenSeq {
    text.split_whitespace().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_with_stopwords(words: &[&str]) -> CleanConfig {
        CleanConfig {
            stopword_list: words.iter().map(|w| w.to_string()).collect(),
            ..CleanConfig::default()
        }
    }

    #[test]
    fn contraction_examples() {
        let map = default_contractions();
        assert_eq!(expand_contractions("aren't", &map), "are not");
        assert_eq!(expand_contractions("", &map), "");
        assert_eq!(
            expand_contractions("Aren't you?", &map).to_lowercase(),
            "are not you?"
        );
        assert_eq!(
            expand_contractions("I DON\u{2019}T know", &map),
            "I do not know"
        );
        assert_eq!(expand_contractions("no match here", &map), "no match here");
        assert_eq!(expand_contractions("'won't'", &map), "'will not'");
    }

    #[test]
    fn embedded_lists_are_sane() {
        let map = default_contractions();
        assert!(map.len() >= 110, "{}", map.len());
        assert!(map
            .keys()
            .all(|k| k == &k.to_lowercase() && k.contains('\'')));
        let stop = default_stopwords();
        for w in ["a", "the", "am", "are"] {
            assert!(stop.contains(w));
        }
    }

    #[test]
    fn clean_pipeline_example() {
        let cfg = cfg_with_stopwords(&["you", "are", "a"]);
        assert_eq!(clean("<b>You</b> are a GOOD woman!", &cfg), "good woman");
    }

    #[test]
    fn clean_removes_everything() {
        let cfg = cfg_with_stopwords(&["the", "a", "am", "are"]);
        assert_eq!(clean("the a am are", &cfg), "");
        assert_eq!(clean("the a am are", &CleanConfig::default()), "");
    }

    #[test]
    fn clean_drops_alphanumeric_tokens() {
        let cfg = cfg_with_stopwords(&["x"]);
        assert_eq!(clean("abc123 hello", &cfg), "hello");
        let keep = CleanConfig {
            keep_alpha_only: false,
            ..cfg
        };
        assert_eq!(clean("abc123 hello", &keep), "abc123 hello");
    }

    #[test]
    fn clean_handles_punctuation_and_unicode() {
        let cfg = cfg_with_stopwords(&["x"]);
        assert_eq!(clean("Tasty, tasty.@home", &cfg), "tasty tasty home");
        assert_eq!(clean("café latte", &cfg), "latte");
        assert_eq!(clean("a < b", &cfg), "a b");
        assert_eq!(clean("They aren't here", &cfg), "they are not here");
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("good woman").tokens, vec!["good", "woman"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("  a  b ").tokens, vec!["a", "b"]);
    }

    #[test]
    fn contraction_file_parse() {
        let m = parse_contractions("# c\nGonna=going to\n").unwrap();
        assert_eq!(m.get("gonna").map(String::as_str), Some("going to"));
        assert!(parse_contractions("broken line").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn text() -> impl Strategy<Value = String> {
            proptest::string::string_regex(
                "([A-Za-z0-9 ,.!?<>/'\u{2019}éü-]|aren't|Don't|<b>|</i>|the|you){0,40}",
            )
            .unwrap()
        }

        proptest! {
            #[test]
            fn clean_is_idempotent(s in text()) {
                let cfg = CleanConfig::default();
                let once = clean(&s, &cfg);
                prop_assert_eq!(clean(&once, &cfg), once);
            }

            #[test]
            fn clean_output_is_lowercase_words(s in text()) {
                let cfg = CleanConfig::default();
                let out = clean(&s, &cfg);
                if !out.is_empty() {
                    prop_assert!(!out.contains("  "));
                    for tok in out.split(' ') {
                        prop_assert!(!tok.is_empty());
                        prop_assert!(tok.bytes().all(|b| b.is_ascii_lowercase()));
                    }
                }
            }

            #[test]
            fn cleaned_tokens_have_no_stopwords(s in text()) {
                let cfg = CleanConfig::default();
                for tok in tokenize(&clean(&s, &cfg)).iter() {
                    prop_assert!(!cfg.stopword_list.contains(tok));
                }
            }
        }
    }
}
