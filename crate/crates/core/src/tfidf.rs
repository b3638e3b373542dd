//! TF-IDF vocabulary fitting and sparse feature vectors.
//!
//! `tf(t, d)` is the within-document proportion of `t`; `idf(t) = ln(N / df_t)`
//! with no smoothing.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use thiserror::Error;

use crate::textprep::TokenSeq;

/// Cap applied by [`fit`] when none is given explicitly.
pub const DEFAULT_MAX_FEATURES: usize = 50_000;

const VOCAB_MAGIC: &str = "toxbias-vocabulary";
const VOCAB_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum TfidfError {
    #[error("document has no tokens")]
    EmptyDocument,
    #[error("document frequency {df} invalid for {n_docs} documents")]
    InvalidDocFreq { n_docs: u64, df: u64 },
    #[error("term count {count} exceeds document length {total}")]
    InvalidTermCount { count: u64, total: u64 },
    #[error("cannot fit a vocabulary: every document is empty")]
    NoTerms,
    #[error("sparse index {index} out of bounds for dimension {dim}")]
    IndexOutOfBounds { index: u32, dim: usize },
    #[error("duplicate sparse index {0}")]
    DuplicateIndex(u32),
    #[error("malformed vocabulary file at line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("io error: {0}")]
    Io(String),
}

/// Term frequency: `term_count / doc_token_total`.
pub fn tf(term_count: u64, doc_token_total: u64) -> Result<f64, TfidfError> {
    if doc_token_total == 0 {
        return Err(TfidfError::EmptyDocument);
    }
    if term_count > doc_token_total {
        return Err(TfidfError::InvalidTermCount {
            count: term_count,
            total: doc_token_total,
        });
    }
    Ok(term_count as f64 / doc_token_total as f64)
}

/// Inverse document frequency, natural log of `n_docs / df`.
pub fn idf(n_docs: u64, df: u64) -> Result<f64, TfidfError> {
    if df == 0 || df > n_docs {
        return Err(TfidfError::InvalidDocFreq { n_docs, df });
    }
    Ok((n_docs as f64 / df as f64).ln())
}

/// Sparse vector with strictly increasing indices and no stored zeros.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    entries: Vec<(u32, f64)>,
    dim: usize,
}

impl SparseVector {
    pub fn empty(dim: usize) -> Self {
        Self {
            entries: Vec::new(),
            dim,
        }
    }

    /// Builds a vector from `(index, value)` pairs in any order. Zeros are dropped.
    pub fn from_pairs(
        dim: usize,
        pairs: impl IntoIterator<Item = (u32, f64)>,
    ) -> Result<Self, TfidfError> {
        let mut entries: Vec<(u32, f64)> = pairs.into_iter().filter(|(_, v)| *v != 0.0).collect();
        entries.sort_by_key(|(i, _)| *i);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(TfidfError::DuplicateIndex(w[0].0));
            }
        }
        if let Some(&(index, _)) = entries.last() {
            if index as usize >= dim {
                return Err(TfidfError::IndexOutOfBounds { index, dim });
            }
        }
        Ok(Self { entries, dim })
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Dot product with a dense vector of the same dimension.
    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(i, v)| v * dense[i as usize])
            .sum()
    }
}

/// Fitted vocabulary. Column indices follow lexicographic term order.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    doc_freq: Vec<u64>,
    term_index: HashMap<String, u32>,
    n_docs: u64,
    max_features: Option<usize>,
}

impl Vocabulary {
    fn from_sorted(entries: Vec<(String, u64)>, n_docs: u64, max_features: Option<usize>) -> Self {
        let term_index = entries
            .iter()
            .enumerate()
            .map(|(i, (t, _))| (t.clone(), i as u32))
            .collect();
        let (terms, doc_freq) = entries.into_iter().unzip();
        Self {
            terms,
            doc_freq,
            term_index,
            n_docs,
            max_features,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> u64 {
        self.n_docs
    }

    pub fn max_features(&self) -> Option<usize> {
        self.max_features
    }

    pub fn index_of(&self, term: &str) -> Option<u32> {
        self.term_index.get(term).copied()
    }

    pub fn term(&self, index: u32) -> Option<&str> {
        self.terms.get(index as usize).map(String::as_str)
    }

    pub fn doc_freq(&self, term: &str) -> Option<u64> {
        self.index_of(term).map(|i| self.doc_freq[i as usize])
    }

    /// `(term, index, df)` in index order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u32, u64)> {
        self.terms
            .iter()
            .zip(&self.doc_freq)
            .enumerate()
            .map(|(i, (t, df))| (t.as_str(), i as u32, *df))
    }

    /// Writes the versioned text format: a header, then `term\tindex\tdf` per line.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), TfidfError> {
        let io = |e: std::io::Error| TfidfError::Io(e.to_string());
        writeln!(w, "{VOCAB_MAGIC} {VOCAB_VERSION}").map_err(io)?;
        writeln!(w, "n_docs {}", self.n_docs).map_err(io)?;
        match self.max_features {
            Some(m) => writeln!(w, "max_features {m}").map_err(io)?,
            None => writeln!(w, "max_features none").map_err(io)?,
        }
        writeln!(w, "terms {}", self.terms.len()).map_err(io)?;
        for (t, i, df) in self.iter() {
            writeln!(w, "{t}\t{i}\t{df}").map_err(io)?;
        }
        Ok(())
    }

    /// Reads the format produced by [`Vocabulary::write_to`], consuming exactly
    /// the header and term lines so it can be embedded in larger files.
    pub fn read_from<R: BufRead>(r: &mut R) -> Result<Self, TfidfError> {
        let mut lines = LineReader::new(r);
        let header = lines.next_line()?;
        if header != format!("{VOCAB_MAGIC} {VOCAB_VERSION}") {
            return Err(lines.err(format!("unexpected header `{header}`")));
        }
        let n_docs: u64 = lines.keyed("n_docs")?;
        let max_raw: String = lines.keyed("max_features")?;
        let max_features = if max_raw == "none" {
            None
        } else {
            Some(
                max_raw
                    .parse()
                    .map_err(|_| lines.err("bad max_features".into()))?,
            )
        };
        let n_terms: usize = lines.keyed("terms")?;
        let mut entries: Vec<(String, u64)> = Vec::with_capacity(n_terms);
        for expected in 0..n_terms {
            let line = lines.next_line()?;
            let parts: Vec<&str> = line.split('\t').collect();
            if parts.len() != 3 {
                return Err(lines.err("expected `term\\tindex\\tdf`".into()));
            }
            let index: usize = parts[1]
                .parse()
                .map_err(|_| lines.err("bad index".into()))?;
            let df: u64 = parts[2].parse().map_err(|_| lines.err("bad df".into()))?;
            if index != expected {
                return Err(lines.err(format!("index {index}, expected {expected}")));
            }
            if df == 0 || df > n_docs {
                return Err(lines.err(format!("df {df} outside [1, {n_docs}]")));
            }
            if let Some((prev, _)) = entries.last() {
                if prev.as_str() >= parts[0] {
                    return Err(lines.err("terms not in strictly increasing order".into()));
                }
            }
            entries.push((parts[0].to_string(), df));
        }
        Ok(Self::from_sorted(entries, n_docs, max_features))
    }
}

pub(crate) struct LineReader<'a, R> {
    inner: &'a mut R,
    line_no: usize,
}

impl<'a, R: BufRead> LineReader<'a, R> {
    pub(crate) fn new(inner: &'a mut R) -> Self {
        Self { inner, line_no: 0 }
    }

    pub(crate) fn err(&self, message: String) -> TfidfError {
        TfidfError::Format {
            line: self.line_no,
            message,
        }
    }

    pub(crate) fn next_line(&mut self) -> Result<String, TfidfError> {
        let mut buf = String::new();
        let n = self
            .inner
            .read_line(&mut buf)
            .map_err(|e| TfidfError::Io(e.to_string()))?;
        self.line_no += 1;
        if n == 0 {
            return Err(self.err("unexpected end of file".into()));
        }
        Ok(buf.trim_end_matches(['\n', '\r']).to_string())
    }

    pub(crate) fn keyed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, TfidfError> {
        let line = self.next_line()?;
        let value = line
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| self.err(format!("expected `{key} <value>`")))?;
        value
            .parse()
            .map_err(|_| self.err(format!("bad value for `{key}`")))
    }
}

/// Fits a vocabulary over all observed terms.
///
/// With `max_features`, keeps the terms with the highest total occurrence count
/// (ties broken lexicographically ascending). Empty documents count toward `N`.
pub fn fit<'a, I>(docs: I, max_features: Option<usize>) -> Result<Vocabulary, TfidfError>
where
    I: IntoIterator<Item = &'a TokenSeq>,
{
    let mut stats: BTreeMap<&str, (u64, u64)> = BTreeMap::new(); // term -> (df, total count)
    let mut n_docs = 0u64;
    let mut seen_in_doc: Vec<&str> = Vec::new();
    for doc in docs {
        n_docs += 1;
        seen_in_doc.clear();
        for tok in doc.iter() {
            let e = stats.entry(tok).or_insert((0, 0));
            e.1 += 1;
            seen_in_doc.push(tok);
        }
        seen_in_doc.sort_unstable();
        seen_in_doc.dedup();
        for tok in &seen_in_doc {
            stats.get_mut(tok).expect("counted above").0 += 1;
        }
    }
    if stats.is_empty() {
        return Err(TfidfError::NoTerms);
    }
    let mut kept: Vec<(&str, u64, u64)> =
        stats.into_iter().map(|(t, (df, n))| (t, df, n)).collect();
    if let Some(cap) = max_features {
        if kept.len() > cap {
            kept.sort_by(|a, b| b.2.cmp(&a.2).then_with(|| a.0.cmp(b.0)));
            kept.truncate(cap);
            kept.sort_by(|a, b| a.0.cmp(b.0));
        }
    }
    let entries = kept
        .into_iter()
        .map(|(t, df, _)| (t.to_string(), df))
        .collect();
    Ok(Vocabulary::from_sorted(entries, n_docs, max_features))
}

/// TF-IDF transform of one document. Out-of-vocabulary tokens still count in
/// the document length; terms present in every fitted document vanish.
pub fn transform(doc: &TokenSeq, vocab: &Vocabulary) -> SparseVector {
    let total = doc.len() as u64;
    if total == 0 {
        return SparseVector::empty(vocab.len());
    }
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for tok in doc.iter() {
        if let Some(i) = vocab.index_of(tok) {
            *counts.entry(i).or_insert(0) += 1;
        }
    }
    let entries = counts
        .into_iter()
        .filter_map(|(i, count)| {
            let df = vocab.doc_freq[i as usize];
            let w = tf(count, total).ok()? * idf(vocab.n_docs, df).ok()?;
            (w != 0.0).then_some((i, w))
        })
        .collect();
    SparseVector {
        entries,
        dim: vocab.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs(raw: &[&[&str]]) -> Vec<TokenSeq> {
        raw.iter().map(|d| d.iter().copied().collect()).collect()
    }

    #[test]
    fn tf_examples() {
        assert_eq!(tf(2, 3).unwrap(), 2.0 / 3.0);
        assert_eq!(tf(0, 5).unwrap(), 0.0);
        assert_eq!(tf(5, 5).unwrap(), 1.0);
        assert_eq!(tf(1, 0), Err(TfidfError::EmptyDocument));
        assert!(tf(4, 3).is_err());
    }

    #[test]
    fn idf_examples() {
        assert_eq!(idf(4, 4).unwrap(), 0.0);
        assert!((idf(4, 1).unwrap() - 1.3862943611198906).abs() < 1e-15);
        assert_eq!(idf(1, 1).unwrap(), 0.0);
        assert!(idf(4, 0).is_err());
        assert!(idf(4, 5).is_err());
    }

    #[test]
    fn fit_counts_doc_freq() {
        let d = docs(&[&["a", "b"], &["b", "c"]]);
        let v = fit(&d, None).unwrap();
        assert_eq!(v.n_docs(), 2);
        assert_eq!(v.doc_freq("a"), Some(1));
        assert_eq!(v.doc_freq("b"), Some(2));
        assert_eq!(v.doc_freq("c"), Some(1));
        assert_eq!(v.index_of("a"), Some(0));
        assert_eq!(v.index_of("c"), Some(2));
        assert_eq!(fit(&d, None).unwrap(), v);
    }

    #[test]
    fn fit_with_cap_keeps_most_frequent() {
        let d = docs(&[&["a", "b"], &["b", "c"]]);
        let v = fit(&d, Some(1)).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v.term(0), Some("b"));
        // ties: a and c both occur once, a wins
        let v2 = fit(&d, Some(2)).unwrap();
        assert_eq!(v2.iter().map(|t| t.0).collect::<Vec<_>>(), vec!["a", "b"]);
    }

    #[test]
    fn fit_rejects_all_empty() {
        let d = docs(&[&[], &[]]);
        assert_eq!(fit(&d, None), Err(TfidfError::NoTerms));
    }

    #[test]
    fn transform_example() {
        let v = fit(&docs(&[&["a", "b"], &["b", "c"]]), None).unwrap();
        let x = transform(&["a", "a", "b"].into_iter().collect(), &v);
        assert_eq!(x.entries(), &[(0, (2.0 / 3.0) * 2f64.ln())]);
        assert_eq!(x.dimension(), 3);
        assert!(transform(&["zz", "yy"].into_iter().collect(), &v).is_empty());
        assert!(transform(&TokenSeq::default(), &v).is_empty());
    }

    #[test]
    fn sparse_from_pairs() {
        let v = SparseVector::from_pairs(4, [(3, 1.0), (0, 2.0), (1, 0.0)]).unwrap();
        assert_eq!(v.entries(), &[(0, 2.0), (3, 1.0)]);
        assert!(SparseVector::from_pairs(2, [(2, 1.0)]).is_err());
        assert!(SparseVector::from_pairs(4, [(1, 1.0), (1, 2.0)]).is_err());
        assert_eq!(v.dot(&[1.0, 5.0, 5.0, 0.5]), 2.5);
    }

    #[test]
    fn vocabulary_file_round_trip() {
        let v = fit(&docs(&[&["x", "y"], &["y", "zeta"], &[]]), Some(10)).unwrap();
        let mut buf = Vec::new();
        v.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("toxbias-vocabulary 1\nn_docs 3\nmax_features 10\nterms 3\n"));
        let back = Vocabulary::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back, v);

        let broken = text.replace("y\t1\t2", "y\t1\t9");
        assert!(Vocabulary::read_from(&mut broken.as_bytes()).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn corpus() -> impl Strategy<Value = Vec<TokenSeq>> {
            proptest::collection::vec(
                proptest::collection::vec("[a-f]{1,2}", 0..12)
                    .prop_map(|t| t.into_iter().collect::<TokenSeq>()),
                1..10,
            )
            .prop_filter("needs a token", |d| d.iter().any(|x| !x.is_empty()))
        }

        proptest! {
            #[test]
            fn tf_sums_to_one(doc in proptest::collection::vec("[a-d]", 1..30)) {
                let seq: TokenSeq = doc.iter().map(String::as_str).collect();
                let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
                for t in seq.iter() {
                    *counts.entry(t).or_default() += 1;
                }
                let total: f64 = counts.values().map(|c| tf(*c, seq.len() as u64).unwrap()).sum();
                prop_assert!((total - 1.0).abs() < 1e-12);
            }

            #[test]
            fn no_stored_zeros_and_sorted(docs in corpus(), pick in 0usize..10) {
                let v = fit(&docs, None).unwrap();
                let x = transform(&docs[pick % docs.len()], &v);
                prop_assert!(x.entries().iter().all(|(_, w)| *w != 0.0 && w.is_finite()));
                prop_assert!(x.entries().windows(2).all(|w| w[0].0 < w[1].0));
            }

            #[test]
            fn transform_independent_of_other_docs(docs in corpus(), pick in 0usize..10) {
                let v = fit(&docs, None).unwrap();
                let d = &docs[pick % docs.len()];
                let alone = transform(d, &v);
                let batch: Vec<SparseVector> = docs.iter().map(|x| transform(x, &v)).collect();
                prop_assert_eq!(&batch[pick % docs.len()], &alone);
            }

            #[test]
            fn fit_is_order_independent(docs in corpus(), cap in proptest::option::of(1usize..8)) {
                let mut rev = docs.clone();
                rev.reverse();
                prop_assert_eq!(fit(&docs, cap).unwrap(), fit(&rev, cap).unwrap());
            }

            #[test]
            fn doc_freq_bounds(docs in corpus()) {
                let v = fit(&docs, None).unwrap();
                for (_, i, df) in v.iter() {
                    prop_assert!(df >= 1 && df <= v.n_docs());
                    prop_assert_eq!(v.index_of(v.term(i).unwrap()), Some(i));
                }
            }
        }
    }
}
