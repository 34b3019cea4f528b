//! Text vectorization: TF-IDF over aggregated per-image documents, and
//! mean-then-normalize aggregation of per-text embedding vectors.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io;
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::ImageRecord;
use crate::matrix::DenseMatrix;
use crate::scalar::{self, Scalar};

pub const DEFAULT_MAX_VOCAB: usize = 2000;

const ENGLISH_STOPWORDS: &str = include_str!("../assets/stopwords_en.txt");

#[derive(Debug, thiserror::Error)]
pub enum VectorizeError {
    #[error("record {id:?} has no strategy {strategy:?}")]
    UnknownStrategy { id: String, strategy: String },
    #[error("record {id:?}: cannot use {m} texts, {available} available")]
    TextCountOutOfRange { id: String, m: usize, available: usize },
    #[error("no documents to fit")]
    NoDocuments,
    #[error("max_vocab must be at least 1")]
    ZeroVocab,
    #[error("every document is empty after stopword removal")]
    EmptyVocabulary,
    #[error("no vectors to aggregate")]
    NoVectors,
    #[error("vector {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("mean vector has zero norm")]
    ZeroNorm,
}

/// Lowercased maximal runs of two or more alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    lower
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().nth(1).is_some())
        .map(str::to_string)
        .collect()
}

/// Joins the first `m` texts of `strategy` with single spaces.
pub fn aggregate_texts(
    record: &ImageRecord,
    strategy: &str,
    m: usize,
) -> Result<String, VectorizeError> {
    let texts = record
        .texts_for(strategy)
        .ok_or_else(|| VectorizeError::UnknownStrategy {
            id: record.id.clone(),
            strategy: strategy.to_string(),
        })?;
    if m == 0 || m > texts.len() {
        return Err(VectorizeError::TextCountOutOfRange {
            id: record.id.clone(),
            m,
            available: texts.len(),
        });
    }
    Ok(texts[..m].join(" "))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopWords {
    words: HashSet<String>,
}

impl StopWords {
    /// The bundled English list (318 words).
    pub fn english() -> Self {
        Self::parse(ENGLISH_STOPWORDS)
    }

    pub fn none() -> Self {
        Self {
            words: HashSet::new(),
        }
    }

    /// One word per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Self {
        Self::from_words(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self {
            words: words.into_iter().map(|w| w.as_ref().to_lowercase()).collect(),
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl Default for StopWords {
    fn default() -> Self {
        Self::english()
    }
}

/// Fitted TF-IDF vocabulary. Column indices follow lexicographic term order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    document_frequency: Vec<usize>,
    n_documents: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn document_frequency(&self, term: &str) -> Option<usize> {
        self.index_of(term).map(|i| self.document_frequency[i])
    }

    pub fn n_documents(&self) -> usize {
        self.n_documents
    }

    /// Smoothed inverse document frequency `ln((1 + N) / (1 + df)) + 1`.
    pub fn idf(&self, column: usize) -> f64 {
        let n = self.n_documents as f64;
        let df = self.document_frequency[column] as f64;
        ((1.0 + n) / (1.0 + df)).ln() + 1.0
    }
}

/// Keeps the `max_vocab` non-stopword terms with the highest total
/// occurrence count (ties broken lexicographically).
pub fn fit_tfidf<S: AsRef<str>>(
    documents: &[S],
    max_vocab: usize,
    stopwords: &StopWords,
) -> Result<Vocabulary, VectorizeError> {
    if documents.is_empty() {
        return Err(VectorizeError::NoDocuments);
    }
    if max_vocab == 0 {
        return Err(VectorizeError::ZeroVocab);
    }
    // term -> (total count, document frequency)
    let mut stats: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for doc in documents {
        let mut seen = HashSet::new();
        for token in tokenize(doc.as_ref()) {
            if stopwords.contains(&token) {
                continue;
            }
            let first = seen.insert(token.clone());
            let entry = stats.entry(token).or_default();
            entry.0 += 1;
            if first {
                entry.1 += 1;
            }
        }
    }
    if stats.is_empty() {
        return Err(VectorizeError::EmptyVocabulary);
    }

    let mut ranked: Vec<(String, usize, usize)> =
        stats.into_iter().map(|(t, (c, df))| (t, c, df)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(max_vocab);
    ranked.sort_by(|a, b| a.0.cmp(&b.0));

    let terms: Vec<String> = ranked.iter().map(|(t, _, _)| t.clone()).collect();
    let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    Ok(Vocabulary {
        terms,
        index,
        document_frequency: ranked.iter().map(|(_, _, df)| *df).collect(),
        n_documents: documents.len(),
    })
}

/// Row-per-document sparse matrix; each row's entries are sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    n_cols: usize,
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> SparseMatrix<T> {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[(usize, T)] {
        &self.rows[i]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.rows[row]
            .binary_search_by_key(&col, |&(c, _)| c)
            .map_or(T::zero(), |i| self.rows[row][i].1)
    }

    /// Indices of rows without any nonzero entry.
    pub fn zero_rows(&self) -> Vec<usize> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_empty())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut dense = DenseMatrix::zeros(self.rows.len(), self.n_cols);
        for (i, row) in self.rows.iter().enumerate() {
            let out = dense.row_mut(i);
            for &(c, w) in row {
                out[c] = w;
            }
        }
        dense
    }
}

/// Raw term counts times smoothed idf, then L2-normalized per row.
/// Out-of-vocabulary tokens are ignored; rows with no known token stay empty.
pub fn transform_tfidf<T: Scalar, S: AsRef<str> + Sync>(
    documents: &[S],
    vocab: &Vocabulary,
) -> SparseMatrix<T> {
    let idf: Vec<T> = (0..vocab.len()).map(|c| T::of(vocab.idf(c))).collect();
    let rows = documents
        .par_iter()
        .map(|doc| {
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for token in tokenize(doc.as_ref()) {
                if let Some(c) = vocab.index_of(&token) {
                    *counts.entry(c).or_default() += 1;
                }
            }
            let mut row: Vec<(usize, T)> = counts
                .into_iter()
                .map(|(c, tf)| (c, T::of(tf as f64) * idf[c]))
                .collect();
            let norm = row.iter().map(|&(_, w)| w * w).sum::<T>().sqrt();
            if norm > T::zero() {
                for entry in &mut row {
                    entry.1 = entry.1 / norm;
                }
            }
            row
        })
        .collect();
    SparseMatrix {
        n_cols: vocab.len(),
        rows,
    }
}

/// Component-wise mean of the vectors, scaled to unit length.
pub fn aggregate_embeddings<T: Scalar, V: AsRef<[T]>>(vectors: &[V]) -> Result<Vec<T>, VectorizeError> {
    let first = vectors.first().ok_or(VectorizeError::NoVectors)?;
    let dim = first.as_ref().len();
    let mut mean = vec![T::zero(); dim];
    for (index, v) in vectors.iter().enumerate() {
        let v = v.as_ref();
        if v.len() != dim {
            return Err(VectorizeError::DimensionMismatch {
                index,
                expected: dim,
                found: v.len(),
            });
        }
        for (m, &x) in mean.iter_mut().zip(v) {
            *m = *m + x;
        }
    }
    let count = T::of(vectors.len() as f64);
    for m in &mut mean {
        *m = *m / count;
    }
    let norm = scalar::norm(&mean);
    if !norm.is_finite() || norm <= T::zero() {
        return Err(VectorizeError::ZeroNorm);
    }
    for m in &mut mean {
        *m = *m / norm;
    }
    Ok(mean)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(texts: &[&str]) -> ImageRecord {
        ImageRecord {
            id: "r".into(),
            label: None,
            texts: [("caption".to_string(), texts.iter().map(|s| s.to_string()).collect())]
                .into_iter()
                .collect(),
        }
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("A cat, a JET!"), ["cat", "jet"]);
        assert_eq!(tokenize("dining room"), ["dining", "room"]);
        assert_eq!(tokenize("x1 2x --"), ["x1", "2x"]);
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn aggregate_texts_examples() {
        let r = record(&["a dog", "brown dog"]);
        assert_eq!(aggregate_texts(&r, "caption", 2).unwrap(), "a dog brown dog");
        assert_eq!(aggregate_texts(&r, "caption", 1).unwrap(), "a dog");
        assert!(matches!(
            aggregate_texts(&r, "caption", 0),
            Err(VectorizeError::TextCountOutOfRange { .. })
        ));
        assert!(aggregate_texts(&r, "caption", 3).is_err());
        assert!(matches!(
            aggregate_texts(&r, "keywords", 1),
            Err(VectorizeError::UnknownStrategy { .. })
        ));
    }

    #[test]
    fn bundled_stopwords() {
        let sw = StopWords::english();
        assert_eq!(sw.len(), 318);
        for w in ["the", "of", "and", "a"] {
            assert!(sw.contains(w));
        }
        assert!(!sw.contains("cat"));
    }

    #[test]
    fn fit_counts_document_frequencies() {
        let docs = ["cat sat", "cat cat dog", "dog"];
        let v = fit_tfidf(&docs, DEFAULT_MAX_VOCAB, &StopWords::english()).unwrap();
        assert_eq!(v.terms(), ["cat", "dog", "sat"]);
        assert_eq!(v.document_frequency("cat"), Some(2));
        assert_eq!(v.document_frequency("dog"), Some(2));
        assert_eq!(v.document_frequency("sat"), Some(1));
        assert_eq!(v.n_documents(), 3);
    }

    #[test]
    fn fit_truncates_by_total_count() {
        let docs = ["cat sat", "cat cat dog", "dog"];
        let v = fit_tfidf(&docs, 2, &StopWords::english()).unwrap();
        assert_eq!(v.terms(), ["cat", "dog"]);
        // ties on count fall back to lexicographic order
        let v = fit_tfidf(&["bb aa cc"], 2, &StopWords::none()).unwrap();
        assert_eq!(v.terms(), ["aa", "bb"]);
    }

    #[test]
    fn fit_rejects_stopword_only_corpus() {
        let sw = StopWords::from_words(["the", "of", "and"]);
        assert!(matches!(
            fit_tfidf(&["the of and"], 10, &sw),
            Err(VectorizeError::EmptyVocabulary)
        ));
        assert!(matches!(
            fit_tfidf::<&str>(&[], 10, &sw),
            Err(VectorizeError::NoDocuments)
        ));
    }

    #[test]
    fn single_term_row_normalizes_to_one() {
        let docs = ["cat cat"];
        let v = fit_tfidf(&docs, 10, &StopWords::english()).unwrap();
        let m: SparseMatrix<f64> = transform_tfidf(&docs, &v);
        assert_eq!(m.row(0), &[(0, 1.0)]);
    }

    #[test]
    fn out_of_vocabulary_row_is_zero() {
        let v = fit_tfidf(&["cat"], 10, &StopWords::english()).unwrap();
        let m: SparseMatrix<f32> = transform_tfidf(&["cat", "zebra"], &v);
        assert_eq!(m.zero_rows(), vec![1]);
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn aggregate_embeddings_examples() {
        let v = [0.6_f64, 0.8];
        assert_eq!(aggregate_embeddings(&[v]).unwrap(), v);
        assert_eq!(aggregate_embeddings(&[v, v]).unwrap(), v);
        assert!(matches!(
            aggregate_embeddings(&[v, [-0.6, -0.8]]),
            Err(VectorizeError::ZeroNorm)
        ));
        assert!(matches!(
            aggregate_embeddings::<f64, Vec<f64>>(&[]),
            Err(VectorizeError::NoVectors)
        ));
        assert!(matches!(
            aggregate_embeddings(&[vec![1.0_f64], vec![1.0, 2.0]]),
            Err(VectorizeError::DimensionMismatch { index: 1, .. })
        ));
    }
}
