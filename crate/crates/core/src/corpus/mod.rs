//! Generated-text corpora and externally computed embedding vectors.
//!
//! A corpus file is JSON Lines, one image per line:
//!
//! ```text
//! {"id": "img-001", "label": "bedroom", "texts": {"caption": ["a bed in a room", "..."]}}
//! ```
//!
//! Embedding files are JSON Lines too, `{"id": str, "vector": [number, ...]}`,
//! one file per (strategy, encoder). An id may repeat: the lines for one id
//! are that image's per-text vectors in text order (see [`load_embedding_sets`]).

mod service;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

pub use service::{fetch_embeddings, EmbeddingClient};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: empty id")]
    EmptyId { line: usize },
    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: record {id:?} has no texts")]
    NoTexts { line: usize, id: String },
    #[error("line {line}: record {id:?} has an empty text list for strategy {strategy:?}")]
    EmptyTextList {
        line: usize,
        id: String,
        strategy: String,
    },
    #[error("line {line}: record {id:?} has ragged strategies: {detail}")]
    RaggedStrategy {
        line: usize,
        id: String,
        detail: String,
    },
    #[error("line {line}: record {id:?} mixes labeled and unlabeled records")]
    MixedLabels { line: usize, id: String },
    #[error("corpus is empty")]
    Empty,
    #[error("embeddings: missing vector for id {id:?}")]
    MissingId { id: String },
    #[error("embeddings: id {id:?} appears more than once")]
    DuplicateEmbedding { id: String },
    #[error("embeddings: id {id:?} has {found} dimensions, expected {expected}")]
    InconsistentDim {
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("embeddings: id {id:?} has a non-finite value at position {position}")]
    NonFinite { id: String, position: usize },
    #[error("embeddings: id {id:?} has an empty vector")]
    EmptyVector { id: String },
    #[error("embedding service transport failure after {attempts} attempt(s): {message}")]
    Transport { attempts: usize, message: String },
    #[error("embedding service returned status {status}")]
    Status { status: u16 },
    #[error("embedding service response invalid: {0}")]
    BadResponse(String),
    #[error("embedding service returned {got} vectors for {expected} texts")]
    Cardinality { expected: usize, got: usize },
    #[error("embedding service returned dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("batch size must be at least 1")]
    ZeroBatch,
}

impl CorpusError {
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            CorpusError::Io { .. } | CorpusError::Transport { .. } | CorpusError::Status { .. }
        )
    }
}

/// One image: an id, an optional class name and the texts generated for it
/// under each strategy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub id: String,
    #[serde(default)]
    pub label: Option<String>,
    pub texts: BTreeMap<String, Vec<String>>,
}

impl ImageRecord {
    pub fn texts_for(&self, strategy: &str) -> Option<&[String]> {
        self.texts.get(strategy).map(Vec::as_slice)
    }
}

/// Validated, rectangular collection of [`ImageRecord`]s.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    records: Vec<ImageRecord>,
    strategies: BTreeSet<String>,
}

impl Corpus {
    /// Validates records; error positions are 1-based record numbers.
    pub fn new(records: Vec<ImageRecord>) -> Result<Self, CorpusError> {
        let lines: Vec<usize> = (1..=records.len()).collect();
        Self::validate(records, &lines)
    }

    fn validate(records: Vec<ImageRecord>, lines: &[usize]) -> Result<Self, CorpusError> {
        let Some(first) = records.first() else {
            return Err(CorpusError::Empty);
        };
        let strategies: BTreeSet<String> = first.texts.keys().cloned().collect();
        let labeled = first.label.is_some();
        let mut seen = HashSet::with_capacity(records.len());

        for (record, &line) in records.iter().zip(lines) {
            if record.id.is_empty() {
                return Err(CorpusError::EmptyId { line });
            }
            if !seen.insert(record.id.as_str()) {
                return Err(CorpusError::DuplicateId {
                    line,
                    id: record.id.clone(),
                });
            }
            if record.texts.is_empty() {
                return Err(CorpusError::NoTexts {
                    line,
                    id: record.id.clone(),
                });
            }
            if let Some((strategy, _)) = record.texts.iter().find(|(_, t)| t.is_empty()) {
                return Err(CorpusError::EmptyTextList {
                    line,
                    id: record.id.clone(),
                    strategy: strategy.clone(),
                });
            }
            let keys: BTreeSet<&String> = record.texts.keys().collect();
            if keys.len() != strategies.len() || !strategies.iter().all(|s| keys.contains(s)) {
                let missing: Vec<&str> = strategies
                    .iter()
                    .filter(|s| !keys.contains(s))
                    .map(String::as_str)
                    .collect();
                let extra: Vec<&str> = keys
                    .iter()
                    .filter(|s| !strategies.contains(s.as_str()))
                    .map(|s| s.as_str())
                    .collect();
                return Err(CorpusError::RaggedStrategy {
                    line,
                    id: record.id.clone(),
                    detail: format!("missing {missing:?}, unexpected {extra:?}"),
                });
            }
            if record.label.is_some() != labeled {
                return Err(CorpusError::MixedLabels {
                    line,
                    id: record.id.clone(),
                });
            }
        }

        Ok(Self {
            records,
            strategies,
        })
    }

    pub fn records(&self) -> &[ImageRecord] {
        &self.records
    }

    pub fn strategies(&self) -> &BTreeSet<String> {
        &self.strategies
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn has_strategy(&self, strategy: &str) -> bool {
        self.strategies.contains(strategy)
    }

    pub fn is_labeled(&self) -> bool {
        self.records[0].label.is_some()
    }

    /// Ground-truth labels in record order, when the corpus is labeled.
    pub fn labels(&self) -> Option<Vec<&str>> {
        self.records
            .iter()
            .map(|r| r.label.as_deref())
            .collect::<Option<Vec<_>>>()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.records.iter().map(|r| r.id.as_str())
    }

    /// Smallest number of texts any record has under `strategy`.
    pub fn min_texts(&self, strategy: &str) -> Option<usize> {
        self.records
            .iter()
            .map(|r| r.texts.get(strategy).map(Vec::len))
            .collect::<Option<Vec<_>>>()
            .and_then(|v| v.into_iter().min())
    }

    /// Copy of the corpus with every text list replaced via `f(record_index, strategy, texts)`.
    pub fn map_texts<F>(&self, mut f: F) -> Result<Self, CorpusError>
    where
        F: FnMut(usize, &str, &[String]) -> Vec<String>,
    {
        let records = self
            .records
            .iter()
            .enumerate()
            .map(|(i, r)| ImageRecord {
                id: r.id.clone(),
                label: r.label.clone(),
                texts: r
                    .texts
                    .iter()
                    .map(|(s, t)| (s.clone(), f(i, s, t)))
                    .collect(),
            })
            .collect();
        Self::new(records)
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for record in &self.records {
            serde_json::to_writer(&mut out, record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Parses a JSON Lines corpus; blank lines are skipped.
pub fn parse_corpus<R: BufRead>(reader: R) -> Result<Corpus, CorpusError> {
    let mut records = Vec::new();
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| CorpusError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ImageRecord =
            serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
                line: line_no,
                message: e.to_string(),
            })?;
        records.push(record);
        lines.push(line_no);
    }
    Corpus::validate(records, &lines)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(path))?;
    parse_corpus(BufReader::new(file))
}

pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    corpus.write_jsonl(&mut out).map_err(io_err(path))?;
    out.flush().map_err(io_err(path))
}

/// Dense vectors aligned with a corpus' record order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix<T> {
    ids: Vec<String>,
    rows: DenseMatrix<T>,
    provenance: String,
}

impl<T: Scalar> EmbeddingMatrix<T> {
    pub fn new(
        ids: Vec<String>,
        rows: DenseMatrix<T>,
        provenance: impl Into<String>,
    ) -> Result<Self, CorpusError> {
        if ids.len() != rows.nrows() {
            return Err(CorpusError::Cardinality {
                expected: ids.len(),
                got: rows.nrows(),
            });
        }
        for (id, row) in ids.iter().zip(rows.rows()) {
            if row.is_empty() {
                return Err(CorpusError::EmptyVector { id: id.clone() });
            }
            if let Some(position) = row.iter().position(|v| !v.is_finite()) {
                return Err(CorpusError::NonFinite {
                    id: id.clone(),
                    position,
                });
            }
        }
        Ok(Self {
            ids,
            rows,
            provenance: provenance.into(),
        })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn dim(&self) -> usize {
        self.rows.ncols()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn rows(&self) -> &DenseMatrix<T> {
        &self.rows
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }
}

/// Per-record lists of vectors (one per generated text), in corpus order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSets<T> {
    pub ids: Vec<String>,
    pub dim: usize,
    pub sets: Vec<Vec<Vec<T>>>,
}

struct EmbeddingLine<T> {
    id: String,
    vector: Vec<T>,
}

fn non_finite_token(token: &str) -> bool {
    matches!(
        token.trim().to_ascii_lowercase().as_str(),
        "nan" | "+nan" | "-nan" | "inf" | "+inf" | "-inf" | "infinity" | "+infinity" | "-infinity"
    )
}

// Bare NaN/Infinity are not JSON; quote them so the id can still be reported.
fn quote_bare_non_finite(line: &str) -> String {
    let mut out = String::with_capacity(line.len() + 8);
    let mut in_string = false;
    let mut escaped = false;
    let mut rest = line;
    while let Some(c) = rest.chars().next() {
        if in_string {
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_string = false;
            }
        } else if c == '"' {
            in_string = true;
        } else if let Some(token) = ["-Infinity", "Infinity", "NaN"]
            .into_iter()
            .find(|t| rest.starts_with(t))
        {
            out.push('"');
            out.push_str(token);
            out.push('"');
            rest = &rest[token.len()..];
            continue;
        }
        out.push(c);
        rest = &rest[c.len_utf8()..];
    }
    out
}

fn parse_embedding_line<T: Scalar>(line: &str, line_no: usize) -> Result<EmbeddingLine<T>, CorpusError> {
    let value: Value = match serde_json::from_str(line) {
        Ok(v) => v,
        Err(first) => serde_json::from_str(&quote_bare_non_finite(line)).map_err(|_| {
            CorpusError::Malformed {
                line: line_no,
                message: first.to_string(),
            }
        })?,
    };
    let malformed = |message: &str| CorpusError::Malformed {
        line: line_no,
        message: message.to_string(),
    };
    let id = value
        .get("id")
        .and_then(Value::as_str)
        .ok_or_else(|| malformed("missing string field \"id\""))?
        .to_string();
    let items = value
        .get("vector")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("missing array field \"vector\""))?;
    let mut vector = Vec::with_capacity(items.len());
    for (position, item) in items.iter().enumerate() {
        let x = match item {
            Value::Number(n) => n.as_f64().ok_or_else(|| malformed("unrepresentable number"))?,
            Value::String(s) if non_finite_token(s) => {
                return Err(CorpusError::NonFinite { id, position });
            }
            _ => return Err(malformed("vector entries must be numbers")),
        };
        let x = T::of(x);
        if !x.is_finite() {
            return Err(CorpusError::NonFinite { id, position });
        }
        vector.push(x);
    }
    if vector.is_empty() {
        return Err(CorpusError::EmptyVector { id });
    }
    Ok(EmbeddingLine { id, vector })
}

fn read_embedding_lines<T: Scalar>(path: &Path) -> Result<Vec<EmbeddingLine<T>>, CorpusError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    let mut dim = None;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = parse_embedding_line::<T>(&line, i + 1)?;
        let expected = *dim.get_or_insert(parsed.vector.len());
        if parsed.vector.len() != expected {
            return Err(CorpusError::InconsistentDim {
                id: parsed.id,
                expected,
                found: parsed.vector.len(),
            });
        }
        out.push(parsed);
    }
    Ok(out)
}

/// Loads one vector per corpus record, reordered to corpus order. Extra ids
/// in the file are ignored; repeated ids are an error.
pub fn load_embeddings<T: Scalar>(
    path: impl AsRef<Path>,
    corpus: &Corpus,
) -> Result<EmbeddingMatrix<T>, CorpusError> {
    let path = path.as_ref();
    let lines = read_embedding_lines::<T>(path)?;
    let dim = lines.first().map_or(0, |l| l.vector.len());
    let mut by_id: HashMap<String, Vec<T>> = HashMap::with_capacity(lines.len());
    for line in lines {
        if by_id.contains_key(&line.id) {
            return Err(CorpusError::DuplicateEmbedding { id: line.id });
        }
        by_id.insert(line.id, line.vector);
    }
    let mut rows = DenseMatrix::zeros(corpus.len(), dim);
    for (i, id) in corpus.ids().enumerate() {
        let v = by_id
            .get(id)
            .ok_or_else(|| CorpusError::MissingId { id: id.to_string() })?;
        rows.row_mut(i).copy_from_slice(v);
    }
    let provenance = path
        .file_stem()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    EmbeddingMatrix::new(corpus.ids().map(str::to_string).collect(), rows, provenance)
}

/// Loads per-text vectors: every line for an id, in file order.
pub fn load_embedding_sets<T: Scalar>(
    path: impl AsRef<Path>,
    corpus: &Corpus,
) -> Result<EmbeddingSets<T>, CorpusError> {
    let lines = read_embedding_lines::<T>(path.as_ref())?;
    let dim = lines.first().map_or(0, |l| l.vector.len());
    let mut by_id: HashMap<String, Vec<Vec<T>>> = HashMap::new();
    for line in lines {
        by_id.entry(line.id).or_default().push(line.vector);
    }
    let mut sets = Vec::with_capacity(corpus.len());
    for id in corpus.ids() {
        let set = by_id
            .remove(id)
            .ok_or_else(|| CorpusError::MissingId { id: id.to_string() })?;
        sets.push(set);
    }
    Ok(EmbeddingSets {
        ids: corpus.ids().map(str::to_string).collect(),
        dim,
        sets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(text: &str) -> Result<Corpus, CorpusError> {
        parse_corpus(Cursor::new(text))
    }

    const THREE: &str = r#"{"id": "a", "label": "cat", "texts": {"caption": ["a cat"]}}
{"id": "b", "label": "dog", "texts": {"caption": ["a dog", "brown dog"]}}
{"id": "c", "label": "cat", "texts": {"caption": ["cat on mat"]}}
"#;

    #[test]
    fn loads_minimal_corpus() {
        let corpus = parse(THREE).unwrap();
        assert_eq!(corpus.len(), 3);
        assert!(corpus.is_labeled());
        assert_eq!(corpus.strategies().len(), 1);
        assert_eq!(corpus.ids().collect::<Vec<_>>(), ["a", "b", "c"]);
        assert_eq!(corpus.labels().unwrap(), ["cat", "dog", "cat"]);
    }

    #[test]
    fn duplicate_id_names_the_id() {
        let text = r#"{"id": "x", "label": null, "texts": {"caption": ["t"]}}
{"id": "x", "label": null, "texts": {"caption": ["u"]}}"#;
        match parse(text) {
            Err(CorpusError::DuplicateId { line, id }) => {
                assert_eq!(line, 2);
                assert_eq!(id, "x");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_strategies_rejected() {
        let text = r#"{"id": "a", "texts": {"caption": ["t"], "keywords": ["k"]}}
{"id": "b", "texts": {"caption": ["u"]}}"#;
        assert!(matches!(
            parse(text),
            Err(CorpusError::RaggedStrategy { line: 2, .. })
        ));
    }

    #[test]
    fn mixed_labels_rejected() {
        let text = r#"{"id": "a", "label": "x", "texts": {"caption": ["t"]}}
{"id": "b", "label": null, "texts": {"caption": ["u"]}}"#;
        assert!(matches!(parse(text), Err(CorpusError::MixedLabels { .. })));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = "{\"id\": \"a\", \"texts\": {\"caption\": [\"t\"]}}\n\n{not json\n";
        assert!(matches!(parse(text), Err(CorpusError::Malformed { line: 3, .. })));
    }

    #[test]
    fn empty_text_list_rejected() {
        let text = r#"{"id": "a", "texts": {"caption": []}}"#;
        assert!(matches!(parse(text), Err(CorpusError::EmptyTextList { .. })));
        let text = r#"{"id": "a", "texts": {}}"#;
        assert!(matches!(parse(text), Err(CorpusError::NoTexts { .. })));
    }

    #[test]
    fn round_trips_through_jsonl() {
        let corpus = parse(THREE).unwrap();
        let again = parse(&corpus.to_jsonl()).unwrap();
        assert_eq!(corpus, again);
    }

    fn write_tmp(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
        let path = dir.path().join(name);
        std::fs::write(&path, body).unwrap();
        path
    }

    #[test]
    fn embeddings_reordered_to_corpus_order() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = parse(THREE).unwrap();
        let path = write_tmp(
            &dir,
            "img.jsonl",
            "{\"id\":\"c\",\"vector\":[3,3,3,3]}\n{\"id\":\"a\",\"vector\":[1,1,1,1]}\n{\"id\":\"zz\",\"vector\":[9,9,9,9]}\n{\"id\":\"b\",\"vector\":[2,2,2,2]}\n",
        );
        let m: EmbeddingMatrix<f64> = load_embeddings(&path, &corpus).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.dim(), 4);
        assert_eq!(m.rows().row(0), &[1.0; 4]);
        assert_eq!(m.rows().row(2), &[3.0; 4]);
        assert_eq!(m.provenance(), "img");
    }

    #[test]
    fn embeddings_missing_id() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = parse(THREE).unwrap();
        let path = write_tmp(
            &dir,
            "e.jsonl",
            "{\"id\":\"a\",\"vector\":[1]}\n{\"id\":\"b\",\"vector\":[2]}\n",
        );
        match load_embeddings::<f64>(&path, &corpus) {
            Err(CorpusError::MissingId { id }) => assert_eq!(id, "c"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn embeddings_non_finite_reports_id() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = parse(THREE).unwrap();
        for bad in ["NaN", "\"NaN\"", "-Infinity", "\"inf\""] {
            let body = format!(
                "{{\"id\":\"a\",\"vector\":[1,2]}}\n{{\"id\":\"b\",\"vector\":[{bad},2]}}\n{{\"id\":\"c\",\"vector\":[1,2]}}\n"
            );
            let path = write_tmp(&dir, "e.jsonl", &body);
            match load_embeddings::<f64>(&path, &corpus) {
                Err(CorpusError::NonFinite { id, position }) => {
                    assert_eq!(id, "b");
                    assert_eq!(position, 0);
                }
                other => panic!("{bad}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn f32_overflow_is_non_finite() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = parse(THREE).unwrap();
        let path = write_tmp(
            &dir,
            "e.jsonl",
            "{\"id\":\"a\",\"vector\":[1e300]}\n{\"id\":\"b\",\"vector\":[1]}\n{\"id\":\"c\",\"vector\":[1]}\n",
        );
        assert!(matches!(
            load_embeddings::<f32>(&path, &corpus),
            Err(CorpusError::NonFinite { .. })
        ));
        assert!(load_embeddings::<f64>(&path, &corpus).is_ok());
    }

    #[test]
    fn embeddings_inconsistent_dim() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = parse(THREE).unwrap();
        let path = write_tmp(
            &dir,
            "e.jsonl",
            "{\"id\":\"a\",\"vector\":[1,2]}\n{\"id\":\"b\",\"vector\":[1,2,3]}\n",
        );
        assert!(matches!(
            load_embeddings::<f64>(&path, &corpus),
            Err(CorpusError::InconsistentDim { expected: 2, found: 3, .. })
        ));
    }

    #[test]
    fn embedding_sets_group_repeated_ids() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = parse(THREE).unwrap();
        let path = write_tmp(
            &dir,
            "e.jsonl",
            "{\"id\":\"b\",\"vector\":[1,0]}\n{\"id\":\"a\",\"vector\":[0,1]}\n{\"id\":\"b\",\"vector\":[0,1]}\n{\"id\":\"c\",\"vector\":[1,1]}\n",
        );
        let sets: EmbeddingSets<f64> = load_embedding_sets(&path, &corpus).unwrap();
        assert_eq!(sets.dim, 2);
        assert_eq!(sets.sets[1], vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(matches!(
            load_embeddings::<f64>(&path, &corpus),
            Err(CorpusError::DuplicateEmbedding { .. })
        ));
    }
}
