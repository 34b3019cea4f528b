//! Keyword-count cluster explanations and their quality metrics.
//!
//! Each cluster is described by its most frequent keywords, with the rule
//! that a keyword may describe at most one cluster. Larger clusters claim
//! contested keywords first.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::metrics::MetricValue;
use crate::scalar::{self, Scalar};

pub const DEFAULT_TOP: usize = 2;
pub const DEFAULT_COSINE_THRESHOLD: f64 = 0.4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExplainError {
    #[error("{assignments} assignments for {records} records")]
    LengthMismatch { assignments: usize, records: usize },
    #[error("unknown strategy {0:?}")]
    UnknownStrategy(String),
    #[error("top must be at least 1")]
    ZeroTop,
    #[error("vectors have dimensions {0} and {1}")]
    DimensionMismatch(usize, usize),
    #[error("zero-norm vector")]
    ZeroNorm,
}

/// Splits each text on commas into lowercased, trimmed phrases; a phrase is
/// kept once per text.
pub fn extract_keywords<S: AsRef<str>>(texts: &[S]) -> Vec<String> {
    let mut out = Vec::new();
    for text in texts {
        let mut seen = HashSet::new();
        for phrase in text.as_ref().split(',') {
            let phrase = phrase.trim().to_lowercase();
            if !phrase.is_empty() && seen.insert(phrase.clone()) {
                out.push(phrase);
            }
        }
    }
    out
}

/// Keyword occurrence counts for one cluster.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeywordBag {
    counts: BTreeMap<String, usize>,
}

impl KeywordBag {
    pub fn add<I: IntoIterator<Item = String>>(&mut self, keywords: I) {
        for k in keywords {
            *self.counts.entry(k).or_default() += 1;
        }
    }

    pub fn count(&self, keyword: &str) -> usize {
        self.counts.get(keyword).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Keywords by descending count, then ascending lexicographic order.
    pub fn ranked(&self) -> Vec<(&str, usize)> {
        let mut ranked: Vec<(&str, usize)> =
            self.counts.iter().map(|(k, &c)| (k.as_str(), c)).collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterExplanation {
    pub cluster: usize,
    pub size: usize,
    pub keywords: Vec<String>,
    /// Set when the cluster's members produced no keywords at all.
    pub no_keywords: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Explanation {
    /// Indexed by cluster id.
    pub clusters: Vec<ClusterExplanation>,
}

impl Explanation {
    pub fn keywords(&self, cluster: usize) -> &[String] {
        &self.clusters[cluster].keywords
    }

    /// Clusters flagged as having produced no keywords.
    pub fn empty_clusters(&self) -> Vec<usize> {
        self.clusters
            .iter()
            .filter(|c| c.no_keywords)
            .map(|c| c.cluster)
            .collect()
    }

    /// True when no keyword appears in two clusters' lists.
    pub fn is_exclusive(&self) -> bool {
        let mut seen = HashSet::new();
        self.clusters
            .iter()
            .flat_map(|c| &c.keywords)
            .all(|k| seen.insert(k.as_str()))
    }
}

/// Explains clusters given each item's texts directly.
pub fn explain_texts<S: AsRef<str>>(
    texts: &[&[S]],
    assignments: &[usize],
    top: usize,
) -> Result<Explanation, ExplainError> {
    if texts.len() != assignments.len() {
        return Err(ExplainError::LengthMismatch {
            assignments: assignments.len(),
            records: texts.len(),
        });
    }
    if top == 0 {
        return Err(ExplainError::ZeroTop);
    }
    let k = assignments.iter().max().map_or(0, |&m| m + 1);
    let mut bags = vec![KeywordBag::default(); k];
    let mut sizes = vec![0usize; k];
    for (item_texts, &cluster) in texts.iter().zip(assignments) {
        sizes[cluster] += 1;
        bags[cluster].add(extract_keywords(item_texts));
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));

    let mut claimed: HashSet<&str> = HashSet::new();
    let mut lists = vec![Vec::new(); k];
    for &cluster in &order {
        for (keyword, _) in bags[cluster].ranked() {
            if lists[cluster].len() >= top {
                break;
            }
            if claimed.insert(keyword) {
                lists[cluster].push(keyword.to_string());
            }
        }
    }

    let clusters = lists
        .into_iter()
        .enumerate()
        .map(|(cluster, keywords)| ClusterExplanation {
            cluster,
            size: sizes[cluster],
            keywords,
            no_keywords: bags[cluster].is_empty(),
        })
        .collect();
    Ok(Explanation { clusters })
}

/// Explains clusters from the texts each member image has under `strategy`.
pub fn explain_clusters(
    corpus: &Corpus,
    strategy: &str,
    assignments: &[usize],
    top: usize,
) -> Result<Explanation, ExplainError> {
    if assignments.len() != corpus.len() {
        return Err(ExplainError::LengthMismatch {
            assignments: assignments.len(),
            records: corpus.len(),
        });
    }
    let texts = corpus
        .records()
        .iter()
        .map(|r| r.texts_for(strategy))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| ExplainError::UnknownStrategy(strategy.to_string()))?;
    explain_texts(&texts, assignments, top)
}

/// Lowercased class name with underscores read as spaces.
pub fn normalize_class_name(name: &str) -> String {
    name.to_lowercase().replace('_', " ")
}

/// The string a cluster explanation is matched and embedded as.
pub fn joined_keywords<S: AsRef<str>>(keywords: &[S]) -> String {
    keywords
        .iter()
        .map(|k| k.as_ref().to_lowercase())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Subset exact match: whether the normalized class name occurs in the
/// joined keyword string. No stemming.
pub fn sem_match<S: AsRef<str>>(truth_name: &str, keywords: &[S]) -> bool {
    let name = normalize_class_name(truth_name);
    !name.is_empty() && joined_keywords(keywords).contains(&name)
}

pub fn cosine_similarity<T: Scalar>(a: &[T], b: &[T]) -> Result<T, ExplainError> {
    if a.len() != b.len() {
        return Err(ExplainError::DimensionMismatch(a.len(), b.len()));
    }
    let (na, nb) = (scalar::norm(a), scalar::norm(b));
    if na.is_nan() || nb.is_nan() || na <= T::zero() || nb <= T::zero() {
        return Err(ExplainError::ZeroNorm);
    }
    Ok(scalar::dot(a, b) / (na * nb))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineMatch<T> {
    pub similarity: T,
    pub matched: bool,
}

/// Matches when the cosine similarity reaches `threshold` (inclusive).
pub fn cosine_match<T: Scalar>(
    name_vec: &[T],
    explanation_vec: &[T],
    threshold: T,
) -> Result<CosineMatch<T>, ExplainError> {
    let similarity = cosine_similarity(name_vec, explanation_vec)?;
    Ok(CosineMatch {
        similarity,
        matched: similarity >= threshold,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterScore {
    pub cluster: usize,
    pub keywords: Vec<String>,
    pub truth_name: Option<String>,
    pub sem: Option<u8>,
    pub cosine_sim: Option<f64>,
    pub cosine: Option<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CosineStatus {
    Computed,
    /// Vectors were missing; only SEM was scored.
    SemOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationScores {
    pub clusters: Vec<ClusterScore>,
    pub sem: Option<MetricValue>,
    pub cosine: Option<MetricValue>,
    pub cosine_status: CosineStatus,
}

fn mean_bits(bits: impl Iterator<Item = u8>) -> Option<MetricValue> {
    let (sum, count) = bits.fold((0u32, 0u32), |(s, c), b| (s + u32::from(b), c + 1));
    (count > 0).then(|| MetricValue::new(f64::from(sum) / f64::from(count)))
}

/// Scores each cluster that has a ground-truth name. Cosine scoring needs a
/// vector for every such cluster's name and explanation; otherwise it falls
/// back to SEM only and says so in `cosine_status`.
pub fn score_explanations<T: Scalar>(
    explanation: &Explanation,
    truth_names: &BTreeMap<usize, String>,
    name_vectors: Option<&BTreeMap<usize, Vec<T>>>,
    explanation_vectors: Option<&BTreeMap<usize, Vec<T>>>,
    threshold: T,
) -> Result<ExplanationScores, ExplainError> {
    let vectors = match (name_vectors, explanation_vectors) {
        (Some(n), Some(e))
            if truth_names
                .keys()
                .all(|c| n.contains_key(c) && e.contains_key(c)) =>
        {
            Some((n, e))
        }
        _ => None,
    };

    let mut clusters = Vec::with_capacity(explanation.clusters.len());
    for c in &explanation.clusters {
        let truth = truth_names.get(&c.cluster);
        let sem = truth.map(|t| u8::from(sem_match(t, &c.keywords)));
        let cosine = match (truth, vectors) {
            (Some(_), Some((names, expls))) => Some(cosine_match(
                &names[&c.cluster],
                &expls[&c.cluster],
                threshold,
            )?),
            _ => None,
        };
        clusters.push(ClusterScore {
            cluster: c.cluster,
            keywords: c.keywords.clone(),
            truth_name: truth.cloned(),
            sem,
            cosine_sim: cosine.map(|m| m.similarity.as_f64()),
            cosine: cosine.map(|m| u8::from(m.matched)),
        });
    }

    let sem = mean_bits(clusters.iter().filter_map(|c| c.sem));
    let cosine = vectors.and_then(|_| mean_bits(clusters.iter().filter_map(|c| c.cosine)));
    Ok(ExplanationScores {
        clusters,
        sem,
        cosine,
        cosine_status: if vectors.is_some() {
            CosineStatus::Computed
        } else {
            CosineStatus::SemOnly
        },
    })
}

#[derive(Serialize)]
struct ExportEntry<'a> {
    keywords: &'a [String],
    truth_name: Option<&'a str>,
    sem: Option<u8>,
    cosine_sim: Option<f64>,
}

impl ExplanationScores {
    /// JSON object keyed by cluster id.
    pub fn to_json(&self) -> serde_json::Value {
        let map: BTreeMap<String, ExportEntry<'_>> = self
            .clusters
            .iter()
            .map(|c| {
                (
                    c.cluster.to_string(),
                    ExportEntry {
                        keywords: &c.keywords,
                        truth_name: c.truth_name.as_deref(),
                        sem: c.sem,
                        cosine_sim: c.cosine_sim,
                    },
                )
            })
            .collect();
        serde_json::to_value(map).expect("plain data serializes")
    }

    /// Aligned text table: ground truth, explanation, SEM and cosine columns.
    pub fn render_table(&self) -> String {
        let rows: Vec<[String; 4]> = self
            .clusters
            .iter()
            .map(|c| {
                [
                    c.truth_name
                        .clone()
                        .unwrap_or_else(|| format!("cluster {}", c.cluster)),
                    c.keywords.join(", "),
                    c.sem.map_or("-".into(), |b| b.to_string()),
                    c.cosine.map_or("-".into(), |b| b.to_string()),
                ]
            })
            .collect();
        let header = ["Ground Truth", "Explanation", "SEM", "Cosine Sim."];
        let width = |i: usize| {
            rows.iter()
                .map(|r| r[i].chars().count())
                .chain([header[i].len()])
                .max()
                .unwrap_or(0)
        };
        let w: Vec<usize> = (0..4).map(width).collect();
        let line = |r: &[String; 4]| {
            format!(
                "{:>w0$} | {:>w1$} | {:>w2$} | {:>w3$}\n",
                r[0],
                r[1],
                r[2],
                r[3],
                w0 = w[0],
                w1 = w[1],
                w2 = w[2],
                w3 = w[3]
            )
        };
        let mut out = line(&header.map(String::from));
        out.push_str(&"-".repeat(w.iter().sum::<usize>() + 9));
        out.push('\n');
        for r in &rows {
            out.push_str(&line(r));
        }
        let fmt = |v: Option<MetricValue>| v.map_or("-".to_string(), |v| format!("{:.2}", v.scaled));
        out.push_str(&format!(
            "SEM: {}  Cosine: {}{}\n",
            fmt(self.sem),
            fmt(self.cosine),
            if self.cosine_status == CosineStatus::SemOnly {
                " (no vectors, SEM only)"
            } else {
                ""
            }
        ));
        out
    }
}
