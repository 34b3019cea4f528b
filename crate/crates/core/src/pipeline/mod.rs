//! Experiment orchestration: vectorize, cluster with restarts, evaluate,
//! explain, select prompts by K-Means loss, and sweep the number of texts.

mod config;
mod report;
pub mod synthetic;

use std::collections::{BTreeMap, BTreeSet};
use std::io;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cluster::{ClusterError, KMeans};
use crate::corpus::{
    load_corpus, load_embedding_sets, load_embeddings, Corpus, CorpusError, EmbeddingClient,
    EmbeddingMatrix, EmbeddingSets,
};
use crate::explain::{
    explain_texts, joined_keywords, score_explanations, ExplainError, ExplanationScores,
};
use crate::matrix::DenseMatrix;
use crate::metrics::{
    cluster_accuracy, confusion_matrix, contingency, nmi, ConfusionMatrix, MetricsError,
};
use crate::vectorize::{aggregate_embeddings, fit_tfidf, transform_tfidf, StopWords, VectorizeError};

pub use config::{
    split_list, ConfigOverrides, ExperimentConfig, Representation, DEFAULT_DRAWS, DEFAULT_RUNS,
    DEFAULT_TEXTS_PER_IMAGE,
};
pub use report::{emit_explanations, emit_report, emit_selection, emit_sweep, render_report, render_selection, render_sweep};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
    #[error("{stage}: {source}")]
    Corpus {
        stage: &'static str,
        #[source]
        source: CorpusError,
    },
    #[error("{stage}: {source}")]
    Vectorize {
        stage: &'static str,
        #[source]
        source: VectorizeError,
    },
    #[error("{stage}: {source}")]
    Cluster {
        stage: &'static str,
        #[source]
        source: ClusterError,
    },
    #[error("{stage}: {source}")]
    Metrics {
        stage: &'static str,
        #[source]
        source: MetricsError,
    },
    #[error("{stage}: {source}")]
    Explain {
        stage: &'static str,
        #[source]
        source: ExplainError,
    },
    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl PipelineError {
    pub fn is_io(&self) -> bool {
        match self {
            PipelineError::Io { .. } => true,
            PipelineError::Corpus { source, .. } => source.is_io(),
            _ => false,
        }
    }

    /// 2 for I/O failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        if self.is_io() {
            2
        } else {
            1
        }
    }
}

fn at<E, F>(stage: &'static str, wrap: F) -> impl FnOnce(E) -> PipelineError
where
    F: FnOnce(&'static str, E) -> PipelineError,
{
    move |e| wrap(stage, e)
}

fn corpus_err(stage: &'static str, source: CorpusError) -> PipelineError {
    PipelineError::Corpus { stage, source }
}

fn vectorize_err(stage: &'static str, source: VectorizeError) -> PipelineError {
    PipelineError::Vectorize { stage, source }
}

fn metrics_err(stage: &'static str, source: MetricsError) -> PipelineError {
    PipelineError::Metrics { stage, source }
}

fn explain_err(stage: &'static str, source: ExplainError) -> PipelineError {
    PipelineError::Explain { stage, source }
}

/// Everything read from disk (or the embedding service) for a config.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub corpus: Corpus,
    pub stopwords: StopWords,
    pub text_embeddings: BTreeMap<String, EmbeddingSets<f64>>,
    pub image_embeddings: Option<EmbeddingMatrix<f64>>,
}

impl Inputs {
    pub fn load(config: &ExperimentConfig) -> Result<Self, PipelineError> {
        config.validate()?;
        let corpus = load_corpus(&config.corpus).map_err(at("load corpus", corpus_err))?;
        Self::with_corpus(config, corpus)
    }

    pub fn with_corpus(config: &ExperimentConfig, corpus: Corpus) -> Result<Self, PipelineError> {
        config.validate()?;
        for s in &config.strategies {
            if !corpus.has_strategy(s) {
                return Err(PipelineError::Config(format!(
                    "strategy {s:?} not in corpus (available: {:?})",
                    corpus.strategies()
                )));
            }
        }
        let stopwords = match &config.stopwords {
            Some(path) => StopWords::from_file(path).map_err(|source| PipelineError::Io {
                context: format!("reading stopwords {}", path.display()),
                source,
            })?,
            None => StopWords::english(),
        };

        let mut text_embeddings = BTreeMap::new();
        if config.representations.contains(&Representation::Embedding) {
            for s in &config.strategies {
                let sets = match config.embeddings.get(s) {
                    Some(path) => load_embedding_sets(path, &corpus)
                        .map_err(at("load text embeddings", corpus_err))?,
                    None => fetch_sets(config, &corpus, s)?,
                };
                text_embeddings.insert(s.clone(), sets);
            }
        }
        let image_embeddings = match (&config.image_embeddings, config.representations.contains(&Representation::Image)) {
            (Some(path), true) => Some(
                load_embeddings(path, &corpus)
                    .map_err(at("load image embeddings", corpus_err))?
                    .with_provenance("image-encoder"),
            ),
            _ => None,
        };
        Ok(Self {
            corpus,
            stopwords,
            text_embeddings,
            image_embeddings,
        })
    }
}

fn fetch_sets(
    config: &ExperimentConfig,
    corpus: &Corpus,
    strategy: &str,
) -> Result<EmbeddingSets<f64>, PipelineError> {
    let endpoint = config
        .embed_endpoint
        .as_deref()
        .ok_or_else(|| PipelineError::Config(format!("no embeddings for strategy {strategy:?}")))?;
    let mut flat = Vec::new();
    let mut lengths = Vec::with_capacity(corpus.len());
    for r in corpus.records() {
        let texts = r.texts_for(strategy).unwrap_or_default();
        lengths.push(texts.len());
        flat.extend_from_slice(texts);
    }
    let vectors = EmbeddingClient::new(endpoint)
        .batch(config.embed_batch)
        .fetch(&flat)
        .map_err(at("fetch text embeddings", corpus_err))?;
    let dim = vectors.first().map_or(0, Vec::len);
    let mut it = vectors.into_iter();
    let sets = lengths.iter().map(|&n| it.by_ref().take(n).collect()).collect();
    Ok(EmbeddingSets {
        ids: corpus.ids().map(str::to_string).collect(),
        dim,
        sets,
    })
}

/// Which texts of each record feed the representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TextSelection {
    /// The first `m` texts of every record.
    First(usize),
    /// Explicit per-record text indices.
    Indices(Vec<Vec<usize>>),
}

impl TextSelection {
    fn indices(&self, record: usize, available: usize) -> Result<Vec<usize>, PipelineError> {
        let idx: Vec<usize> = match self {
            TextSelection::First(m) => (0..*m).collect(),
            TextSelection::Indices(all) => all[record].clone(),
        };
        if idx.is_empty() || idx.iter().any(|&i| i >= available) {
            return Err(PipelineError::Config(format!(
                "record {record}: selection {idx:?} exceeds {available} available texts"
            )));
        }
        Ok(idx)
    }
}

/// Mean and spread of a per-run metric on the 0-100 scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    /// Population standard deviation over runs.
    pub std: f64,
    pub values: Vec<f64>,
}

impl MetricSummary {
    pub fn of(values: Vec<f64>) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Self {
            mean,
            std: var.sqrt(),
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationSummary {
    pub sem: Option<f64>,
    pub cosine: Option<f64>,
    pub cosine_status: crate::explain::CosineStatus,
    pub empty_clusters: Vec<usize>,
}

/// Results for one (strategy, representation) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryReport {
    pub strategy: String,
    pub representation: Representation,
    pub k: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub m: usize,
    pub acc: Option<MetricSummary>,
    pub nmi: Option<MetricSummary>,
    pub inertias: Vec<f64>,
    pub best_index: usize,
    pub best_inertia: f64,
    pub confusion_file: Option<String>,
    pub explanations_file: String,
    pub explanation: ExplanationSummary,
    pub vocabulary_size: Option<usize>,
    /// Ids whose TF-IDF row is all zeros.
    pub zero_rows: Vec<String>,
}

/// Best-run artifacts that are written to their own files.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryArtifacts {
    pub file_stem: String,
    pub assignments: Vec<usize>,
    pub confusion: Option<ConfusionMatrix>,
    pub explanations: ExplanationScores,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub entries: Vec<EntryReport>,
    #[serde(skip)]
    pub artifacts: Vec<EntryArtifacts>,
    #[serde(skip)]
    pub config: Option<ExperimentConfig>,
}

impl MetricReport {
    pub fn entry(&self, strategy: &str, representation: Representation) -> Option<&EntryReport> {
        self.entries
            .iter()
            .find(|e| e.strategy == strategy && e.representation == representation)
    }
}

fn file_stem(strategy: &str, repr: Representation, multi_repr: bool) -> String {
    let clean: String = strategy
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    if multi_repr {
        format!("{clean}_{repr}")
    } else {
        clean
    }
}

struct Features {
    points: DenseMatrix<f64>,
    vocabulary_size: Option<usize>,
    zero_rows: Vec<String>,
}

fn build_features(
    config: &ExperimentConfig,
    inputs: &Inputs,
    strategy: &str,
    repr: Representation,
    selection: &TextSelection,
) -> Result<Features, PipelineError> {
    let corpus = &inputs.corpus;
    match repr {
        Representation::Tfidf => {
            let docs = corpus
                .records()
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let texts = r.texts_for(strategy).unwrap_or_default();
                    let idx = selection.indices(i, texts.len())?;
                    Ok(idx.iter().map(|&j| texts[j].as_str()).collect::<Vec<_>>().join(" "))
                })
                .collect::<Result<Vec<String>, PipelineError>>()?;
            let vocab = fit_tfidf(&docs, config.max_vocab, &inputs.stopwords)
                .map_err(at("fit tf-idf", vectorize_err))?;
            let matrix = transform_tfidf::<f64, _>(&docs, &vocab);
            let ids: Vec<&str> = corpus.ids().collect();
            let zero_rows = matrix.zero_rows().into_iter().map(|i| ids[i].to_string()).collect();
            Ok(Features {
                points: matrix.to_dense(),
                vocabulary_size: Some(vocab.len()),
                zero_rows,
            })
        }
        Representation::Embedding => {
            let sets = inputs.text_embeddings.get(strategy).ok_or_else(|| {
                PipelineError::Config(format!("no text embeddings loaded for {strategy:?}"))
            })?;
            let mut rows = Vec::with_capacity(corpus.len());
            for (i, (record, set)) in corpus.records().iter().zip(&sets.sets).enumerate() {
                let n_texts = record.texts_for(strategy).map_or(0, <[String]>::len);
                let row = if set.len() == 1 && n_texts != 1 {
                    // one pre-aggregated vector per image
                    aggregate_embeddings(set)
                } else {
                    if set.len() != n_texts {
                        return Err(PipelineError::Config(format!(
                            "record {:?}: {} vectors for {n_texts} texts",
                            record.id,
                            set.len()
                        )));
                    }
                    let idx = selection.indices(i, n_texts)?;
                    let chosen: Vec<&Vec<f64>> = idx.iter().map(|&j| &set[j]).collect();
                    aggregate_embeddings(&chosen)
                }
                .map_err(at("aggregate embeddings", vectorize_err))?;
                rows.push(row);
            }
            let points = DenseMatrix::from_rows(&rows).map_err(|e| {
                PipelineError::Config(format!("embedding rows differ in dimension: {e}"))
            })?;
            Ok(Features {
                points,
                vocabulary_size: None,
                zero_rows: Vec::new(),
            })
        }
        Representation::Image => {
            let m = inputs
                .image_embeddings
                .as_ref()
                .ok_or_else(|| PipelineError::Config("image embeddings not loaded".into()))?;
            Ok(Features {
                points: m.rows().clone(),
                vocabulary_size: None,
                zero_rows: Vec::new(),
            })
        }
    }
}

/// The matrix K-Means sees for one (strategy, representation) pair.
pub fn features(
    config: &ExperimentConfig,
    inputs: &Inputs,
    strategy: &str,
    repr: Representation,
    selection: &TextSelection,
) -> Result<DenseMatrix<f64>, PipelineError> {
    build_features(config, inputs, strategy, repr, selection).map(|f| f.points)
}

fn resolve_k(config: &ExperimentConfig, corpus: &Corpus) -> Result<usize, PipelineError> {
    match config.k {
        Some(k) => Ok(k),
        None => corpus
            .labels()
            .map(|l| l.into_iter().collect::<BTreeSet<_>>().len())
            .ok_or_else(|| PipelineError::Config("k is required for an unlabeled corpus".into())),
    }
}

fn fetch_vector_map(
    endpoint: &str,
    batch: usize,
    items: &BTreeMap<usize, String>,
) -> Result<BTreeMap<usize, Vec<f64>>, PipelineError> {
    let texts: Vec<String> = items.values().cloned().collect();
    let vectors = EmbeddingClient::new(endpoint)
        .batch(batch)
        .fetch(&texts)
        .map_err(at("embed explanations", corpus_err))?;
    Ok(items.keys().copied().zip(vectors).collect())
}

/// Scores keyword explanations of `assignments` against `truth_names`.
fn explain_and_score(
    config: &ExperimentConfig,
    inputs: &Inputs,
    strategy: &str,
    selection: &TextSelection,
    assignments: &[usize],
    truth_names: &BTreeMap<usize, String>,
) -> Result<ExplanationScores, PipelineError> {
    let selected: Vec<Vec<String>> = inputs
        .corpus
        .records()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let texts = r.texts_for(strategy).unwrap_or_default();
            let idx = selection.indices(i, texts.len())?;
            Ok(idx.into_iter().map(|j| texts[j].clone()).collect())
        })
        .collect::<Result<_, PipelineError>>()?;
    let refs: Vec<&[String]> = selected.iter().map(Vec::as_slice).collect();
    let explanation =
        explain_texts(&refs, assignments, config.top).map_err(at("explain clusters", explain_err))?;

    let vectors = match (&config.embed_endpoint, truth_names.is_empty()) {
        (Some(endpoint), false) => {
            let joined: BTreeMap<usize, String> = truth_names
                .keys()
                .map(|&c| (c, joined_keywords(explanation.keywords(c))))
                .collect();
            let names: BTreeMap<usize, String> = truth_names
                .iter()
                .map(|(&c, n)| (c, crate::explain::normalize_class_name(n)))
                .collect();
            Some((
                fetch_vector_map(endpoint, config.embed_batch, &names)?,
                fetch_vector_map(endpoint, config.embed_batch, &joined)?,
            ))
        }
        _ => None,
    };
    score_explanations(
        &explanation,
        truth_names,
        vectors.as_ref().map(|v| &v.0),
        vectors.as_ref().map(|v| &v.1),
        config.cosine_threshold,
    )
    .map_err(at("score explanations", explain_err))
}

fn evaluate_entry(
    config: &ExperimentConfig,
    inputs: &Inputs,
    strategy: &str,
    repr: Representation,
    selection: &TextSelection,
) -> Result<(EntryReport, EntryArtifacts), PipelineError> {
    let corpus = &inputs.corpus;
    let k = resolve_k(config, corpus)?;
    let features = build_features(config, inputs, strategy, repr, selection)?;
    let summary = KMeans::new(k)
        .fit_restarts(&features.points, config.runs, config.base_seed)
        .map_err(|source| PipelineError::Cluster {
            stage: "k-means",
            source,
        })?;
    let best = summary.best();
    let labels = corpus.labels();

    let (acc, nmi_summary) = match &labels {
        Some(labels) => {
            let mut accs = Vec::with_capacity(summary.runs.len());
            let mut nmis = Vec::with_capacity(summary.runs.len());
            for run in &summary.runs {
                let table =
                    contingency(labels, &run.assignments).map_err(at("evaluate", metrics_err))?;
                accs.push(cluster_accuracy(&table).scaled);
                nmis.push(nmi(&table).scaled);
            }
            (Some(MetricSummary::of(accs)), Some(MetricSummary::of(nmis)))
        }
        None => (None, None),
    };

    let (confusion, truth_names) = match &labels {
        Some(labels) => {
            let table = contingency(labels, &best.assignments).map_err(at("confusion", metrics_err))?;
            let names: BTreeMap<usize, String> = table
                .matched_names()
                .into_iter()
                .enumerate()
                .filter_map(|(c, n)| n.map(|n| (c, n.to_string())))
                .collect();
            (Some(confusion_matrix(&table)), names)
        }
        None => (None, BTreeMap::new()),
    };
    let explanations =
        explain_and_score(config, inputs, strategy, selection, &best.assignments, &truth_names)?;

    let stem = file_stem(strategy, repr, config.representations.len() > 1);
    let entry = EntryReport {
        strategy: strategy.to_string(),
        representation: repr,
        k,
        runs: config.runs,
        base_seed: config.base_seed,
        m: match selection {
            TextSelection::First(m) => *m,
            TextSelection::Indices(all) => all.first().map_or(0, Vec::len),
        },
        acc,
        nmi: nmi_summary,
        inertias: summary.inertias(),
        best_index: summary.best_index,
        best_inertia: best.inertia,
        confusion_file: confusion.as_ref().map(|_| format!("confusion_{stem}.csv")),
        explanations_file: format!("explanations_{stem}.json"),
        explanation: ExplanationSummary {
            sem: explanations.sem.map(|v| v.scaled),
            cosine: explanations.cosine.map(|v| v.scaled),
            cosine_status: explanations.cosine_status,
            empty_clusters: explanations
                .clusters
                .iter()
                .filter(|c| c.keywords.is_empty())
                .map(|c| c.cluster)
                .collect(),
        },
        vocabulary_size: features.vocabulary_size,
        zero_rows: features.zero_rows,
    };
    let artifacts = EntryArtifacts {
        file_stem: stem,
        assignments: best.assignments.clone(),
        confusion,
        explanations,
    };
    Ok((entry, artifacts))
}

/// Runs every (strategy, representation) pair of `config` on loaded inputs.
pub fn run_with_inputs(
    config: &ExperimentConfig,
    inputs: &Inputs,
    selection: &TextSelection,
) -> Result<MetricReport, PipelineError> {
    let mut entries = Vec::new();
    let mut artifacts = Vec::new();
    for strategy in &config.strategies {
        for &repr in &config.representations {
            let (e, a) = evaluate_entry(config, inputs, strategy, repr, selection)?;
            entries.push(e);
            artifacts.push(a);
        }
    }
    Ok(MetricReport {
        entries,
        artifacts,
        config: Some(config.clone()),
    })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<MetricReport, PipelineError> {
    let inputs = Inputs::load(config)?;
    run_with_inputs(config, &inputs, &TextSelection::First(config.m))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptCandidate {
    pub strategy: String,
    pub representation: Representation,
    pub best_inertia: f64,
    pub acc_mean: Option<f64>,
    pub nmi_mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptSelection {
    pub chosen: String,
    pub chosen_index: usize,
    pub candidates: Vec<PromptCandidate>,
    #[serde(skip)]
    pub reports: Vec<MetricReport>,
}

impl PromptSelection {
    pub fn chosen_report(&self) -> &MetricReport {
        &self.reports[self.chosen_index]
    }
}

/// Picks the prompt whose best run has the lowest K-Means loss; ties go to
/// the earliest config.
pub fn select_prompt(configs: &[ExperimentConfig]) -> Result<PromptSelection, PipelineError> {
    let first = configs
        .first()
        .ok_or_else(|| PipelineError::Config("no prompt strategies given".into()))?;
    if configs
        .iter()
        .any(|c| c.corpus != first.corpus || c.k != first.k)
    {
        return Err(PipelineError::Config(
            "prompt selection needs one corpus and one k".into(),
        ));
    }
    let inputs = Inputs::load(first)?;
    select_prompt_with(configs, &inputs.corpus)
}

/// [`select_prompt`] on an already loaded corpus.
pub fn select_prompt_with(
    configs: &[ExperimentConfig],
    corpus: &Corpus,
) -> Result<PromptSelection, PipelineError> {
    let mut candidates = Vec::with_capacity(configs.len());
    let mut reports = Vec::with_capacity(configs.len());
    for config in configs {
        if config.strategies.len() != 1 || config.representations.len() != 1 {
            return Err(PipelineError::Config(
                "each prompt config needs exactly one strategy and one representation".into(),
            ));
        }
        let inputs = Inputs::with_corpus(config, corpus.clone())?;
        let report = run_with_inputs(config, &inputs, &TextSelection::First(config.m))?;
        let entry = &report.entries[0];
        candidates.push(PromptCandidate {
            strategy: entry.strategy.clone(),
            representation: entry.representation,
            best_inertia: entry.best_inertia,
            acc_mean: entry.acc.as_ref().map(|a| a.mean),
            nmi_mean: entry.nmi.as_ref().map(|a| a.mean),
        });
        reports.push(report);
    }
    let mut chosen_index = 0;
    for (i, c) in candidates.iter().enumerate() {
        if c.best_inertia < candidates[chosen_index].best_inertia {
            chosen_index = i;
        }
    }
    Ok(PromptSelection {
        chosen: candidates[chosen_index].strategy.clone(),
        chosen_index,
        candidates,
        reports,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepStat {
    pub mean: f64,
    pub std: f64,
    /// Sample standard deviation over draws divided by sqrt(draws).
    pub stderr: f64,
    /// One mean-over-runs value per draw.
    pub values: Vec<f64>,
}

impl SweepStat {
    fn of(values: Vec<f64>) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            std,
            stderr: std / n.sqrt(),
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub strategy: String,
    pub representation: Representation,
    pub m: usize,
    pub draws: usize,
    pub acc: SweepStat,
    pub nmi: SweepStat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

fn draw_seed(base_seed: u64, m: usize, draw: usize) -> u64 {
    base_seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((m as u64) << 32)
        .wrapping_add(draw as u64)
}

/// For every `m`, draws `draws` random size-`m` subsets of each image's
/// texts and runs the full protocol on each; reports mean and standard error
/// of the mean-over-runs Acc and NMI.
pub fn caption_sweep(
    config: &ExperimentConfig,
    m_values: &[usize],
    draws: usize,
) -> Result<SweepTable, PipelineError> {
    let inputs = Inputs::load(config)?;
    caption_sweep_with(config, &inputs, m_values, draws)
}

pub fn caption_sweep_with(
    config: &ExperimentConfig,
    inputs: &Inputs,
    m_values: &[usize],
    draws: usize,
) -> Result<SweepTable, PipelineError> {
    if draws == 0 {
        return Err(PipelineError::Config("draws must be at least 1".into()));
    }
    if m_values.is_empty() || m_values.contains(&0) {
        return Err(PipelineError::Config("m values must be positive".into()));
    }
    if !inputs.corpus.is_labeled() {
        return Err(PipelineError::Config("caption sweep needs a labeled corpus".into()));
    }
    let mut rows = Vec::new();
    for strategy in &config.strategies {
        let available = inputs.corpus.min_texts(strategy).unwrap_or(0);
        for &m in m_values {
            if m > available {
                return Err(PipelineError::Config(format!(
                    "m = {m} exceeds the {available} texts available for {strategy:?}"
                )));
            }
        }
        for &repr in &config.representations {
            let mut single = config.for_strategy(strategy);
            single.representations = vec![repr];
            for &m in m_values {
                let mut accs = Vec::with_capacity(draws);
                let mut nmis = Vec::with_capacity(draws);
                for draw in 0..draws {
                    let mut rng = ChaCha8Rng::seed_from_u64(draw_seed(config.base_seed, m, draw));
                    let indices = inputs
                        .corpus
                        .records()
                        .iter()
                        .map(|r| {
                            let n = r.texts_for(strategy).map_or(0, <[String]>::len);
                            let mut idx = rand::seq::index::sample(&mut rng, n, m).into_vec();
                            idx.sort_unstable();
                            idx
                        })
                        .collect();
                    single.m = m;
                    let report =
                        run_with_inputs(&single, inputs, &TextSelection::Indices(indices))?;
                    let entry = &report.entries[0];
                    accs.push(entry.acc.as_ref().map_or(0.0, |a| a.mean));
                    nmis.push(entry.nmi.as_ref().map_or(0.0, |a| a.mean));
                }
                rows.push(SweepRow {
                    strategy: strategy.clone(),
                    representation: repr,
                    m,
                    draws,
                    acc: SweepStat::of(accs),
                    nmi: SweepStat::of(nmis),
                });
            }
        }
    }
    Ok(SweepTable { rows })
}

/// Explanations for the best predicted clustering and for the ground-truth
/// partition of one strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplainOutput {
    pub report: MetricReport,
    pub predicted: ExplanationScores,
    pub truth: Option<ExplanationScores>,
}

pub fn explain_strategy(config: &ExperimentConfig) -> Result<ExplainOutput, PipelineError> {
    let inputs = Inputs::load(config)?;
    explain_strategy_with(config, &inputs)
}

pub fn explain_strategy_with(
    config: &ExperimentConfig,
    inputs: &Inputs,
) -> Result<ExplainOutput, PipelineError> {
    if config.strategies.len() != 1 {
        return Err(PipelineError::Config("explain needs exactly one strategy".into()));
    }
    let mut single = config.clone();
    single.representations.truncate(1);
    let selection = TextSelection::First(config.m);
    let report = run_with_inputs(&single, inputs, &selection)?;
    let predicted = report.artifacts[0].explanations.clone();
    let truth = match inputs.corpus.labels() {
        Some(labels) => {
            let table = contingency(&labels, &vec![0; labels.len()])
                .map_err(at("truth partition", metrics_err))?;
            let classes = table.classes();
            let assignments: Vec<usize> = labels
                .iter()
                .map(|l| classes.iter().position(|c| c == l).expect("label in table"))
                .collect();
            let names = classes.iter().cloned().enumerate().collect();
            Some(explain_and_score(
                &single,
                inputs,
                &config.strategies[0],
                &selection,
                &assignments,
                &names,
            )?)
        }
        None => None,
    };
    Ok(ExplainOutput {
        report,
        predicted,
        truth,
    })
}

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub(crate) fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<std::path::PathBuf, PipelineError> {
    std::fs::create_dir_all(dir).map_err(|source| PipelineError::Io {
        context: format!("creating {}", dir.display()),
        source,
    })?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| PipelineError::Io {
        context: format!("writing {}", path.display()),
        source,
    })?;
    Ok(path)
}
