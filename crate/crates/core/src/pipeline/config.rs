//! Experiment configuration: a flat `key = value` file plus overrides.
//!
//! ```text
//! # paths are relative to this file
//! corpus = corpus.jsonl
//! strategy = caption, keywords
//! repr = tfidf
//! k = 10
//! runs = 50
//! seed = 0
//! embeddings.caption = caption_sbert.jsonl
//! image_embeddings = clip.jsonl
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::explain::{DEFAULT_COSINE_THRESHOLD, DEFAULT_TOP};
use crate::vectorize::DEFAULT_MAX_VOCAB;

pub const DEFAULT_RUNS: usize = 50;
pub const DEFAULT_TEXTS_PER_IMAGE: usize = 6;
pub const DEFAULT_DRAWS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Tfidf,
    Embedding,
    Image,
}

impl Representation {
    pub fn as_str(self) -> &'static str {
        match self {
            Representation::Tfidf => "tfidf",
            Representation::Embedding => "embedding",
            Representation::Image => "image",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Representation {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tfidf" | "tf-idf" => Ok(Representation::Tfidf),
            "embedding" | "embeddings" | "sbert" => Ok(Representation::Embedding),
            "image" => Ok(Representation::Image),
            other => Err(PipelineError::Config(format!(
                "unknown representation {other:?} (expected tfidf, embedding or image)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub corpus: PathBuf,
    pub strategies: Vec<String>,
    pub representations: Vec<Representation>,
    /// Per-text embedding files keyed by strategy.
    pub embeddings: BTreeMap<String, PathBuf>,
    pub image_embeddings: Option<PathBuf>,
    /// Number of clusters; `None` means one per ground-truth class.
    pub k: Option<usize>,
    pub runs: usize,
    pub base_seed: u64,
    /// Texts used per image.
    pub m: usize,
    pub max_vocab: usize,
    pub stopwords: Option<PathBuf>,
    pub output: PathBuf,
    pub embed_endpoint: Option<String>,
    pub embed_batch: usize,
    /// Keywords per cluster explanation.
    pub top: usize,
    /// Random subsets per `m` in a caption sweep.
    pub draws: usize,
    pub cosine_threshold: f64,
}

impl ExperimentConfig {
    pub fn new(corpus: impl Into<PathBuf>) -> Self {
        Self {
            corpus: corpus.into(),
            strategies: Vec::new(),
            representations: vec![Representation::Tfidf],
            embeddings: BTreeMap::new(),
            image_embeddings: None,
            k: None,
            runs: DEFAULT_RUNS,
            base_seed: 0,
            m: DEFAULT_TEXTS_PER_IMAGE,
            max_vocab: DEFAULT_MAX_VOCAB,
            stopwords: None,
            output: PathBuf::from("out"),
            embed_endpoint: None,
            embed_batch: 32,
            top: DEFAULT_TOP,
            draws: DEFAULT_DRAWS,
            cosine_threshold: DEFAULT_COSINE_THRESHOLD,
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
            context: format!("reading config {}", path.display()),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses `key = value` lines; relative paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, PipelineError> {
        let mut config = Self::new(PathBuf::new());
        let mut have_corpus = false;
        let resolve = |v: &str| {
            let p = PathBuf::from(v);
            if p.is_absolute() {
                p
            } else {
                base_dir.join(p)
            }
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                PipelineError::Config(format!("line {}: expected `key = value`", i + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| {
                PipelineError::Config(format!("line {}: invalid {what} {value:?}", i + 1))
            };
            match key {
                "corpus" => {
                    config.corpus = resolve(value);
                    have_corpus = true;
                }
                "strategy" | "strategies" => config.strategies = split_list(value),
                "repr" | "representation" | "representations" => {
                    config.representations = split_list(value)
                        .iter()
                        .map(|s| s.parse())
                        .collect::<Result<_, _>>()?;
                }
                "image_embeddings" => config.image_embeddings = Some(resolve(value)),
                "k" => config.k = Some(value.parse().map_err(|_| bad("k"))?),
                "runs" => config.runs = value.parse().map_err(|_| bad("runs"))?,
                "seed" | "base_seed" => config.base_seed = value.parse().map_err(|_| bad("seed"))?,
                "m" => config.m = value.parse().map_err(|_| bad("m"))?,
                "max_vocab" => config.max_vocab = value.parse().map_err(|_| bad("max_vocab"))?,
                "stopwords" => config.stopwords = Some(resolve(value)),
                "output" | "out" => config.output = resolve(value),
                "embed_endpoint" => config.embed_endpoint = Some(value.to_string()),
                "embed_batch" => config.embed_batch = value.parse().map_err(|_| bad("embed_batch"))?,
                "top" => config.top = value.parse().map_err(|_| bad("top"))?,
                "draws" => config.draws = value.parse().map_err(|_| bad("draws"))?,
                "cosine_threshold" => {
                    config.cosine_threshold = value.parse().map_err(|_| bad("cosine_threshold"))?
                }
                _ => match key.strip_prefix("embeddings.") {
                    Some(strategy) if !strategy.is_empty() => {
                        config.embeddings.insert(strategy.to_string(), resolve(value));
                    }
                    _ => {
                        return Err(PipelineError::Config(format!(
                            "line {}: unknown key {key:?}",
                            i + 1
                        )))
                    }
                },
            }
        }
        if !have_corpus {
            return Err(PipelineError::Config("missing `corpus`".into()));
        }
        Ok(config)
    }

    pub fn apply(&mut self, overrides: &ConfigOverrides) {
        if let Some(s) = &overrides.strategies {
            self.strategies = s.clone();
        }
        if let Some(r) = &overrides.representations {
            self.representations = r.clone();
        }
        if let Some(k) = overrides.k {
            self.k = Some(k);
        }
        if let Some(runs) = overrides.runs {
            self.runs = runs;
        }
        if let Some(seed) = overrides.seed {
            self.base_seed = seed;
        }
        if let Some(m) = overrides.m {
            self.m = m;
        }
        if let Some(max_vocab) = overrides.max_vocab {
            self.max_vocab = max_vocab;
        }
        if let Some(out) = &overrides.output {
            self.output = out.clone();
        }
        if let Some(draws) = overrides.draws {
            self.draws = draws;
        }
    }

    /// Checks everything that does not need the corpus.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let fail = |m: &str| Err(PipelineError::Config(m.to_string()));
        if self.runs == 0 {
            return fail("runs must be at least 1");
        }
        if self.k == Some(0) {
            return fail("k must be at least 1");
        }
        if self.m == 0 {
            return fail("m must be at least 1");
        }
        if self.max_vocab == 0 {
            return fail("max_vocab must be at least 1");
        }
        if self.top == 0 {
            return fail("top must be at least 1");
        }
        if self.draws == 0 {
            return fail("draws must be at least 1");
        }
        if self.embed_batch == 0 {
            return fail("embed_batch must be at least 1");
        }
        if self.representations.is_empty() {
            return fail("no representation selected");
        }
        if self.strategies.is_empty() {
            return fail("no strategy selected");
        }
        for repr in &self.representations {
            match repr {
                Representation::Image if self.image_embeddings.is_none() => {
                    return fail("representation image requires `image_embeddings`");
                }
                Representation::Embedding => {
                    for s in &self.strategies {
                        if !self.embeddings.contains_key(s) && self.embed_endpoint.is_none() {
                            return Err(PipelineError::Config(format!(
                                "representation embedding needs `embeddings.{s}` or `embed_endpoint`"
                            )));
                        }
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Copy restricted to one strategy.
    pub fn for_strategy(&self, strategy: &str) -> Self {
        let mut c = self.clone();
        c.strategies = vec![strategy.to_string()];
        c
    }
}

/// Command-line overrides; `Some` fields replace config values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub strategies: Option<Vec<String>>,
    pub representations: Option<Vec<Representation>>,
    pub k: Option<usize>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub m: Option<usize>,
    pub max_vocab: Option<usize>,
    pub output: Option<PathBuf>,
    pub draws: Option<usize>,
}

pub fn split_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file() {
        let text = "# demo\ncorpus = data/c.jsonl\nstrategy = caption, keywords\nrepr = tfidf,embedding\nk = 3\nruns=5\nseed = 7\nembeddings.caption = e.jsonl\n";
        let c = ExperimentConfig::parse(text, Path::new("/base")).unwrap();
        assert_eq!(c.corpus, PathBuf::from("/base/data/c.jsonl"));
        assert_eq!(c.strategies, ["caption", "keywords"]);
        assert_eq!(c.representations, [Representation::Tfidf, Representation::Embedding]);
        assert_eq!((c.k, c.runs, c.base_seed, c.m), (Some(3), 5, 7, 6));
        assert_eq!(c.embeddings["caption"], PathBuf::from("/base/e.jsonl"));
    }

    #[test]
    fn overrides_take_precedence() {
        let mut c = ExperimentConfig::parse("corpus = c\nk = 3\nruns = 50", Path::new(".")).unwrap();
        c.apply(&ConfigOverrides {
            k: Some(4),
            runs: Some(1),
            ..Default::default()
        });
        assert_eq!((c.k, c.runs), (Some(4), 1));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentConfig::parse("k = 3", Path::new(".")).is_err());
        assert!(ExperimentConfig::parse("corpus = c\nbogus = 1", Path::new(".")).is_err());
        assert!(ExperimentConfig::parse("corpus = c\nk = x", Path::new(".")).is_err());
        assert!(ExperimentConfig::parse("corpus = c\nrepr = pixels", Path::new(".")).is_err());
    }

    #[test]
    fn image_without_embeddings_is_a_config_error() {
        let mut c = ExperimentConfig::new("c.jsonl");
        c.strategies = vec!["caption".into()];
        c.representations = vec![Representation::Image];
        assert!(matches!(c.validate(), Err(PipelineError::Config(_))));
        c.image_embeddings = Some("img.jsonl".into());
        assert!(c.validate().is_ok());
        c.runs = 0;
        assert!(c.validate().is_err());
    }
}
