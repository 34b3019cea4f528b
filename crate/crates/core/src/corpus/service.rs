//! Client for an external text-embedding service.
//!
//! Protocol: `POST <endpoint>/embed` with `{"texts": [...]}`, answered by
//! `{"vectors": [[...], ...]}`. Any non-2xx status is an error.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::CorpusError;

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [String],
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct EmbeddingClient {
    url: String,
    batch: usize,
    retries: usize,
    timeout: Duration,
}

impl EmbeddingClient {
    /// `endpoint` is the service base URL; `/embed` is appended unless
    /// already present.
    pub fn new(endpoint: &str) -> Self {
        let base = endpoint.trim_end_matches('/');
        let url = if base.ends_with("/embed") {
            base.to_string()
        } else {
            format!("{base}/embed")
        };
        Self {
            url,
            batch: 32,
            retries: 3,
            timeout: Duration::from_secs(60),
        }
    }

    pub fn batch(mut self, batch: usize) -> Self {
        self.batch = batch;
        self
    }

    /// Extra attempts after a transport failure. Status errors are not retried.
    pub fn retries(mut self, retries: usize) -> Self {
        self.retries = retries;
        self
    }

    pub fn timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    pub fn fetch(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, CorpusError> {
        if self.batch == 0 {
            return Err(CorpusError::ZeroBatch);
        }
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .build()
            .into();

        let mut out: Vec<Vec<f64>> = Vec::with_capacity(texts.len());
        let mut dim = None;
        for chunk in texts.chunks(self.batch) {
            let vectors = self.post_batch(&agent, chunk)?;
            if vectors.len() != chunk.len() {
                return Err(CorpusError::Cardinality {
                    expected: chunk.len(),
                    got: vectors.len(),
                });
            }
            for v in vectors {
                let expected = *dim.get_or_insert(v.len());
                if v.len() != expected {
                    return Err(CorpusError::DimensionMismatch {
                        expected,
                        found: v.len(),
                    });
                }
                out.push(v);
            }
        }
        Ok(out)
    }

    fn post_batch(&self, agent: &ureq::Agent, chunk: &[String]) -> Result<Vec<Vec<f64>>, CorpusError> {
        let body = EmbedRequest { texts: chunk };
        let mut attempt = 0;
        loop {
            attempt += 1;
            match agent.post(&self.url).send_json(&body) {
                Ok(mut response) => {
                    let parsed: EmbedResponse = response
                        .body_mut()
                        .read_json()
                        .map_err(|e| CorpusError::BadResponse(e.to_string()))?;
                    return Ok(parsed.vectors);
                }
                Err(ureq::Error::StatusCode(status)) => {
                    return Err(CorpusError::Status { status });
                }
                Err(e) if attempt > self.retries => {
                    return Err(CorpusError::Transport {
                        attempts: attempt,
                        message: e.to_string(),
                    });
                }
                Err(e) => {
                    log::warn!("embedding request failed (attempt {attempt}): {e}");
                    std::thread::sleep(Duration::from_millis(50 * attempt as u64));
                }
            }
        }
    }
}

/// Embeds `texts` in batches of `batch`; output order matches input order.
pub fn fetch_embeddings(
    endpoint: &str,
    texts: &[String],
    batch: usize,
) -> Result<Vec<Vec<f64>>, CorpusError> {
    EmbeddingClient::new(endpoint).batch(batch).fetch(texts)
}
