//! Text-guided image clustering from pre-generated texts.
//!
//! Images are represented by texts an external captioning or VQA model
//! produced for them (or by externally computed embedding vectors). This
//! crate turns those texts into vectors, clusters them with restarted
//! K-Means, evaluates the clustering against ground-truth labels
//! (Hungarian-matched accuracy and NMI), picks among prompting strategies by
//! K-Means loss, and explains clusters with exclusive keywords.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases below fix the scalar to `f64`, which is what the experiment
//! pipeline uses.

pub mod cluster;
pub mod corpus;
pub mod explain;
pub mod hungarian;
pub mod matrix;
pub mod metrics;
pub mod pipeline;
pub mod scalar;
pub mod vectorize;

pub use cluster::{inertia_of, kmeans_once, kmeans_restarts, KMeans};
pub use corpus::{load_corpus, load_embeddings, Corpus, ImageRecord};
pub use metrics::{cluster_accuracy, confusion_matrix, contingency, nmi, ContingencyTable, MetricValue};
pub use scalar::Scalar;

/// Row-major dense matrix of `f64`.
pub type Matrix = matrix::DenseMatrix<f64>;
/// Row-major dense matrix of `f32`.
pub type Matrix32 = matrix::DenseMatrix<f32>;
/// Embedding matrix with `f64` entries.
pub type EmbeddingMatrix = corpus::EmbeddingMatrix<f64>;
/// Embedding matrix with `f32` entries.
pub type EmbeddingMatrix32 = corpus::EmbeddingMatrix<f32>;
/// TF-IDF matrix with `f64` weights.
pub type SparseMatrix = vectorize::SparseMatrix<f64>;
/// TF-IDF matrix with `f32` weights.
pub type SparseMatrix32 = vectorize::SparseMatrix<f32>;
/// Single K-Means run over `f64` data.
pub type ClusteringResult = cluster::ClusteringResult<f64>;
/// Single K-Means run over `f32` data.
pub type ClusteringResult32 = cluster::ClusteringResult<f32>;
/// Restart protocol summary over `f64` data.
pub type RestartSummary = cluster::RestartSummary<f64>;
/// Restart protocol summary over `f32` data.
pub type RestartSummary32 = cluster::RestartSummary<f32>;
