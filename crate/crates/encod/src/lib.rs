//! Overlapping community detection by ensembling disjoint partitions.
//!
//! The pipeline: run several base disjoint partitioners over K seeded vertex
//! orderings, turn the resulting base communities into per-vertex probability
//! feature vectors, then search for an overlapping cover that maximizes the
//! likelihood of the observed edges under a membership-similarity model.
//! Companion modules score covers (ONMI, Omega, F-Score) and generate
//! planted benchmarks with known overlapping ground truth.

pub mod cover;
pub mod error;
pub mod features;
pub mod graph;
pub mod metrics;
pub mod optimizer;
pub mod partition;
pub mod synth;

pub use cover::{parse_cover, OverlapCover};
pub use error::{EncodError, Result};
pub use features::{
    extract_features, ingest_vertex_features, involvement, FeatureMatrix, FeatureMode,
    InvolvementKind,
};
pub use graph::{
    bfs_distances, clustering_coefficient, random_ordering, Graph, VertexOrdering, VertexSet,
};
pub use metrics::{evaluate, fscore, omega_index, onmi, MetricReport};
pub use optimizer::{
    edge_probability, log_likelihood, log_likelihood_from_features, manipulate,
    membership_similarity, run, run_traced, sim_vertex_community, similarity, update_thresholds,
    EncodConfig, RunTrace, SimilarityKind, SimilarityMatrix,
};
pub use partition::{
    build_ensemble, ingest_partition, modularity, partition, BaseAlgorithm, BaseEnsemble,
    DisjointPartition,
};
pub use synth::{
    cooccurrence_curve, curve_table, generate_planted, spearman, CurveBin, PlantedConfig,
};
