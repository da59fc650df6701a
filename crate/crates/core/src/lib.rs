//! Community-aware node embeddings.
//!
//! The pipeline: load or generate a graph, optionally reweight edges by the
//! dominant adjacency eigenvector so walks maximise path entropy, sample
//! biased random walks, train skip-gram negative-sampling vectors (optionally
//! weighting co-occurrence pairs by a seed partition), cluster the vectors,
//! and score the clustering against ground truth.
//!
//! Everything numeric is generic over [`scalar::Real`]; the `*64`/`*32`
//! aliases below pick concrete scalar types.

pub mod cluster;
pub mod community;
pub mod datasets;
pub mod embed;
pub mod graph;
pub mod lfr;
pub mod metrics;
pub mod scalar;
pub mod walk;

pub use graph::{Graph, GraphStats, GroundTruthCover, NodeId, Partition};
pub use scalar::Real;

pub type Graph64 = graph::Graph<f64>;
pub type Graph32 = graph::Graph<f32>;
pub type Embedding64 = embed::Embedding<f64>;
pub type Embedding32 = embed::Embedding<f32>;
pub type EigenPair64 = walk::EigenPair<f64>;
pub type EigenPair32 = walk::EigenPair<f32>;
