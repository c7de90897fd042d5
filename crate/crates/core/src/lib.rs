//! Heterogeneous network embedding through motif graphs.
//!
//! The pipeline turns a typed directed graph into one weighted co-occurrence
//! graph per motif, runs (p, q)-biased random walks over the original graph and
//! every motif graph, shuffles the walks together, and trains skip-gram
//! embeddings with negative sampling. The [`eval`] module scores embeddings on
//! node classification and link prediction.

pub mod embed;
pub mod error;
pub mod eval;
pub mod graph;
pub mod motif;
pub mod pipeline;
pub mod sampling;
pub mod synthetic;
pub mod walk;

pub use error::{Error, MotifSpecError, Result};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineOutput};
pub use graph::{load_graph, write_graph, Direction, GraphBuilder, HeteroGraph, NodeIx, WeightedGraphView};
