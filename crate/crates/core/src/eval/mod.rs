//! Node classification and link prediction on learned embeddings.

mod labels;
mod link;
mod report;
mod svm;

pub use labels::{load_labels, split_labels, LabeledNodeSet};
pub use link::{
    cosine_similarity, link_prediction_accuracy, make_link_split, read_link_split, tune_threshold,
    write_link_split, LinkAccuracy, LinkEvalSplit, LinkPrediction, NodePair,
};
pub use report::{MetricReport, RunMetric};
pub use svm::{classification_accuracy, train_classifier, LinearOvr, SvmConfig};

use crate::embed::EmbeddingMatrix;
use crate::error::Result;
use crate::sampling::derive_seed;

/// Runs averaged by default, as in the reference protocol.
pub const DEFAULT_RUNS: usize = 5;

pub const NODE_TASK: &str = "node_classification";
pub const LINK_TASK: &str = "link_prediction";

/// Seed of evaluation run `run` under base seed `seed`.
pub fn run_seed(seed: u64, run: usize) -> u64 {
    derive_seed(seed, &[0xE7A1, run as u64])
}

/// Splits, trains, and scores `runs` times on fixed embeddings.
pub fn evaluate_node_classification(
    x: &EmbeddingMatrix,
    labels: &LabeledNodeSet,
    ratio: f64,
    runs: usize,
    seed: u64,
) -> Result<MetricReport> {
    let mut report = MetricReport::new(NODE_TASK);
    for run in 0..runs {
        let s = run_seed(seed, run);
        let (train, test) = split_labels(labels, ratio, s)?;
        let model = train_classifier(x, &train, &SvmConfig { seed: s, ..SvmConfig::default() })?;
        report.push(run, s, classification_accuracy(&model, x, &test)?);
    }
    Ok(report)
}
