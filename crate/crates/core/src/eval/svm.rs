use rand::seq::SliceRandom;

use super::labels::LabeledNodeSet;
use crate::embed::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::sampling::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig {
    /// Hinge-loss weight against the L2 penalty.
    pub c: f64,
    /// Passes over the training set per binary problem.
    pub passes: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 1.0,
            passes: 100,
            seed: 0,
        }
    }
}

/// One-vs-rest linear classifier. Each weight vector carries the bias as its
/// last component.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOvr {
    classes: Vec<String>,
    weights: Vec<Vec<f64>>,
}

impl LinearOvr {
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn scores(&self, x: &[f32]) -> Vec<f64> {
        self.weights
            .iter()
            .map(|w| {
                let d = x.len();
                w[..d].iter().zip(x).map(|(a, &b)| a * b as f64).sum::<f64>() + w[d]
            })
            .collect()
    }

    /// Highest-scoring class; ties go to the earliest class in sorted order.
    pub fn predict(&self, x: &[f32]) -> &str {
        let scores = self.scores(x);
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = i;
            }
        }
        &self.classes[best]
    }
}

/// Embedding rows for every labeled node, or an error listing those missing.
pub(crate) fn gather(x: &EmbeddingMatrix, labels: &LabeledNodeSet) -> Result<Vec<usize>> {
    let mut rows = Vec::with_capacity(labels.len());
    let mut missing = Vec::new();
    for (node, _) in labels.entries() {
        match x.row_of(node) {
            Some(r) => rows.push(r),
            None => missing.push(node.as_str()),
        }
    }
    if !missing.is_empty() {
        let shown: Vec<&str> = missing.iter().take(20).copied().collect();
        return Err(Error::Eval(format!(
            "{} labeled node(s) have no embedding: {}{}",
            missing.len(),
            shown.join(", "),
            if missing.len() > shown.len() { ", ..." } else { "" }
        )));
    }
    Ok(rows)
}

/// Trains one hinge-loss, L2-regularized binary classifier per class with the
/// Pegasos stochastic subgradient method, `lambda = 1 / (C n)`.
pub fn train_classifier(x: &EmbeddingMatrix, train: &LabeledNodeSet, cfg: &SvmConfig) -> Result<LinearOvr> {
    if train.classes().len() < 2 {
        return Err(Error::Eval(format!(
            "classification needs at least 2 classes, found {}",
            train.classes().len()
        )));
    }
    let rows = gather(x, train)?;
    let d = x.dim();
    let n = rows.len();
    let features: Vec<Vec<f64>> = rows
        .iter()
        .map(|&r| x.row(r).iter().map(|&v| v as f64).chain(std::iter::once(1.0)).collect())
        .collect();
    let lambda = 1.0 / (cfg.c * n as f64);

    let weights = train
        .classes()
        .iter()
        .enumerate()
        .map(|(ci, class)| {
            let y: Vec<f64> = train
                .entries()
                .iter()
                .map(|(_, c)| if c == class { 1.0 } else { -1.0 })
                .collect();
            let mut w = vec![0.0f64; d + 1];
            let mut order: Vec<usize> = (0..n).collect();
            let mut rng = rng_from_seed(derive_seed(cfg.seed, &[ci as u64]));
            let mut t = 0usize;
            for _ in 0..cfg.passes {
                order.shuffle(&mut rng);
                for &i in &order {
                    t += 1;
                    let eta = 1.0 / (lambda * t as f64);
                    let margin = y[i] * w.iter().zip(&features[i]).map(|(a, b)| a * b).sum::<f64>();
                    let shrink = 1.0 - eta * lambda;
                    w.iter_mut().for_each(|wj| *wj *= shrink);
                    if margin < 1.0 {
                        for (wj, xj) in w.iter_mut().zip(&features[i]) {
                            *wj += eta * y[i] * xj;
                        }
                    }
                }
            }
            w
        })
        .collect();

    Ok(LinearOvr {
        classes: train.classes().to_vec(),
        weights,
    })
}

/// Fraction of test nodes whose predicted class equals their label.
pub fn classification_accuracy(model: &LinearOvr, x: &EmbeddingMatrix, test: &LabeledNodeSet) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::Eval("empty test set".into()));
    }
    let rows = gather(x, test)?;
    let correct = rows
        .iter()
        .zip(test.entries())
        .filter(|(&r, (_, label))| model.predict(x.row(r)) == label)
        .count();
    Ok(correct as f64 / test.len() as f64)
}
