use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::sampling::AliasTable;
use crate::walk::WalkCorpus;

/// Exponent applied to token counts for the negative-sampling distribution.
pub const UNIGRAM_POWER: f64 = 0.75;

/// Token vocabulary ordered by descending count, ties broken by name, so row
/// numbering depends only on the corpus content.
#[derive(Debug, Clone)]
pub struct Vocab {
    names: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
    noise: Vec<f64>,
    noise_table: AliasTable,
}

impl Vocab {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn row(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn count(&self, name: &str) -> Option<u64> {
        self.row(name).map(|r| self.counts[r])
    }

    /// Negative-sampling probabilities, proportional to `count^0.75`.
    pub fn noise_distribution(&self) -> &[f64] {
        &self.noise
    }

    pub(crate) fn noise_table(&self) -> &AliasTable {
        &self.noise_table
    }

    /// Rewrites corpus sequences as vocabulary rows, dropping filtered tokens.
    pub fn encode(&self, corpus: &WalkCorpus, names: &[String]) -> Vec<Vec<u32>> {
        let rows: Vec<Option<u32>> = names.iter().map(|n| self.row(n).map(|r| r as u32)).collect();
        corpus
            .sequences
            .iter()
            .map(|seq| seq.iter().filter_map(|&t| rows[t as usize]).collect())
            .collect()
    }
}

/// Counts tokens of `corpus` (named through `names`) and keeps those seen at
/// least `min_count` times.
pub fn build_vocab(corpus: &WalkCorpus, names: &[String], min_count: u64) -> Result<Vocab> {
    let mut counts = vec![0u64; names.len()];
    for seq in &corpus.sequences {
        for &t in seq {
            counts[t as usize] += 1;
        }
    }
    let mut kept: Vec<(u64, &str)> = counts
        .iter()
        .zip(names)
        .filter(|(&c, _)| c > 0 && c >= min_count)
        .map(|(&c, n)| (c, n.as_str()))
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyVocabulary { min_count });
    }
    kept.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));

    let weights: Vec<f64> = kept.iter().map(|&(c, _)| (c as f64).powf(UNIGRAM_POWER)).collect();
    let total: f64 = weights.iter().sum();
    let noise: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let noise_table = AliasTable::new(&weights).expect("positive counts");
    let names: Vec<String> = kept.iter().map(|&(_, n)| n.to_string()).collect();
    let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
    Ok(Vocab {
        names,
        counts: kept.iter().map(|&(c, _)| c).collect(),
        index,
        noise,
        noise_table,
    })
}
