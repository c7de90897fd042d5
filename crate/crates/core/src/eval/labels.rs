use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::sampling::rng_from_seed;

/// Nodes with one class label each.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabeledNodeSet {
    entries: Vec<(String, String)>,
    classes: Vec<String>,
}

impl LabeledNodeSet {
    pub fn new(entries: Vec<(String, String)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (node, _) in &entries {
            if !seen.insert(node.as_str()) {
                return Err(Error::Eval(format!("node `{node}` labeled more than once")));
            }
        }
        let mut classes: Vec<String> = entries.iter().map(|(_, c)| c.clone()).collect();
        classes.sort();
        classes.dedup();
        Ok(LabeledNodeSet { entries, classes })
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// Sorted distinct class labels.
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Reads `node<TAB>class` rows.
pub fn load_labels(path: &Path) -> Result<LabeledNodeSet> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut entries = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split('\t').map(str::trim).collect::<Vec<_>>().as_slice() {
            [node, class] if !node.is_empty() && !class.is_empty() => {
                entries.push((node.to_string(), class.to_string()))
            }
            _ => return Err(Error::parse(path, i + 1, "expected `node<TAB>class`")),
        }
    }
    LabeledNodeSet::new(entries).map_err(|e| Error::parse(path, 0, e.to_string()))
}

/// Seeded stratified split: each class contributes `round(ratio * size)` nodes
/// to the training side. Classes with fewer than two members stay whole in
/// training.
pub fn split_labels(labels: &LabeledNodeSet, ratio: f64, seed: u64) -> Result<(LabeledNodeSet, LabeledNodeSet)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Eval(format!("split ratio {ratio} outside (0, 1)")));
    }
    let mut by_class: BTreeMap<&str, Vec<&(String, String)>> = BTreeMap::new();
    for e in &labels.entries {
        by_class.entry(e.1.as_str()).or_default().push(e);
    }
    let mut rng = rng_from_seed(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (class, mut members) in by_class {
        if members.len() < 2 {
            log::warn!("class `{class}` has {} member(s); kept in training only", members.len());
            train.extend(members.into_iter().cloned());
            continue;
        }
        members.shuffle(&mut rng);
        let n_train = (ratio * members.len() as f64).round() as usize;
        let n_train = n_train.clamp(1, members.len() - 1);
        let (a, b) = members.split_at(n_train);
        train.extend(a.iter().map(|e| (*e).clone()));
        test.extend(b.iter().map(|e| (*e).clone()));
    }
    Ok((LabeledNodeSet::new(train)?, LabeledNodeSet::new(test)?))
}
