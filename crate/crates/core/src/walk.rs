//! Second-order (p, q)-biased random walks and the walk corpus.
//!
//! From previous node `t` at current node `v`, neighbour `x` is drawn with
//! probability proportional to `alpha(t, x) * w(v, x)`, where `alpha` is `1/p`
//! for a return to `t`, `1` when `x` is adjacent to `t` (an arc in either
//! direction), and `1/q` otherwise. The first step of a walk is plain
//! weight-proportional.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{NodeIx, WeightedGraphView};
use crate::sampling::{build_alias, derive_seed, rng_from_seed, sample_alias, sample_cumulative};

/// Default cap on precomputed second-order alias entries (summed over arcs).
pub const DEFAULT_ALIAS_BUDGET: usize = 8_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    pub walks_per_node: usize,
    /// Maximum walk length in nodes.
    pub walk_length: usize,
    pub p: f64,
    pub q: f64,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            walks_per_node: 10,
            walk_length: 80,
            p: 1.0,
            q: 1.0,
            seed: 0,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.walks_per_node < 1 {
            return Err(Error::Config("walks_per_node must be at least 1".into()));
        }
        if self.walk_length < 2 {
            return Err(Error::Config("walk_length must be at least 2".into()));
        }
        if !(self.p > 0.0 && self.p.is_finite()) || !(self.q > 0.0 && self.q.is_finite()) {
            return Err(Error::Config("p and q must be positive".into()));
        }
        Ok(())
    }
}

/// Walk sequences over dense node indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WalkCorpus {
    pub sequences: Vec<Vec<NodeIx>>,
    source: Option<String>,
}

impl WalkCorpus {
    pub fn new(sequences: Vec<Vec<NodeIx>>) -> Self {
        WalkCorpus {
            sequences,
            source: None,
        }
    }

    pub fn with_source(mut self, source: &str) -> Self {
        self.source = Some(source.to_string());
        self
    }

    /// Name of the view that produced these walks; cleared by shuffling.
    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn num_tokens(&self) -> usize {
        self.sequences.iter().map(Vec::len).sum()
    }
}

/// Precomputed second-order alias tables, one per arc `t -> v`, each over the
/// neighbours of `v`. Stored flat; `offsets[e]` indexes the table of arc `e`.
struct EdgeAlias {
    offsets: Vec<usize>,
    prob: Vec<f64>,
    alias: Vec<u32>,
}

/// Sampler for one view and one `(p, q)` setting.
pub struct Walker<'a> {
    view: &'a WeightedGraphView,
    p: f64,
    q: f64,
    node_offsets: Vec<usize>,
    node_prob: Vec<f64>,
    node_alias: Vec<u32>,
    edge_alias: Option<EdgeAlias>,
}

impl<'a> Walker<'a> {
    /// Prepares first-order tables for every node and, when `p` or `q` differs
    /// from 1 and the total table size fits `alias_budget`, second-order tables
    /// for every arc. Otherwise second-order steps are sampled on the fly.
    pub fn new(view: &'a WeightedGraphView, p: f64, q: f64, alias_budget: usize) -> Self {
        let n = view.num_nodes();
        let mut node_offsets = Vec::with_capacity(n + 1);
        node_offsets.push(0);
        let mut node_prob = vec![0.0; view.num_arcs()];
        let mut node_alias = vec![0u32; view.num_arcs()];
        for u in 0..n as NodeIx {
            let (_, ws) = view.neighbors(u);
            let a = *node_offsets.last().unwrap();
            let b = a + ws.len();
            build_alias(ws, &mut node_prob[a..b], &mut node_alias[a..b]);
            node_offsets.push(b);
        }
        let mut walker = Walker {
            view,
            p,
            q,
            node_offsets,
            node_prob,
            node_alias,
            edge_alias: None,
        };
        if !walker.first_order() {
            let total: usize = view.arcs().map(|(_, v, _)| view.degree(v)).sum();
            if total <= alias_budget {
                walker.edge_alias = Some(walker.build_edge_alias(total));
            } else {
                log::info!("second-order alias tables need {total} entries; sampling on the fly");
            }
        }
        walker
    }

    /// With `p = q = 1` every bias factor is 1 and the walk is first-order.
    fn first_order(&self) -> bool {
        self.p == 1.0 && self.q == 1.0
    }

    fn build_edge_alias(&self, total: usize) -> EdgeAlias {
        let mut offsets = Vec::with_capacity(self.view.num_arcs() + 1);
        offsets.push(0);
        let mut prob = vec![0.0; total];
        let mut alias = vec![0u32; total];
        let mut scratch = Vec::new();
        for (t, v, _) in self.view.arcs() {
            self.biased_weights(t, v, &mut scratch);
            let a = *offsets.last().unwrap();
            let b = a + scratch.len();
            build_alias(&scratch, &mut prob[a..b], &mut alias[a..b]);
            offsets.push(b);
        }
        EdgeAlias { offsets, prob, alias }
    }

    /// Unnormalized `alpha(t, x) * w(v, x)` over the neighbours of `v`.
    fn biased_weights(&self, t: NodeIx, v: NodeIx, out: &mut Vec<f64>) {
        out.clear();
        let (ns, ws) = self.view.neighbors(v);
        for (&x, &w) in ns.iter().zip(ws) {
            let alpha = if x == t {
                1.0 / self.p
            } else if self.view.has_arc(t, x) || self.view.has_arc(x, t) {
                1.0
            } else {
                1.0 / self.q
            };
            out.push(alpha * w);
        }
    }

    /// Normalized next-step distribution at `cur`, given the previous node.
    pub fn transition_probabilities(&self, prev: Option<NodeIx>, cur: NodeIx) -> Vec<(NodeIx, f64)> {
        let (ns, ws) = self.view.neighbors(cur);
        let mut scores = Vec::new();
        match prev {
            Some(t) => self.biased_weights(t, cur, &mut scores),
            None => scores.extend_from_slice(ws),
        }
        let total: f64 = scores.iter().sum();
        ns.iter().zip(scores).map(|(&x, s)| (x, s / total)).collect()
    }

    /// Draws the next node, or `None` at a dead end.
    pub fn next_step<R: Rng + ?Sized>(&self, prev: Option<NodeIx>, cur: NodeIx, rng: &mut R) -> Option<NodeIx> {
        let (ns, _) = self.view.neighbors(cur);
        if ns.is_empty() {
            return None;
        }
        let i = match prev {
            Some(t) if !self.first_order() => match &self.edge_alias {
                Some(ea) => {
                    let e = self
                        .view
                        .arc_position(t, cur)
                        .expect("previous step follows an arc of the view");
                    let (a, b) = (ea.offsets[e], ea.offsets[e + 1]);
                    sample_alias(&ea.prob[a..b], &ea.alias[a..b], rng)
                }
                None => {
                    let mut scores = Vec::with_capacity(ns.len());
                    self.biased_weights(t, cur, &mut scores);
                    sample_cumulative(&scores, rng)
                }
            },
            _ => {
                let (a, b) = (self.node_offsets[cur as usize], self.node_offsets[cur as usize + 1]);
                sample_alias(&self.node_prob[a..b], &self.node_alias[a..b], rng)
            }
        };
        Some(ns[i])
    }

    /// One walk of at most `length` nodes from `start`, truncated at dead ends.
    pub fn walk<R: Rng + ?Sized>(&self, start: NodeIx, length: usize, rng: &mut R) -> Vec<NodeIx> {
        let mut walk = Vec::with_capacity(length);
        walk.push(start);
        let mut prev = None;
        while walk.len() < length {
            let cur = *walk.last().unwrap();
            match self.next_step(prev, cur, rng) {
                Some(next) => {
                    prev = Some(cur);
                    walk.push(next);
                }
                None => break,
            }
        }
        walk
    }
}

/// `walks_per_node` walks from every node of `view`, ordered by walk round and
/// then by start node. Each walk draws from its own generator seeded by
/// `(seed, start, round)`, so the corpus does not depend on the thread count.
pub fn generate_walks(view: &WeightedGraphView, cfg: &WalkConfig) -> Result<WalkCorpus> {
    generate_walks_with_budget(view, cfg, DEFAULT_ALIAS_BUDGET)
}

pub fn generate_walks_with_budget(view: &WeightedGraphView, cfg: &WalkConfig, alias_budget: usize) -> Result<WalkCorpus> {
    cfg.validate()?;
    let walker = Walker::new(view, cfg.p, cfg.q, alias_budget);
    let n = view.num_nodes();
    let one = |job: usize| {
        let (round, start) = (job / n, (job % n) as NodeIx);
        let mut rng = rng_from_seed(derive_seed(cfg.seed, &[start as u64, round as u64]));
        walker.walk(start, cfg.walk_length, &mut rng)
    };
    let jobs = cfg.walks_per_node * n;
    #[cfg(feature = "parallel")]
    let sequences = (0..jobs).into_par_iter().map(one).collect();
    #[cfg(not(feature = "parallel"))]
    let sequences = (0..jobs).map(one).collect();
    Ok(WalkCorpus::new(sequences))
}

/// Concatenates corpora and applies a seeded uniform permutation.
pub fn aggregate_and_shuffle(corpora: Vec<WalkCorpus>, seed: u64) -> WalkCorpus {
    let mut sequences: Vec<Vec<NodeIx>> = corpora.into_iter().flat_map(|c| c.sequences).collect();
    sequences.shuffle(&mut rng_from_seed(seed));
    WalkCorpus::new(sequences)
}

/// Writes one walk per line as space-separated node names.
pub fn write_corpus(corpus: &WalkCorpus, names: &[String], path: &Path) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    for walk in &corpus.sequences {
        for (i, &u) in walk.iter().enumerate() {
            if i > 0 {
                w.write_all(b" ").map_err(io)?;
            }
            w.write_all(names[u as usize].as_bytes()).map_err(io)?;
        }
        w.write_all(b"\n").map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Reads a text corpus. Tokens are numbered in order of first appearance; the
/// returned names map those numbers back to tokens.
pub fn read_corpus(path: &Path) -> Result<(WalkCorpus, Vec<String>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, NodeIx> = HashMap::new();
    let mut sequences = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let walk: Vec<NodeIx> = line
            .split_whitespace()
            .map(|tok| {
                *index.entry(tok.to_string()).or_insert_with(|| {
                    names.push(tok.to_string());
                    (names.len() - 1) as NodeIx
                })
            })
            .collect();
        if !walk.is_empty() {
            sequences.push(walk);
        }
    }
    Ok((WalkCorpus::new(sequences), names))
}
