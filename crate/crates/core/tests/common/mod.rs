#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use motif2vec::graph::{GraphBuilder, HeteroGraph, NodeIx};
use motif2vec::motif::{MotifPattern, SlotType};
use rand::Rng;

pub const TYPES: [&str; 3] = ["A", "B", "C"];

/// Random typed digraph with nodes `n0..`, at most `max_edges` distinct arcs,
/// and no self-loops. Every node gets a type.
pub fn random_typed_digraph<R: Rng>(rng: &mut R, n: usize, max_edges: usize, n_types: usize) -> HeteroGraph {
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.add_node(&format!("n{i}"), TYPES[rng.gen_range(0..n_types)]).unwrap();
    }
    let target = rng.gen_range(0..=max_edges);
    for _ in 0..target {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            let et = if rng.gen_bool(0.5) { "x" } else { "y" };
            b.add_edge(&format!("n{u}"), &format!("n{v}"), et).unwrap();
        }
    }
    b.build().unwrap().0
}

/// Random connected pattern on `k` slots: a random spanning tree with random
/// orientations, some extra arcs, and a mix of wildcard and typed slots.
pub fn random_motif<R: Rng>(rng: &mut R, k: usize, n_types: usize) -> MotifPattern {
    let mut edges: BTreeSet<(u32, u32)> = BTreeSet::new();
    for v in 1..k as u32 {
        let u = rng.gen_range(0..v);
        edges.insert(if rng.gen_bool(0.5) { (u + 1, v + 1) } else { (v + 1, u + 1) });
    }
    for _ in 0..rng.gen_range(0..=k) {
        let u = rng.gen_range(1..=k as u32);
        let v = rng.gen_range(1..=k as u32);
        if u != v {
            edges.insert((u, v));
        }
    }
    let slots = (1..=k as u32)
        .map(|id| {
            let ty = if rng.gen_bool(0.4) {
                SlotType::Any
            } else {
                SlotType::Label(TYPES[rng.gen_range(0..n_types)].to_string())
            };
            (id, ty)
        })
        .collect();
    MotifPattern::new("m", slots, edges.into_iter().collect()).unwrap()
}

/// Pattern copied from the subgraph induced by `k` connected nodes of `g`, so
/// it has at least one instance. `None` when no connected `k`-set was found.
pub fn induced_motif<R: Rng>(rng: &mut R, g: &HeteroGraph, k: usize) -> Option<MotifPattern> {
    let n = g.num_nodes() as NodeIx;
    for _ in 0..20 {
        let mut set = vec![rng.gen_range(0..n)];
        while set.len() < k {
            let frontier: BTreeSet<NodeIx> = set
                .iter()
                .flat_map(|&u| g.out_neighbors(u).iter().chain(g.in_neighbors(u)).copied())
                .filter(|v| !set.contains(v))
                .collect();
            if frontier.is_empty() {
                break;
            }
            let pick = rng.gen_range(0..frontier.len());
            set.push(*frontier.iter().nth(pick).unwrap());
        }
        if set.len() < k {
            continue;
        }
        let slots = set
            .iter()
            .enumerate()
            .map(|(i, &u)| {
                let ty = if rng.gen_bool(0.6) {
                    SlotType::Label(g.node_type_name(u).to_string())
                } else {
                    SlotType::Any
                };
                (i as u32 + 1, ty)
            })
            .collect();
        let mut edges = Vec::new();
        for (i, &u) in set.iter().enumerate() {
            for (j, &v) in set.iter().enumerate() {
                if i != j && g.has_arc(u, v) {
                    edges.push((i as u32 + 1, j as u32 + 1));
                }
            }
        }
        return Some(MotifPattern::new("m", slots, edges).unwrap());
    }
    None
}

fn slot_accepts(m: &MotifPattern, slot: usize, g: &HeteroGraph, u: NodeIx) -> bool {
    match m.slot_type(slot) {
        SlotType::Any => true,
        SlotType::Label(l) => g.node_type_name(u) == l,
    }
}

/// Exhaustive oracle: every injective, type-consistent assignment of slots to
/// nodes, kept when the induced arcs equal the pattern's arcs exactly. Returns
/// each distinct node set with the number of assignments producing it.
pub fn oracle_instances(g: &HeteroGraph, m: &MotifPattern) -> BTreeMap<Vec<NodeIx>, usize> {
    fn rec(g: &HeteroGraph, m: &MotifPattern, assign: &mut Vec<NodeIx>, out: &mut BTreeMap<Vec<NodeIx>, usize>) {
        let k = m.k();
        if assign.len() == k {
            for i in 0..k {
                for j in 0..k {
                    if i != j && g.has_arc(assign[i], assign[j]) != m.has_edge(i, j) {
                        return;
                    }
                }
            }
            let mut key = assign.clone();
            key.sort_unstable();
            *out.entry(key).or_insert(0) += 1;
            return;
        }
        let slot = assign.len();
        for u in 0..g.num_nodes() as NodeIx {
            if !assign.contains(&u) && slot_accepts(m, slot, g, u) {
                assign.push(u);
                rec(g, m, assign, out);
                assign.pop();
            }
        }
    }
    let mut out = BTreeMap::new();
    rec(g, m, &mut Vec::with_capacity(m.k()), &mut out);
    out
}

/// Pair tally over oracle node sets: unordered pair -> number of sets containing both.
pub fn oracle_pair_counts(sets: &BTreeMap<Vec<NodeIx>, usize>) -> BTreeMap<(NodeIx, NodeIx), u64> {
    let mut w = BTreeMap::new();
    for nodes in sets.keys() {
        for (a, &i) in nodes.iter().enumerate() {
            for &j in &nodes[a + 1..] {
                *w.entry((i, j)).or_insert(0) += 1;
            }
        }
    }
    w
}

/// The feed-forward toy graph: instances {a,b,c} and {a,b,e}; {a,b,d} is
/// spoiled by the extra arc d -> a.
pub fn toy_graph() -> HeteroGraph {
    let mut b = GraphBuilder::new();
    for id in ["a", "b", "c", "d", "e"] {
        b.add_node(id, "N").unwrap();
    }
    for (u, v) in [("a", "b"), ("a", "c"), ("b", "c"), ("a", "e"), ("b", "e"), ("a", "d"), ("b", "d"), ("d", "a")] {
        b.add_edge(u, v, "r").unwrap();
    }
    b.build().unwrap().0
}

pub const FEED_FORWARD: &str = "name: ffl\nnodes: 1:* 2:* 3:*\nedges: 1->2 1->3 2->3\n";

/// Writes `g` into `dir` and returns (edge file, node file).
pub fn write_fixture(g: &HeteroGraph, dir: &Path) -> (PathBuf, PathBuf) {
    fs::create_dir_all(dir).unwrap();
    let e = dir.join("edges.tsv");
    let n = dir.join("nodes.tsv");
    motif2vec::write_graph(g, &e, &n).unwrap();
    (e, n)
}

pub fn write_text(path: &Path, text: &str) -> PathBuf {
    fs::write(path, text).unwrap();
    path.to_path_buf()
}

/// Chi-square statistic of observed counts against equal expected counts.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

/// Upper critical value of chi-square with `df` degrees of freedom at
/// significance 0.001 (Wilson-Hilferty approximation).
pub fn chi_square_critical_001(df: usize) -> f64 {
    let k = df as f64;
    let z = 3.090_232; // one-sided 0.999 normal quantile
    let t = 1.0 - 2.0 / (9.0 * k) + z * (2.0 / (9.0 * k)).sqrt();
    k * t * t * t
}
