//! Browser demo: motif enumeration on a user-supplied graph, the second-order
//! walk law for chosen `(p, q)`, and a 2-D view of learned embeddings.

use motif2vec::embed::{train, TrainConfig};
use motif2vec::eval::evaluate_node_classification;
use motif2vec::graph::{GraphBuilder, NodeIx, WeightedGraphView};
use motif2vec::motif::{build_motif_adjacency, enumerate_instances, AdjacencyMode, MotifPattern};
use motif2vec::sampling::rng_from_seed;
use motif2vec::synthetic::{bibliographic, BibliographicConfig, COAUTHOR_MOTIF};
use motif2vec::walk::{aggregate_and_shuffle, generate_walks, WalkConfig, Walker, DEFAULT_ALIAS_BUDGET};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const DEFAULT_NODE_TYPE: &str = "N";

/// Splits `id:Type` into its parts; untyped ids get the default type.
fn typed_token(tok: &str) -> (&str, &str) {
    match tok.split_once(':') {
        Some((id, ty)) if !ty.is_empty() => (id, ty),
        _ => (tok, DEFAULT_NODE_TYPE),
    }
}

/// One arc per line as `src dst`, where either id may carry a `:Type` suffix.
pub fn motif_instances_json(edges: &str, motif: &str) -> Result<Value, String> {
    let mut b = GraphBuilder::new();
    let mut declared: Vec<(String, String)> = Vec::new();
    let mut arcs = Vec::new();
    for (i, line) in edges.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [src, dst] = toks.as_slice() else {
            return Err(format!("line {}: expected `src dst`", i + 1));
        };
        for tok in [src, dst] {
            let (id, ty) = typed_token(tok);
            match declared.iter().find(|(d, _)| d == id) {
                Some((_, t)) if t != ty && ty != DEFAULT_NODE_TYPE => {
                    return Err(format!("line {}: `{id}` typed both {t} and {ty}", i + 1))
                }
                Some(_) => {}
                None => declared.push((id.to_string(), ty.to_string())),
            }
        }
        arcs.push((typed_token(src).0.to_string(), typed_token(dst).0.to_string()));
    }
    for (id, ty) in &declared {
        b.add_node(id, ty).map_err(|e| e.to_string())?;
    }
    for (s, d) in &arcs {
        b.add_edge(s, d, "e").map_err(|e| e.to_string())?;
    }
    let (g, _) = b.build().map_err(|e| e.to_string())?;
    let m = MotifPattern::parse(motif).map_err(|e| e.to_string())?;
    let inst = enumerate_instances(&g, &m);
    let w = build_motif_adjacency(&g, &m, &inst, AdjacencyMode::Weighted).map_err(|e| e.to_string())?;
    let name = |u: NodeIx| g.node_name(u).to_string();
    Ok(json!({
        "motif": m.to_string(),
        "instances": inst.instances().iter()
            .map(|x| x.assignment().iter().map(|&u| name(u)).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "adjacency": w.entries().iter()
            .map(|&(a, b, c)| json!([name(a), name(b), c]))
            .collect::<Vec<_>>(),
    }))
}

/// Weighted undirected demo graph; the walk has just moved 0 -> 1.
fn demo_view() -> WeightedGraphView {
    WeightedGraphView::from_undirected(
        6,
        [(0, 1, 2.0), (1, 2, 1.0), (1, 3, 4.0), (0, 2, 1.0), (3, 4, 1.0), (1, 5, 3.0), (4, 5, 2.5)],
    )
    .expect("valid demo graph")
}

/// Analytic and sampled next-step probabilities from node 1 after arriving from 0.
pub fn transition_law_json(p: f64, q: f64, samples: u32, seed: u64) -> Result<Value, String> {
    if !(p > 0.0 && q > 0.0 && p.is_finite() && q.is_finite()) {
        return Err("p and q must be positive".into());
    }
    let view = demo_view();
    let walker = Walker::new(&view, p, q, DEFAULT_ALIAS_BUDGET);
    let (prev, cur) = (0, 1);
    let law = walker.transition_probabilities(Some(prev), cur);
    let mut counts = vec![0u32; view.num_nodes()];
    let mut rng = rng_from_seed(seed);
    for _ in 0..samples {
        if let Some(x) = walker.next_step(Some(prev), cur, &mut rng) {
            counts[x as usize] += 1;
        }
    }
    let rows: Vec<Value> = law
        .iter()
        .map(|&(x, prob)| {
            let relation = if x == prev {
                "return"
            } else if view.has_arc(prev, x) {
                "neighbour of previous"
            } else {
                "farther"
            };
            json!({
                "node": x,
                "weight": view.weight(cur, x),
                "relation": relation,
                "analytic": prob,
                "empirical": counts[x as usize] as f64 / samples.max(1) as f64,
            })
        })
        .collect();
    Ok(json!({ "previous": prev, "current": cur, "rows": rows }))
}

/// Top two principal components of the rows of `x` (`n` by `d`).
fn project_2d(x: &[f32], n: usize, d: usize) -> Vec<[f64; 2]> {
    let mut mean = vec![0.0f64; d];
    for row in x.chunks(d) {
        for (m, &v) in mean.iter_mut().zip(row) {
            *m += v as f64 / n as f64;
        }
    }
    let centred: Vec<Vec<f64>> = x
        .chunks(d)
        .map(|row| row.iter().zip(&mean).map(|(&v, m)| v as f64 - m).collect())
        .collect();
    let mut cov = vec![vec![0.0f64; d]; d];
    for r in &centred {
        for i in 0..d {
            for j in 0..d {
                cov[i][j] += r[i] * r[j];
            }
        }
    }
    let mut axes: Vec<Vec<f64>> = Vec::new();
    for k in 0..2 {
        let mut v: Vec<f64> = (0..d).map(|i| if i == k { 1.0 } else { 0.1 }).collect();
        for _ in 0..200 {
            let mut next: Vec<f64> = (0..d).map(|i| (0..d).map(|j| cov[i][j] * v[j]).sum()).collect();
            for a in &axes {
                let dot: f64 = next.iter().zip(a).map(|(x, y)| x * y).sum();
                next.iter_mut().zip(a).for_each(|(x, y)| *x -= dot * y);
            }
            let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            v = next.into_iter().map(|x| x / norm).collect();
        }
        axes.push(v);
    }
    centred
        .iter()
        .map(|r| {
            let c = |a: &[f64]| r.iter().zip(a).map(|(x, y)| x * y).sum::<f64>();
            [c(&axes[0]), c(&axes[1])]
        })
        .collect()
}

/// Embeds the two-community bibliographic graph with or without the
/// co-author motif and returns 2-D points plus classification accuracy.
pub fn community_embedding_json(with_motif: bool, seed: u64) -> Result<Value, String> {
    let (g, labels) = bibliographic(&BibliographicConfig { seed, ..BibliographicConfig::default() });
    let walk_cfg = WalkConfig { walks_per_node: 5, walk_length: 40, seed, ..WalkConfig::default() };
    let mut corpora = vec![generate_walks(&g.as_walk_view(), &walk_cfg).map_err(|e| e.to_string())?];
    if with_motif {
        let m = MotifPattern::parse(COAUTHOR_MOTIF).map_err(|e| e.to_string())?;
        let inst = enumerate_instances(&g, &m);
        let w = build_motif_adjacency(&g, &m, &inst, AdjacencyMode::Weighted).map_err(|e| e.to_string())?;
        let motif_cfg = WalkConfig { seed: seed ^ 1, ..walk_cfg };
        corpora.push(generate_walks(&w.to_view(), &motif_cfg).map_err(|e| e.to_string())?);
    }
    let corpus = aggregate_and_shuffle(corpora, seed);
    let train_cfg = TrainConfig { dim: 16, window: 5, seed, ..TrainConfig::default() };
    let x = train(&corpus, g.node_names(), &train_cfg).map_err(|e| e.to_string())?.embeddings;
    let accuracy = evaluate_node_classification(&x, &labels, 0.7, 5, seed).map_err(|e| e.to_string())?.mean();
    let community = |id: &str| labels.entries().iter().find(|(n, _)| n == id).map(|(_, c)| c.clone());
    let points: Vec<Value> = project_2d(x.data(), x.len(), x.dim())
        .into_iter()
        .zip(x.names())
        .map(|(p, id)| {
            let ix = g.node_index(id).expect("embedded node is in the graph");
            json!({ "id": id, "type": g.node_type_name(ix), "community": community(id), "x": p[0], "y": p[1] })
        })
        .collect();
    Ok(json!({ "accuracy": accuracy, "points": points }))
}

fn to_js(v: Result<Value, String>) -> Result<String, JsError> {
    v.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = motifInstances)]
pub fn motif_instances(edges: &str, motif: &str) -> Result<String, JsError> {
    to_js(motif_instances_json(edges, motif))
}

#[wasm_bindgen(js_name = transitionLaw)]
pub fn transition_law(p: f64, q: f64, samples: u32, seed: u32) -> Result<String, JsError> {
    to_js(transition_law_json(p, q, samples, seed as u64))
}

#[wasm_bindgen(js_name = communityEmbedding)]
pub fn community_embedding(with_motif: bool, seed: u32) -> Result<String, JsError> {
    to_js(community_embedding_json(with_motif, seed as u64))
}
