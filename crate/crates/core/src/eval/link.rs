use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::embed::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::graph::{HeteroGraph, NodeIx, TypedEdge};
use crate::sampling::rng_from_seed;

pub type NodePair = (String, String);

/// Held-out links and sampled non-links for one edge type.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinkEvalSplit {
    pub edge_type: String,
    pub seed: u64,
    pub train_edges: Vec<NodePair>,
    pub test_edges: Vec<NodePair>,
    pub fake_edges: Vec<NodePair>,
    /// Held-out training links used only to pick a threshold; empty unless requested.
    pub validation_edges: Vec<NodePair>,
    pub validation_fakes: Vec<NodePair>,
}

/// Multiplier on the number of fakes needed that bounds rejection sampling.
const MAX_REJECTIONS_PER_FAKE: usize = 1000;

/// Hides `1 - ratio` of the `edge_type` edges and samples as many absent,
/// type-consistent node pairs as fake links.
///
/// With `validation_fraction`, that share of the retained edges is held out as
/// well (with its own fakes) for threshold selection. The returned graph lacks
/// every held-out edge.
pub fn make_link_split(
    g: &HeteroGraph,
    edge_type: &str,
    ratio: f64,
    seed: u64,
    validation_fraction: Option<f64>,
) -> Result<(HeteroGraph, LinkEvalSplit)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Eval(format!("split ratio {ratio} outside (0, 1)")));
    }
    let et = g
        .edge_type_id(edge_type)
        .ok_or_else(|| Error::Eval(format!("edge type `{edge_type}` not in graph")))?;
    let mut target: Vec<TypedEdge> = g.edges().iter().filter(|e| e.edge_type == et).copied().collect();
    let mut rng = rng_from_seed(seed);
    target.shuffle(&mut rng);

    let n_train = ((ratio * target.len() as f64).round() as usize).min(target.len());
    let (train, test) = target.split_at(n_train);
    if test.is_empty() {
        return Err(Error::Eval(format!(
            "ratio {ratio} leaves no `{edge_type}` edges for testing ({} total)",
            target.len()
        )));
    }
    let n_val = match validation_fraction {
        Some(f) if f > 0.0 => ((f * train.len() as f64).round() as usize).clamp(1, train.len().saturating_sub(1)),
        _ => 0,
    };
    let (train, validation) = train.split_at(train.len() - n_val);

    // Fakes follow the (src type, dst type) signatures of the target edges.
    let mut signatures: BTreeMap<(u32, u32), ()> = BTreeMap::new();
    for e in &target {
        signatures.insert((g.node_type(e.src), g.node_type(e.dst)), ());
    }
    let pools: Vec<(Vec<NodeIx>, Vec<NodeIx>)> = signatures
        .keys()
        .map(|&(s, d)| (g.nodes_of_type(s), g.nodes_of_type(d)))
        .collect();
    let sizes: Vec<f64> = pools.iter().map(|(s, d)| (s.len() * d.len()) as f64).collect();
    let total: f64 = sizes.iter().sum();

    let needed = test.len() + validation.len();
    let mut chosen: HashSet<(NodeIx, NodeIx)> = HashSet::new();
    let mut fakes = Vec::with_capacity(needed);
    let mut attempts = 0usize;
    let max_attempts = MAX_REJECTIONS_PER_FAKE * needed + 10_000;
    while fakes.len() < needed {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::Eval(format!(
                "could not sample {needed} fake `{edge_type}` links after {max_attempts} attempts"
            )));
        }
        let mut pick = rng.gen::<f64>() * total;
        let mut which = pools.len() - 1;
        for (i, &s) in sizes.iter().enumerate() {
            if pick < s {
                which = i;
                break;
            }
            pick -= s;
        }
        let (srcs, dsts) = &pools[which];
        let u = srcs[rng.gen_range(0..srcs.len())];
        let v = dsts[rng.gen_range(0..dsts.len())];
        if u == v || g.has_arc(u, v) || !chosen.insert((u, v)) {
            continue;
        }
        fakes.push((u, v));
    }

    let names = |edges: &[(NodeIx, NodeIx)]| -> Vec<NodePair> {
        edges
            .iter()
            .map(|&(u, v)| (g.node_name(u).to_string(), g.node_name(v).to_string()))
            .collect()
    };
    let pairs = |edges: &[TypedEdge]| -> Vec<(NodeIx, NodeIx)> { edges.iter().map(|e| (e.src, e.dst)).collect() };
    let (test_fakes, val_fakes) = fakes.split_at(test.len());

    let removed: HashSet<TypedEdge> = test.iter().chain(validation).copied().collect();
    let pruned = g.without_edges(&removed);
    let split = LinkEvalSplit {
        edge_type: edge_type.to_string(),
        seed,
        train_edges: names(&pairs(train)),
        test_edges: names(&pairs(test)),
        fake_edges: names(test_fakes),
        validation_edges: names(&pairs(validation)),
        validation_fakes: names(val_fakes),
    };
    Ok((pruned, split))
}

/// Cosine of the angle between `u` and `v`; 0 when either is the zero vector.
pub fn cosine_similarity(u: &[f32], v: &[f32]) -> f64 {
    let (mut dot, mut nu, mut nv) = (0.0f64, 0.0f64, 0.0f64);
    for (&a, &b) in u.iter().zip(v) {
        let (a, b) = (a as f64, b as f64);
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        log::warn!("cosine similarity with a zero vector; scoring 0");
        return 0.0;
    }
    (dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkPrediction {
    pub src: String,
    pub dst: String,
    pub is_link: bool,
    pub score: f64,
    pub predicted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkAccuracy {
    pub accuracy: f64,
    pub predictions: Vec<LinkPrediction>,
    /// Pairs scored 0 because an endpoint has no embedding.
    pub unembedded: usize,
}

fn pair_score(x: &EmbeddingMatrix, (u, v): &NodePair) -> Option<f64> {
    Some(cosine_similarity(x.vector(u)?, x.vector(v)?))
}

fn score_pairs(x: &EmbeddingMatrix, truths: &[NodePair], fakes: &[NodePair]) -> (Vec<(NodePair, bool, f64)>, usize) {
    let mut missing = 0;
    let scored = truths
        .iter()
        .map(|p| (p, true))
        .chain(fakes.iter().map(|p| (p, false)))
        .map(|(p, truth)| {
            let s = pair_score(x, p).unwrap_or_else(|| {
                missing += 1;
                0.0
            });
            (p.clone(), truth, s)
        })
        .collect();
    if missing > 0 {
        log::warn!("{missing} evaluation pair(s) have an unembedded endpoint; scored 0");
    }
    (scored, missing)
}

/// Predicts a link when cosine similarity exceeds `threshold` and reports the
/// fraction of test and fake pairs classified correctly.
pub fn link_prediction_accuracy(x: &EmbeddingMatrix, split: &LinkEvalSplit, threshold: f64) -> Result<LinkAccuracy> {
    if split.test_edges.is_empty() && split.fake_edges.is_empty() {
        return Err(Error::Eval("link split has no test or fake pairs".into()));
    }
    let (scored, unembedded) = score_pairs(x, &split.test_edges, &split.fake_edges);
    let predictions: Vec<LinkPrediction> = scored
        .into_iter()
        .map(|((src, dst), is_link, score)| LinkPrediction {
            src,
            dst,
            is_link,
            score,
            predicted: score > threshold,
        })
        .collect();
    let correct = predictions.iter().filter(|p| p.predicted == p.is_link).count();
    Ok(LinkAccuracy {
        accuracy: correct as f64 / predictions.len() as f64,
        predictions,
        unembedded,
    })
}

/// Threshold maximizing accuracy on the validation pairs. Candidates are
/// midpoints between consecutive distinct scores plus one below the minimum;
/// ties go to the lowest threshold.
pub fn tune_threshold(x: &EmbeddingMatrix, split: &LinkEvalSplit) -> Result<f64> {
    if split.validation_edges.is_empty() {
        return Err(Error::Eval("split has no validation pairs for threshold tuning".into()));
    }
    let (scored, _) = score_pairs(x, &split.validation_edges, &split.validation_fakes);
    let mut scores: Vec<f64> = scored.iter().map(|s| s.2).collect();
    scores.sort_by(f64::total_cmp);
    scores.dedup();
    let mut candidates = vec![scores[0] - 1e-9];
    candidates.extend(scores.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    candidates.push(scores[scores.len() - 1]);
    let accuracy = |t: f64| scored.iter().filter(|(_, truth, s)| (*s > t) == *truth).count();
    let mut best = candidates[0];
    let mut best_acc = accuracy(best);
    for &t in &candidates[1..] {
        let a = accuracy(t);
        if a > best_acc {
            best = t;
            best_acc = a;
        }
    }
    Ok(best)
}

/// Writes the split as `kind<TAB>src<TAB>dst` rows after a `# edge_type` header.
pub fn write_link_split(split: &LinkEvalSplit, path: &Path) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(w, "# edge_type {} seed {}", split.edge_type, split.seed).map_err(io)?;
    for (kind, pairs) in [
        ("train", &split.train_edges),
        ("test", &split.test_edges),
        ("fake", &split.fake_edges),
        ("validation", &split.validation_edges),
        ("validation_fake", &split.validation_fakes),
    ] {
        for (u, v) in pairs {
            writeln!(w, "{kind}\t{u}\t{v}").map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

pub fn read_link_split(path: &Path) -> Result<LinkEvalSplit> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut split = LinkEvalSplit::default();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if let Some(rest) = line.strip_prefix("# edge_type ") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if let [t, "seed", s] = parts.as_slice() {
                split.edge_type = t.to_string();
                split.seed = s.parse().map_err(|_| Error::parse(path, i + 1, "bad seed"))?;
                continue;
            }
            return Err(Error::parse(path, i + 1, "bad split header"));
        }
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        let [kind, u, v] = f.as_slice() else {
            return Err(Error::parse(path, i + 1, "expected `kind<TAB>src<TAB>dst`"));
        };
        let pair = (u.to_string(), v.to_string());
        match *kind {
            "train" => split.train_edges.push(pair),
            "test" => split.test_edges.push(pair),
            "fake" => split.fake_edges.push(pair),
            "validation" => split.validation_edges.push(pair),
            "validation_fake" => split.validation_fakes.push(pair),
            other => return Err(Error::parse(path, i + 1, format!("unknown row kind `{other}`"))),
        }
    }
    Ok(split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    /// 10 users each rating a distinct restaurant, plus a tag edge.
    fn user_restaurant() -> HeteroGraph {
        let mut b = GraphBuilder::new();
        for i in 0..10 {
            b.add_node(&format!("u{i}"), "U").unwrap();
            b.add_node(&format!("r{i}"), "R").unwrap();
        }
        b.add_node("t", "T").unwrap();
        for i in 0..10 {
            b.add_edge(&format!("u{i}"), &format!("r{i}"), "rates").unwrap();
        }
        b.add_edge("r0", "t", "tagged").unwrap();
        b.build().unwrap().0
    }

    #[test]
    fn ten_edges_seventy_percent() {
        let g = user_restaurant();
        let (pruned, split) = make_link_split(&g, "rates", 0.7, 5, None).unwrap();
        assert_eq!(split.train_edges.len(), 7);
        assert_eq!(split.test_edges.len(), 3);
        assert_eq!(split.fake_edges.len(), 3);
        assert_eq!(pruned.num_edges(), g.num_edges() - 3);
        assert_eq!(pruned.num_nodes(), g.num_nodes());
        for (u, v) in &split.fake_edges {
            let (u, v) = (g.node_index(u).unwrap(), g.node_index(v).unwrap());
            assert!(!g.has_arc(u, v));
            assert_eq!(g.node_type_name(u), "U");
            assert_eq!(g.node_type_name(v), "R");
        }
        for (u, v) in &split.test_edges {
            let (u, v) = (g.node_index(u).unwrap(), g.node_index(v).unwrap());
            assert!(!pruned.has_arc(u, v));
        }
    }

    #[test]
    fn split_file_round_trip() {
        let g = user_restaurant();
        let (_, split) = make_link_split(&g, "rates", 0.7, 2, Some(0.2)).unwrap();
        assert_eq!(split.validation_edges.len(), 1);
        assert_eq!(split.validation_fakes.len(), 1);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("split.tsv");
        write_link_split(&split, &path).unwrap();
        assert_eq!(read_link_split(&path).unwrap(), split);
    }

    #[test]
    fn unknown_edge_type_and_bad_ratio() {
        let g = user_restaurant();
        assert!(make_link_split(&g, "likes", 0.7, 0, None).is_err());
        assert!(make_link_split(&g, "rates", 1.5, 0, None).is_err());
        // A single `tagged` edge cannot leave anything for testing at 0.7.
        assert!(make_link_split(&g, "tagged", 0.7, 0, None).is_err());
    }

    #[test]
    fn cosine_values() {
        assert!((cosine_similarity(&[1.0, 2.0], &[1.0, 2.0]) - 1.0).abs() < 1e-12);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 3.0]), 0.0);
        let c = cosine_similarity(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]);
        assert!((c - 32.0 / (14f64.sqrt() * 77f64.sqrt())).abs() < 1e-12);
        assert!((c - 0.974_631_846).abs() < 1e-9);
        assert_eq!(cosine_similarity(&[0.0, 0.0], &[1.0, 1.0]), 0.0);
    }

    fn pair(u: &str, v: &str) -> NodePair {
        (u.to_string(), v.to_string())
    }

    #[test]
    fn threshold_semantics() {
        // a.b = 0.9 style fixture: true pair parallel, fake pair orthogonal.
        let x = EmbeddingMatrix::from_rows(
            vec!["a".into(), "b".into(), "c".into()],
            2,
            vec![1.0, 0.0, 1.0, 0.1, 0.0, 1.0],
        )
        .unwrap();
        let split = LinkEvalSplit {
            test_edges: vec![pair("a", "b")],
            fake_edges: vec![pair("a", "c")],
            ..Default::default()
        };
        assert_eq!(link_prediction_accuracy(&x, &split, 0.5).unwrap().accuracy, 1.0);
        // Everything predicted a link below the lowest score.
        assert_eq!(link_prediction_accuracy(&x, &split, -1.0).unwrap().accuracy, 0.5);
        assert!(link_prediction_accuracy(&x, &LinkEvalSplit::default(), 0.5).is_err());
    }

    #[test]
    fn missing_endpoint_scores_zero() {
        let x = EmbeddingMatrix::from_rows(vec!["a".into()], 1, vec![1.0]).unwrap();
        let split = LinkEvalSplit {
            test_edges: vec![pair("a", "ghost")],
            fake_edges: vec![pair("ghost", "a")],
            ..Default::default()
        };
        let r = link_prediction_accuracy(&x, &split, 0.5).unwrap();
        assert_eq!(r.unembedded, 2);
        assert_eq!(r.accuracy, 0.5);
    }

    #[test]
    fn tuned_threshold_separates_validation() {
        let x = EmbeddingMatrix::from_rows(
            vec!["a".into(), "b".into(), "c".into()],
            2,
            vec![1.0, 0.0, 1.0, 0.2, 0.3, 1.0],
        )
        .unwrap();
        let split = LinkEvalSplit {
            validation_edges: vec![pair("a", "b")],
            validation_fakes: vec![pair("a", "c")],
            ..Default::default()
        };
        let t = tune_threshold(&x, &split).unwrap();
        let lo = cosine_similarity(&[1.0, 0.0], &[0.3, 1.0]);
        let hi = cosine_similarity(&[1.0, 0.0], &[1.0, 0.2]);
        assert!(t >= lo && t < hi, "{t} {lo} {hi}");
    }
}
