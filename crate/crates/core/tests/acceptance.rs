//! Acceptance suite: one pass/fail line per criterion, nonzero exit on any failure.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use motif2vec::embed::sgns_pair_loss_and_grad;
use motif2vec::eval::LabeledNodeSet;
use motif2vec::graph::{HeteroGraph, NodeIx, WeightedGraphView};
use motif2vec::motif::{build_motif_adjacency, enumerate_instances, AdjacencyMode, MotifPattern};
use motif2vec::pipeline::{Task, CONFIG_KEYS, EFFECTIVE_CONFIG_FILE, EMBEDDINGS_FILE, METRICS_FILE, TIMINGS_FILE};
use motif2vec::sampling::rng_from_seed;
use motif2vec::synthetic::{
    bibliographic, marketplace, BibliographicConfig, MarketplaceConfig, COAUTHOR_MOTIF, PURCHASE_MOTIF,
};
use motif2vec::walk::{Walker, DEFAULT_ALIAS_BUDGET};
use motif2vec::{run_pipeline, PipelineConfig};
use rand::Rng;
use tempfile::TempDir;

use common::{oracle_instances, oracle_pair_counts, random_motif, random_typed_digraph, toy_graph, write_fixture};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, elapsed: Duration) -> Result<(), String> {
    check(elapsed <= limit, || format!("took {elapsed:.1?}, limit {limit:?}"))
}

/// The seeded fixtures shared by criteria 1 and 3.
fn oracle_fixtures() -> Vec<(HeteroGraph, MotifPattern)> {
    let mut rng = rng_from_seed(0xACCE);
    (0..200)
        .map(|_| {
            let n = rng.gen_range(3..=10);
            let n_types = rng.gen_range(1..=3);
            let g = random_typed_digraph(&mut rng, n, 25, n_types);
            let k = if rng.gen_bool(0.5) { 3 } else { 4 };
            let planted = if rng.gen_bool(0.5) { common::induced_motif(&mut rng, &g, k) } else { None };
            let m = planted.unwrap_or_else(|| random_motif(&mut rng, k, n_types));
            (g, m)
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut total_instances = 0;
    for (i, (g, m)) in oracle_fixtures().iter().enumerate() {
        let oracle: BTreeSet<Vec<NodeIx>> = oracle_instances(g, m).into_keys().collect();
        let got = enumerate_instances(g, m);
        let sets: BTreeSet<Vec<NodeIx>> = got.instances().iter().map(|x| x.nodes().to_vec()).collect();
        check(sets.len() == got.frequency(), || format!("fixture {i}: duplicate instances"))?;
        check(sets == oracle, || format!("fixture {i} ({m}): got {sets:?}, oracle {oracle:?}"))?;
        check(got.frequency() == oracle.len(), || format!("fixture {i}: frequency mismatch"))?;
        total_instances += oracle.len();
    }
    within(Duration::from_secs(60), start.elapsed())?;
    Ok(format!("200 fixtures, {total_instances} instances, {:.2?}", start.elapsed()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let g = toy_graph();
    let m = MotifPattern::parse(common::FEED_FORWARD).map_err(|e| e.to_string())?;
    let inst = enumerate_instances(&g, &m);
    let named: BTreeSet<Vec<&str>> = inst
        .instances()
        .iter()
        .map(|x| {
            let mut v: Vec<&str> = x.nodes().iter().map(|&u| g.node_name(u)).collect();
            v.sort_unstable();
            v
        })
        .collect();
    let expected: BTreeSet<Vec<&str>> = [vec!["a", "b", "c"], vec!["a", "b", "e"]].into_iter().collect();
    check(named == expected, || format!("instances {named:?}"))?;
    check(!named.contains(&vec!["a", "b", "d"]), || "{a,b,d} present".into())?;
    let w = build_motif_adjacency(&g, &m, &inst, AdjacencyMode::Weighted).map_err(|e| e.to_string())?;
    let ix = |s: &str| g.node_index(s).unwrap();
    let got: Vec<u64> = [("a", "b"), ("a", "c"), ("b", "c"), ("a", "e"), ("b", "e"), ("a", "d"), ("b", "d")]
        .iter()
        .map(|&(u, v)| w.get(ix(u), ix(v)))
        .collect();
    check(got == [2, 1, 1, 1, 1, 0, 0], || format!("adjacency {got:?}"))?;
    within(Duration::from_secs(1), start.elapsed())?;
    Ok("instances {a,b,c} and {a,b,e}; W[a,b]=2".into())
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for (i, (g, m)) in oracle_fixtures().iter().enumerate() {
        let oracle = oracle_pair_counts(&oracle_instances(g, m));
        let inst = enumerate_instances(g, m);
        let w = build_motif_adjacency(g, m, &inst, AdjacencyMode::Weighted).map_err(|e| e.to_string())?;
        let n = g.num_nodes() as NodeIx;
        for u in 0..n {
            check(w.get(u, u) == 0, || format!("fixture {i}: diagonal at {u}"))?;
            for v in 0..n {
                check(w.get(u, v) == w.get(v, u), || format!("fixture {i}: asymmetric at ({u},{v})"))?;
                if u < v {
                    let expected = oracle.get(&(u, v)).copied().unwrap_or(0);
                    check(w.get(u, v) == expected, || {
                        format!("fixture {i}: W[{u},{v}] = {} but oracle {expected}", w.get(u, v))
                    })?;
                    checked += 1;
                }
            }
        }
    }
    within(Duration::from_secs(60), start.elapsed())?;
    Ok(format!("{checked} pairs match the oracle tally; symmetric, zero diagonal"))
}

/// Hand-built views for the transition law: one directed, one symmetric.
fn walk_views() -> Vec<(WeightedGraphView, Vec<(NodeIx, NodeIx)>)> {
    let directed = WeightedGraphView::from_arcs(
        6,
        [
            (0, 1, 1.0),
            (1, 0, 2.0),
            (1, 2, 0.5),
            (1, 3, 3.0),
            (1, 4, 1.5),
            (0, 2, 1.0),
            (4, 0, 1.0),
            (3, 5, 2.0),
            (5, 3, 1.0),
            (3, 1, 1.0),
            (2, 3, 1.0),
        ],
        false,
    )
    .unwrap();
    let symmetric = WeightedGraphView::from_undirected(
        6,
        [
            (0, 1, 2.0),
            (1, 2, 1.0),
            (1, 3, 4.0),
            (2, 3, 0.5),
            (3, 4, 1.0),
            (1, 5, 3.0),
            (4, 5, 2.5),
        ],
    )
    .unwrap();
    vec![(directed, vec![(0, 1), (4, 0), (3, 1)]), (symmetric, vec![(0, 1), (2, 3), (5, 1)])]
}

/// alpha * w over the out-neighbours of `cur`, computed from the definition.
fn analytic_law(view: &WeightedGraphView, prev: NodeIx, cur: NodeIx, p: f64, q: f64) -> BTreeMap<NodeIx, f64> {
    let (ns, ws) = view.neighbors(cur);
    let mut law: BTreeMap<NodeIx, f64> = BTreeMap::new();
    for (&x, &w) in ns.iter().zip(ws) {
        let alpha = if x == prev {
            1.0 / p
        } else if view.has_arc(prev, x) || view.has_arc(x, prev) {
            1.0
        } else {
            1.0 / q
        };
        law.insert(x, alpha * w);
    }
    let z: f64 = law.values().sum();
    law.values_mut().for_each(|v| *v /= z);
    law
}

fn criterion_4() -> Outcome {
    const SAMPLES: usize = 100_000;
    let start = Instant::now();
    let grid = [0.25, 1.0, 4.0];
    let mut states = 0;
    let mut worst = 0.0f64;
    let mut rng = rng_from_seed(0x4A1C);
    for (view, pairs) in walk_views() {
        for &p in &grid {
            for &q in &grid {
                // Both the precomputed tables and the on-the-fly fallback.
                for budget in [DEFAULT_ALIAS_BUDGET, 0] {
                    let walker = Walker::new(&view, p, q, budget);
                    for &(prev, cur) in &pairs {
                        let law = analytic_law(&view, prev, cur, p, q);
                        let mut counts: BTreeMap<NodeIx, usize> = BTreeMap::new();
                        for _ in 0..SAMPLES {
                            let x = walker.next_step(Some(prev), cur, &mut rng).ok_or("dead end")?;
                            *counts.entry(x).or_insert(0) += 1;
                        }
                        let keys: BTreeSet<NodeIx> = law.keys().chain(counts.keys()).copied().collect();
                        let l1: f64 = keys
                            .iter()
                            .map(|k| {
                                let emp = counts.get(k).copied().unwrap_or(0) as f64 / SAMPLES as f64;
                                (emp - law.get(k).copied().unwrap_or(0.0)).abs()
                            })
                            .sum();
                        worst = worst.max(l1);
                        check(l1 < 0.02, || format!("state ({prev},{cur}) p={p} q={q}: L1 {l1:.4}"))?;
                        states += 1;
                    }
                }
            }
        }
    }
    check(states >= 20, || format!("only {states} states"))?;
    within(Duration::from_secs(120), start.elapsed())?;
    Ok(format!("{states} states, worst L1 {worst:.4}"))
}

/// Loss written out independently of the library.
fn reference_loss(u: &[f64], v: &[f64], negs: &[Vec<f64>]) -> f64 {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let softplus = |x: f64| (1.0 + x.exp()).ln();
    softplus(-dot(u, v)) + negs.iter().map(|n| softplus(dot(u, n))).sum::<f64>()
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = rng_from_seed(0x5D1F);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let d = [2, 8, 32][case % 3];
        let k = rng.gen_range(1..=8);
        let mut vec_of = |scale: f64| -> Vec<f64> { (0..d).map(|_| rng.gen_range(-scale..scale)).collect() };
        let u = vec_of(1.0);
        let v = vec_of(1.0);
        let negs: Vec<Vec<f64>> = (0..k).map(|_| vec_of(1.0)).collect();
        let neg_refs: Vec<&[f64]> = negs.iter().map(Vec::as_slice).collect();
        let g = sgns_pair_loss_and_grad(&u, &v, &neg_refs);
        check((g.loss - reference_loss(&u, &v, &negs)).abs() < 1e-10, || format!("case {case}: loss"))?;

        // Flatten every parameter, perturb each one, compare.
        let mut params: Vec<Vec<f64>> = vec![u.clone(), v.clone()];
        params.extend(negs.iter().cloned());
        let analytic: Vec<f64> = g
            .center
            .iter()
            .chain(&g.context)
            .chain(g.negatives.iter().flatten())
            .copied()
            .collect();
        let mut numeric = Vec::with_capacity(analytic.len());
        for b in 0..params.len() {
            for i in 0..d {
                let orig = params[b][i];
                params[b][i] = orig + h;
                let plus = reference_loss(&params[0], &params[1], &params[2..]);
                params[b][i] = orig - h;
                let minus = reference_loss(&params[0], &params[1], &params[2..]);
                params[b][i] = orig;
                numeric.push((plus - minus) / (2.0 * h));
            }
        }
        let diff: f64 = analytic.iter().zip(&numeric).map(|(a, n)| (a - n).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = numeric.iter().map(|n| n * n).sum::<f64>().sqrt();
        let rel = diff / norm.max(1e-12);
        worst = worst.max(rel);
        check(rel < 1e-4, || format!("case {case} (d={d}, k={k}): relative error {rel:.2e}"))?;
    }
    within(Duration::from_secs(30), start.elapsed())?;
    Ok(format!("1000 cases, worst relative error {worst:.2e}"))
}

fn write_labels(labels: &LabeledNodeSet, path: &Path) {
    let text: String = labels.entries().iter().map(|(n, c)| format!("{n}\t{c}\n")).collect();
    fs::write(path, text).unwrap();
}

/// Config over a fixture written to `dir`, with `motifs` as motif files.
fn fixture_config(dir: &Path, g: &HeteroGraph, motifs: &[&str], out: &str) -> PipelineConfig {
    let (edges, nodes) = write_fixture(g, &dir.join("input"));
    let motif_paths = motifs
        .iter()
        .enumerate()
        .map(|(i, text)| common::write_text(&dir.join(format!("motif{i}.txt")), text))
        .collect();
    PipelineConfig {
        edges,
        nodes,
        motifs: motif_paths,
        out_dir: dir.join(out),
        ..PipelineConfig::default()
    }
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let tmp = TempDir::new().map_err(|e| e.to_string())?;
    let (g, labels) = bibliographic(&BibliographicConfig::default());
    let labels_path = tmp.path().join("labels.tsv");
    write_labels(&labels, &labels_path);
    let configure = |motifs: &[&str], out: &str, seed: u64| PipelineConfig {
        task: Task::Node,
        labels: Some(labels_path.clone()),
        seed,
        ..fixture_config(tmp.path(), &g, motifs, out)
    };
    // Five pipeline seeds; each evaluates five seeded splits shared by both variants.
    let (mut motif_means, mut base_means) = (Vec::new(), Vec::new());
    for seed in 0..5 {
        let m = run_pipeline(&configure(&[COAUTHOR_MOTIF], "motif", seed)).map_err(|e| e.to_string())?;
        let b = run_pipeline(&configure(&[], "baseline", seed)).map_err(|e| e.to_string())?;
        let (m, b) = (m.metrics.unwrap(), b.metrics.unwrap());
        let split_seeds = |r: &motif2vec::eval::MetricReport| r.runs.iter().map(|x| x.seed).collect::<Vec<_>>();
        check(split_seeds(&m) == split_seeds(&b) && m.runs.len() == 5, || "split seeds differ".into())?;
        motif_means.push(m.mean());
        base_means.push(b.mean());
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (m, b) = (mean(&motif_means), mean(&base_means));
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(", ");
    let summary = format!(
        "{} nodes, motif mean {m:.4} [{}] vs original-only mean {b:.4} [{}]",
        g.num_nodes(),
        fmt(&motif_means),
        fmt(&base_means)
    );
    check(m >= 0.90, || format!("{summary}: below 0.90"))?;
    check(m > b, || format!("{summary}: not above baseline"))?;
    within(Duration::from_secs(300), start.elapsed())?;
    Ok(format!("{summary}, {:.1?}", start.elapsed()))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let tmp = TempDir::new().map_err(|e| e.to_string())?;
    let g = marketplace(&MarketplaceConfig::default());
    let cfg = PipelineConfig {
        task: Task::Link,
        edge_type: Some("buys".into()),
        ratio: 0.7,
        ..fixture_config(tmp.path(), &g, &[PURCHASE_MOTIF], "out")
    };
    let out = run_pipeline(&cfg).map_err(|e| e.to_string())?;
    let report = out.metrics.unwrap();
    let per_run: Vec<String> = report.runs.iter().map(|r| format!("{:.3}", r.value)).collect();
    let summary = format!(
        "{} nodes, runs [{}], mean {:.4} (threshold {})",
        g.num_nodes(),
        per_run.join(", "),
        report.mean(),
        cfg.threshold
    );
    check(report.runs.len() == 5, || "expected 5 runs".into())?;
    check(report.mean() >= 0.70, || format!("{summary}: below 0.70"))?;
    within(Duration::from_secs(300), start.elapsed())?;
    Ok(format!("{summary}, {:.1?}", start.elapsed()))
}

fn criterion_8() -> Outcome {
    let tmp = TempDir::new().map_err(|e| e.to_string())?;
    let (g, labels) = bibliographic(&BibliographicConfig { seed: 8, ..BibliographicConfig::default() });
    let labels_path = tmp.path().join("labels.tsv");
    write_labels(&labels, &labels_path);
    let base = PipelineConfig {
        task: Task::Node,
        labels: Some(labels_path),
        seed: 42,
        workers: 1,
        ..fixture_config(tmp.path(), &g, &[COAUTHOR_MOTIF], "first")
    };
    let second = PipelineConfig { out_dir: tmp.path().join("second"), ..base.clone() };
    run_pipeline(&base).map_err(|e| e.to_string())?;
    run_pipeline(&second).map_err(|e| e.to_string())?;
    for file in [EMBEDDINGS_FILE, METRICS_FILE] {
        let a = fs::read(base.out_dir.join(file)).map_err(|e| e.to_string())?;
        let b = fs::read(second.out_dir.join(file)).map_err(|e| e.to_string())?;
        check(a == b, || format!("{file} differs between runs"))?;
    }
    Ok("embeddings.txt and metrics.tsv byte-identical".into())
}

fn criterion_9() -> Outcome {
    let tmp = TempDir::new().map_err(|e| e.to_string())?;
    let cfg = fixture_config(tmp.path(), &toy_graph(), &[], "out");
    run_pipeline(&cfg).map_err(|e| e.to_string())?;
    let text = fs::read_to_string(cfg.out_dir.join(EFFECTIVE_CONFIG_FILE)).map_err(|e| e.to_string())?;
    let pick = |key: &str| text.lines().find(|l| l.starts_with(&format!("{key} = "))).unwrap_or("").to_string();
    let got: Vec<String> = ["dim", "walk_length", "walks_per_node", "window", "p", "q", "epochs"]
        .iter()
        .map(|k| pick(k))
        .collect();
    let expected = [
        "dim = 128",
        "walk_length = 80",
        "walks_per_node = 10",
        "window = 10",
        "p = 1",
        "q = 1",
        "epochs = 1",
    ];
    check(got == expected, || format!("effective config lines {got:?}"))?;
    check(text.lines().count() == CONFIG_KEYS.len(), || "effective config has stray lines".into())?;
    let reparsed = PipelineConfig::parse(&text).map_err(|e| e.to_string())?;
    check(reparsed == cfg, || "effective config does not round-trip".into())?;
    Ok(expected.join(", "))
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let tmp = TempDir::new().map_err(|e| e.to_string())?;
    let (g, _) = bibliographic(&BibliographicConfig {
        authors: 4000,
        papers: 5000,
        venues: 1000,
        target_edges: Some(40_000),
        seed: 10,
        ..BibliographicConfig::default()
    });
    check(g.num_nodes() == 10_000 && g.num_edges() == 40_000, || {
        format!("fixture has {} nodes, {} edges", g.num_nodes(), g.num_edges())
    })?;
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let cfg = PipelineConfig { workers, ..fixture_config(tmp.path(), &g, &[COAUTHOR_MOTIF], "out") };
    let out = run_pipeline(&cfg).map_err(|e| e.to_string())?;
    let report = fs::read_to_string(cfg.out_dir.join(TIMINGS_FILE)).map_err(|e| e.to_string())?;
    let mut lines = report.lines();
    check(lines.next() == Some("stage\tseconds"), || "timing report header".into())?;
    let mut stages = BTreeMap::new();
    for line in lines {
        let (stage, secs) = line.split_once('\t').ok_or_else(|| format!("malformed row `{line}`"))?;
        let secs: f64 = secs.parse().map_err(|_| format!("malformed seconds `{line}`"))?;
        check(secs >= 0.0, || format!("negative time `{line}`"))?;
        stages.insert(stage.to_string(), secs);
    }
    for s in ["load", "enumerate", "adjacency", "walk", "train_setup", "train", "total"] {
        check(stages.contains_key(s), || format!("timing report lacks `{s}`"))?;
    }
    let t = &out.timings;
    let enum_walk = t.get("enumerate").unwrap() + t.get("walk").unwrap();
    let setup = t.get("train_setup").unwrap();
    check(enum_walk > setup, || format!("enumerate+walk {enum_walk:.2}s vs train setup {setup:.2}s"))?;
    within(Duration::from_secs(600), start.elapsed())?;
    let row = |s: &str| format!("{s} {:.2}s", t.get(s).unwrap());
    Ok(format!(
        "{workers} worker(s), total {:.1?}: {}",
        start.elapsed(),
        ["enumerate", "adjacency", "walk", "train_setup", "train"].map(row).join(", ")
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("motif enumeration matches the exhaustive oracle", criterion_1),
        ("toy feed-forward configuration", criterion_2),
        ("motif adjacency equals the oracle pair tally", criterion_3),
        ("walk transition law", criterion_4),
        ("skip-gram gradients match finite differences", criterion_5),
        ("synthetic node classification", criterion_6),
        ("synthetic link prediction", criterion_7),
        ("byte-identical reproducibility", criterion_8),
        ("default settings in the effective config", criterion_9),
        ("throughput and stage timing report", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = format!("criterion {}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|s| s == &(i + 1).to_string()) {
            continue;
        }
        match f() {
            Ok(detail) => println!("PASS {id}: {name} ({detail})"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id}: {name} ({why})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion/criteria failed");
        ExitCode::FAILURE
    }
}
