mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use motif2vec::pipeline::{
    eval_node_stage, train_stage, transform_stage, walk_stage, Task, WalkSource, CORPUS_FILE, EFFECTIVE_CONFIG_FILE,
    EMBEDDINGS_FILE, TIMINGS_FILE,
};
use motif2vec::synthetic::{bibliographic, BibliographicConfig, COAUTHOR_MOTIF};
use motif2vec::{run_pipeline, Error, PipelineConfig};
use tempfile::TempDir;

/// Roughly 50 typed nodes with community labels, written to `dir`.
fn small_fixture(dir: &Path) -> PipelineConfig {
    let (g, labels) = bibliographic(&BibliographicConfig {
        authors: 20,
        papers: 24,
        venues: 6,
        ..BibliographicConfig::default()
    });
    assert_eq!(g.num_nodes(), 50);
    let (edges, nodes) = common::write_fixture(&g, &dir.join("input"));
    let labels_text: String = labels.entries().iter().map(|(n, c)| format!("{n}\t{c}\n")).collect();
    let labels = common::write_text(&dir.join("labels.tsv"), &labels_text);
    let motif = common::write_text(&dir.join("coauthor.motif"), COAUTHOR_MOTIF);
    PipelineConfig {
        edges,
        nodes,
        motifs: vec![motif],
        labels: Some(labels),
        dim: 16,
        walks_per_node: 4,
        walk_length: 20,
        window: 4,
        out_dir: dir.join("out"),
        ..PipelineConfig::default()
    }
}

fn listing(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    v.sort();
    v
}

fn multiset(text: &str) -> BTreeMap<&str, usize> {
    let mut m = BTreeMap::new();
    for line in text.lines() {
        *m.entry(line).or_insert(0) += 1;
    }
    m
}

#[test]
fn one_motif_artifact_inventory() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_fixture(tmp.path());
    let out = run_pipeline(&cfg).unwrap();
    assert!(out.metrics.is_none());
    assert_eq!(
        listing(&cfg.out_dir),
        [
            "adjacency_coauthor.tsv",
            "corpus.txt",
            "effective_config.txt",
            "embeddings.txt",
            "instances_coauthor.tsv",
            "timings.tsv"
        ]
    );
}

#[test]
fn zero_motifs_walk_the_original_view_only() {
    let tmp = TempDir::new().unwrap();
    let cfg = PipelineConfig { motifs: vec![], ..small_fixture(tmp.path()) };
    run_pipeline(&cfg).unwrap();
    let corpus = fs::read_to_string(cfg.out_dir.join(CORPUS_FILE)).unwrap();
    assert_eq!(corpus.lines().count(), cfg.walks_per_node * 50);
}

#[test]
fn stages_compose_to_the_pipeline_output() {
    let tmp = TempDir::new().unwrap();
    let whole = PipelineConfig { seed: 5, ..small_fixture(tmp.path()) };
    run_pipeline(&whole).unwrap();
    let staged = PipelineConfig { out_dir: tmp.path().join("staged"), ..whole.clone() };
    transform_stage(&staged).unwrap();
    walk_stage(&staged, WalkSource::All).unwrap();
    train_stage(&staged).unwrap();
    for file in ["instances_coauthor.tsv", "adjacency_coauthor.tsv", CORPUS_FILE, EMBEDDINGS_FILE] {
        assert_eq!(
            fs::read(whole.out_dir.join(file)).unwrap(),
            fs::read(staged.out_dir.join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn original_source_reproduces_the_zero_motif_corpus() {
    let tmp = TempDir::new().unwrap();
    let with_motif = small_fixture(tmp.path());
    let baseline = PipelineConfig { motifs: vec![], out_dir: tmp.path().join("baseline"), ..with_motif.clone() };
    run_pipeline(&baseline).unwrap();
    walk_stage(&with_motif, WalkSource::Original).unwrap();
    let a = fs::read_to_string(baseline.out_dir.join(CORPUS_FILE)).unwrap();
    let b = fs::read_to_string(with_motif.out_dir.join(CORPUS_FILE)).unwrap();
    assert_eq!(multiset(&a), multiset(&b));
}

#[test]
fn missing_upstream_artifacts_name_the_path() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_fixture(tmp.path());
    let err = walk_stage(&cfg, WalkSource::All).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("adjacency_coauthor.tsv"), "{msg}");
    let err = train_stage(&cfg).unwrap_err().to_string();
    assert!(err.contains(CORPUS_FILE), "{err}");
}

#[test]
fn stage_errors_carry_the_stage_name() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_fixture(tmp.path());
    fs::write(&cfg.motifs[0], "nodes: 1:A 2:P\nedges: 1->1").unwrap();
    let err = run_pipeline(&cfg).unwrap_err();
    assert!(matches!(&err, Error::Stage { stage, .. } if stage == "load"), "{err}");
    assert!(err.to_string().starts_with("[stage load]"), "{err}");

    let cfg = PipelineConfig { walk_length: 1, ..small_fixture(tmp.path()) };
    assert!(run_pipeline(&cfg).unwrap_err().to_string().starts_with("[stage config]"));
    let cfg = PipelineConfig { nodes: tmp.path().join("absent.tsv"), ..small_fixture(tmp.path()) };
    assert!(run_pipeline(&cfg).unwrap_err().to_string().contains("absent.tsv"));
}

#[test]
fn rerunning_from_the_effective_config_changes_nothing() {
    let tmp = TempDir::new().unwrap();
    let cfg = PipelineConfig { task: Task::Node, ..small_fixture(tmp.path()) };
    run_pipeline(&cfg).unwrap();
    let effective = cfg.out_dir.join(EFFECTIVE_CONFIG_FILE);
    let reloaded = PipelineConfig::from_file(&effective).unwrap();
    assert_eq!(reloaded, cfg);
    let before = fs::read(cfg.out_dir.join(EMBEDDINGS_FILE)).unwrap();
    let before_cfg = fs::read(&effective).unwrap();
    run_pipeline(&reloaded).unwrap();
    assert_eq!(fs::read(cfg.out_dir.join(EMBEDDINGS_FILE)).unwrap(), before);
    assert_eq!(fs::read(&effective).unwrap(), before_cfg);
}

#[test]
fn eval_node_reads_external_word2vec_files() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_fixture(tmp.path());
    // Hand-written vectors: community c0 near (1, 0), c1 near (-1, 0).
    let labels = fs::read_to_string(cfg.labels.as_ref().unwrap()).unwrap();
    let mut rows = Vec::new();
    for (i, line) in labels.lines().enumerate() {
        let (node, class) = line.split_once('\t').unwrap();
        let x = if class == "c0" { 1.0 } else { -1.0 };
        rows.push(format!("{node} {x} {}", (i % 7) as f64 * 0.01));
    }
    let file = common::write_text(
        &tmp.path().join("external.vec"),
        &format!("{} 2\n{}\n", rows.len(), rows.join("\n")),
    );
    let eval = PipelineConfig { embeddings: Some(file), ..cfg };
    let report = eval_node_stage(&eval).unwrap();
    assert_eq!(report.runs.len(), 5);
    assert_eq!(report.mean(), 1.0);
    assert!(eval.out_dir.join("metrics.tsv").is_file());
}

#[test]
fn timing_report_lists_every_stage() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_fixture(tmp.path());
    run_pipeline(&cfg).unwrap();
    let report = fs::read_to_string(cfg.out_dir.join(TIMINGS_FILE)).unwrap();
    let stages: Vec<&str> = report.lines().skip(1).map(|l| l.split('\t').next().unwrap()).collect();
    for s in ["load", "enumerate", "adjacency", "walk", "train_setup", "train", "total"] {
        assert!(stages.contains(&s), "{s} missing from {report}");
    }
}
