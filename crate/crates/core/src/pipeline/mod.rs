//! End-to-end orchestration: load, enumerate, build motif graphs, walk,
//! shuffle, train, and optionally evaluate, persisting every intermediate
//! artifact. Each stage is also callable on its own over the persisted files.

mod config;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

pub use config::{PipelineConfig, Task, CONFIG_KEYS};

use crate::embed::{build_vocab, load_embeddings, save_embeddings, train_encoded, EmbeddingMatrix, TrainOutput};
use crate::error::{Error, Result};
use crate::eval::{
    evaluate_node_classification, link_prediction_accuracy, load_labels, make_link_split, read_link_split,
    run_seed, tune_threshold, write_link_split, LinkEvalSplit, MetricReport, LINK_TASK,
};
use crate::graph::{load_graph, write_graph, HeteroGraph, WeightedGraphView};
use crate::motif::{
    build_motif_adjacency, enumerate_instances, read_adjacency, write_adjacency, write_instances, MotifAdjacency,
    MotifPattern,
};
use crate::sampling::derive_seed;
use crate::walk::{aggregate_and_shuffle, generate_walks_with_budget, read_corpus, write_corpus, WalkCorpus};

pub const EFFECTIVE_CONFIG_FILE: &str = "effective_config.txt";
pub const CORPUS_FILE: &str = "corpus.txt";
pub const EMBEDDINGS_FILE: &str = "embeddings.txt";
pub const TIMINGS_FILE: &str = "timings.tsv";
pub const METRICS_FILE: &str = "metrics.tsv";
pub const LINK_SPLIT_FILE: &str = "link_split.tsv";
pub const TRAIN_EDGES_FILE: &str = "train_edges.tsv";
pub const TRAIN_NODES_FILE: &str = "train_nodes.tsv";
pub const PARTIAL_SUFFIX: &str = ".partial";

/// Fraction of retained links held out for threshold tuning.
pub const VALIDATION_FRACTION: f64 = 0.1;

const WALK_TAG: u64 = 0x3A1C;
const SHUFFLE_TAG: u64 = 0x5F1E;
const TRAIN_TAG: u64 = 0x7241;

pub fn instances_file(motif: &str) -> String {
    format!("instances_{motif}.tsv")
}

pub fn adjacency_file(motif: &str) -> String {
    format!("adjacency_{motif}.tsv")
}

/// Which views feed the walk stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WalkSource {
    Original,
    Motifs,
    #[default]
    All,
}

impl FromStr for WalkSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "original" => Ok(WalkSource::Original),
            "motifs" => Ok(WalkSource::Motifs),
            "all" => Ok(WalkSource::All),
            other => Err(format!("unknown walk source `{other}` (original|motifs|all)")),
        }
    }
}

/// Accumulated wall-clock seconds per stage, in first-seen order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Timings {
    stages: Vec<(String, f64)>,
}

impl Timings {
    pub fn add(&mut self, stage: &str, seconds: f64) {
        match self.stages.iter_mut().find(|(s, _)| s == stage) {
            Some((_, t)) => *t += seconds,
            None => self.stages.push((stage.to_string(), seconds)),
        }
    }

    pub fn get(&self, stage: &str) -> Option<f64> {
        self.stages.iter().find(|(s, _)| s == stage).map(|(_, t)| *t)
    }

    pub fn stages(&self) -> &[(String, f64)] {
        &self.stages
    }

    pub fn total(&self) -> f64 {
        self.stages.iter().map(|(_, t)| t).sum()
    }

    /// Runs `f`, charging its time to `stage` and tagging any error with it.
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        log::info!("stage {stage}: start");
        let out = f().map_err(|e| e.in_stage(stage));
        let secs = start.elapsed().as_secs_f64();
        log::info!("stage {stage}: {secs:.3}s");
        self.add(stage, secs);
        out
    }
}

impl fmt::Display for Timings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "stage\tseconds")?;
        for (s, t) in &self.stages {
            writeln!(f, "{s}\t{t:.6}")?;
        }
        writeln!(f, "total\t{:.6}", self.total())
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub embeddings: EmbeddingMatrix,
    pub metrics: Option<MetricReport>,
    pub timings: Timings,
    pub out_dir: PathBuf,
}

fn partial_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(PARTIAL_SUFFIX);
    PathBuf::from(s)
}

/// Writes through `<path>.partial` and renames on success, so a failed write
/// leaves only the partial file behind.
fn persist(path: &Path, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
    if path.exists() {
        fs::remove_file(path).map_err(|e| Error::io(path, e))?;
    }
    let partial = partial_path(path);
    write(&partial)?;
    fs::rename(&partial, path).map_err(|e| Error::io(path, e))
}

fn persist_text(path: &Path, text: &str) -> Result<()> {
    persist(path, |p| fs::write(p, text).map_err(|e| Error::io(p, e)))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn require(path: PathBuf) -> Result<PathBuf> {
    if path.is_file() {
        Ok(path)
    } else {
        Err(Error::MissingArtifact(path))
    }
}

/// Runs `f` on a pool of `workers` threads.
#[cfg(feature = "parallel")]
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build() {
        Ok(pool) => pool.install(f),
        Err(e) => {
            log::warn!("cannot build a {workers}-thread pool ({e}); using the global pool");
            f()
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_workers<T: Send>(_workers: usize, f: impl FnOnce() -> T + Send) -> T {
    f()
}

pub fn load_input_graph(cfg: &PipelineConfig) -> Result<HeteroGraph> {
    cfg.check_inputs()?;
    let (g, report) = load_graph(&cfg.edges, &cfg.nodes)?;
    if report.duplicate_edges > 0 {
        log::warn!("{} duplicate edge line(s) ignored", report.duplicate_edges);
    }
    Ok(g)
}

/// Parses every motif file. A motif without a `name` line takes its file stem.
pub fn load_motifs(cfg: &PipelineConfig) -> Result<Vec<MotifPattern>> {
    let mut out: Vec<MotifPattern> = Vec::new();
    for path in &cfg.motifs {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut m = MotifPattern::parse(&text)?;
        let named = text
            .split(['\n', ';'])
            .any(|l| l.trim_start().starts_with("name"));
        if !named {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("motif");
            m = m.with_name(stem);
        }
        let name = m.name();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(Error::Config(format!(
                "motif name `{name}` in {} must be letters, digits, `_` or `-`",
                path.display()
            )));
        }
        if out.iter().any(|o| o.name() == name) {
            return Err(Error::Config(format!("duplicate motif name `{name}`")));
        }
        out.push(m);
    }
    Ok(out)
}

/// Enumerates each motif and builds its adjacency, writing both when `out` is set.
fn transform(
    cfg: &PipelineConfig,
    g: &HeteroGraph,
    motifs: &[MotifPattern],
    out: Option<&Path>,
    timings: &mut Timings,
) -> Result<Vec<MotifAdjacency>> {
    let mut adjs = Vec::with_capacity(motifs.len());
    for m in motifs {
        let inst = timings.time("enumerate", || {
            let inst = enumerate_instances(g, m);
            log::info!("motif {}: {} instance(s)", m.name(), inst.frequency());
            if let Some(dir) = out {
                persist(&dir.join(instances_file(m.name())), |p| write_instances(&inst, g, p))?;
            }
            Ok(inst)
        })?;
        let adj = timings.time("adjacency", || {
            let adj = build_motif_adjacency(g, m, &inst, cfg.adjacency_mode)?;
            if let Some(dir) = out {
                persist(&dir.join(adjacency_file(m.name())), |p| write_adjacency(&adj, g, p))?;
            }
            Ok(adj)
        })?;
        adjs.push(adj);
    }
    Ok(adjs)
}

/// Walks the original view (when `original`) and every motif view with the
/// same parameters, then shuffles all walks together.
fn walk(
    cfg: &PipelineConfig,
    g: &HeteroGraph,
    adjs: &[MotifAdjacency],
    original: bool,
    seed: u64,
    out: Option<&Path>,
    timings: &mut Timings,
) -> Result<WalkCorpus> {
    let corpus = timings.time("walk", || {
        let mut views: Vec<(usize, WeightedGraphView)> = Vec::new();
        if original {
            views.push((0, g.as_walk_view()));
        }
        views.extend(adjs.iter().enumerate().map(|(i, a)| (i + 1, a.to_view())));
        let mut corpora = Vec::with_capacity(views.len());
        for (slot, view) in &views {
            let wc = cfg.walk_config(derive_seed(seed, &[WALK_TAG, *slot as u64]));
            corpora.push(generate_walks_with_budget(view, &wc, cfg.alias_budget)?);
        }
        Ok(aggregate_and_shuffle(corpora, derive_seed(seed, &[SHUFFLE_TAG])))
    })?;
    log::info!("corpus: {} walks, {} tokens", corpus.len(), corpus.num_tokens());
    if let Some(dir) = out {
        timings.time("write_corpus", || {
            persist(&dir.join(CORPUS_FILE), |p| write_corpus(&corpus, g.node_names(), p))
        })?;
    }
    Ok(corpus)
}

fn train(
    cfg: &PipelineConfig,
    corpus: &WalkCorpus,
    names: &[String],
    seed: u64,
    out: Option<&Path>,
    timings: &mut Timings,
) -> Result<TrainOutput> {
    let tc = cfg.train_config(derive_seed(seed, &[TRAIN_TAG]));
    let (vocab, seqs) = timings.time("train_setup", || {
        tc.validate()?;
        let vocab = build_vocab(corpus, names, tc.min_count)?;
        let seqs = vocab.encode(corpus, names);
        Ok((vocab, seqs))
    })?;
    let output = timings.time("train", || train_encoded(&vocab, &seqs, &tc))?;
    for e in &output.epochs {
        log::info!("{e}");
    }
    if let Some(dir) = out {
        timings.time("write_embeddings", || {
            persist(&dir.join(EMBEDDINGS_FILE), |p| save_embeddings(&output.embeddings, p))
        })?;
    }
    Ok(output)
}

/// Original graph plus motif graphs to embeddings.
fn embed_graph(
    cfg: &PipelineConfig,
    g: &HeteroGraph,
    motifs: &[MotifPattern],
    out: Option<&Path>,
    timings: &mut Timings,
) -> Result<EmbeddingMatrix> {
    let adjs = transform(cfg, g, motifs, out, timings)?;
    let corpus = walk(cfg, g, &adjs, true, cfg.seed, out, timings)?;
    Ok(train(cfg, &corpus, g.node_names(), cfg.seed, out, timings)?.embeddings)
}

fn link_split_of(cfg: &PipelineConfig, g: &HeteroGraph, run: usize) -> Result<(HeteroGraph, LinkEvalSplit)> {
    let edge_type = cfg
        .edge_type
        .as_deref()
        .ok_or_else(|| Error::Config("`edge_type` is not set".into()))?;
    let validation = cfg.tune_threshold.then_some(VALIDATION_FRACTION);
    make_link_split(g, edge_type, cfg.ratio, run_seed(cfg.seed, run), validation)
}

fn score_links(cfg: &PipelineConfig, x: &EmbeddingMatrix, split: &LinkEvalSplit) -> Result<f64> {
    let threshold = if cfg.tune_threshold {
        let t = tune_threshold(x, split)?;
        log::info!("tuned threshold {t:.6}");
        t
    } else {
        cfg.threshold
    };
    let acc = link_prediction_accuracy(x, split, threshold)?;
    Ok(acc.accuracy)
}

/// Runs the whole pipeline and persists every artifact under `cfg.out_dir`.
///
/// For link prediction each run hides a fresh split and embeds the pruned
/// graph; artifacts of run 0 are kept.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    cfg.validate().map_err(|e| e.in_stage("config"))?;
    with_workers(cfg.workers, || run_inner(cfg))
}

fn run_inner(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let dir = cfg.out_dir.as_path();
    let mut timings = Timings::default();
    timings.time("config", || {
        ensure_dir(dir)?;
        persist_text(&dir.join(EFFECTIVE_CONFIG_FILE), &cfg.to_string())
    })?;
    let (g, motifs) = timings.time("load", || Ok((load_input_graph(cfg)?, load_motifs(cfg)?)))?;
    log::info!("graph: {} nodes, {} edges; {} motif(s)", g.num_nodes(), g.num_edges(), motifs.len());

    let (embeddings, metrics) = match cfg.task {
        Task::Link => {
            let mut report = MetricReport::new(LINK_TASK);
            let mut kept = None;
            for run in 0..cfg.runs {
                let (pruned, split) = timings.time("split", || link_split_of(cfg, &g, run))?;
                let out = (run == 0).then_some(dir);
                if let Some(d) = out {
                    timings.time("split", || persist(&d.join(LINK_SPLIT_FILE), |p| write_link_split(&split, p)))?;
                }
                let x = embed_graph(cfg, &pruned, &motifs, out, &mut timings)?;
                let acc = timings.time("evaluate", || score_links(cfg, &x, &split))?;
                log::info!("link run {run}: accuracy {acc:.4}");
                report.push(run, split.seed, acc);
                if run == 0 {
                    kept = Some(x);
                }
            }
            (kept.expect("at least one run"), Some(report))
        }
        task => {
            let x = embed_graph(cfg, &g, &motifs, Some(dir), &mut timings)?;
            let metrics = if task == Task::Node {
                let labels_path = cfg.labels.as_deref().expect("validated");
                let report = timings.time("evaluate", || {
                    let labels = load_labels(labels_path)?;
                    evaluate_node_classification(&x, &labels, cfg.ratio, cfg.runs, cfg.seed)
                })?;
                Some(report)
            } else {
                None
            };
            (x, metrics)
        }
    };
    if let Some(m) = &metrics {
        persist_text(&dir.join(METRICS_FILE), &m.to_tsv()).map_err(|e| e.in_stage("evaluate"))?;
    }
    persist_text(&dir.join(TIMINGS_FILE), &timings.to_string()).map_err(|e| e.in_stage("report"))?;
    Ok(PipelineOutput {
        embeddings,
        metrics,
        timings,
        out_dir: dir.to_path_buf(),
    })
}

/// Stage `transform`: instance lists and adjacency exports for every motif.
pub fn transform_stage(cfg: &PipelineConfig) -> Result<Vec<MotifAdjacency>> {
    cfg.validate_params().map_err(|e| e.in_stage("config"))?;
    with_workers(cfg.workers, || {
        let mut timings = Timings::default();
        let (g, motifs) = timings.time("load", || Ok((load_input_graph(cfg)?, load_motifs(cfg)?)))?;
        ensure_dir(&cfg.out_dir).map_err(|e| e.in_stage("transform"))?;
        transform(cfg, &g, &motifs, Some(&cfg.out_dir), &mut timings)
    })
}

/// Stage `walk`: reads adjacency exports from the output directory and writes
/// the shuffled corpus.
pub fn walk_stage(cfg: &PipelineConfig, source: WalkSource) -> Result<WalkCorpus> {
    cfg.validate_params().map_err(|e| e.in_stage("config"))?;
    with_workers(cfg.workers, || {
        let mut timings = Timings::default();
        let (g, adjs) = timings.time("load", || {
            let g = load_input_graph(cfg)?;
            let mut adjs = Vec::new();
            if source != WalkSource::Original {
                for m in load_motifs(cfg)? {
                    let path = require(cfg.out_dir.join(adjacency_file(m.name())))?;
                    adjs.push(read_adjacency(&path, &g, m.name(), cfg.adjacency_mode)?);
                }
            }
            Ok((g, adjs))
        })?;
        if source == WalkSource::Motifs && adjs.is_empty() {
            return Err(Error::Config("walk source `motifs` but no motifs configured".into()).in_stage("walk"));
        }
        let original = source != WalkSource::Motifs;
        ensure_dir(&cfg.out_dir).map_err(|e| e.in_stage("walk"))?;
        walk(cfg, &g, &adjs, original, cfg.seed, Some(&cfg.out_dir), &mut timings)
    })
}

/// Stage `train`: reads the corpus from the output directory and writes embeddings.
pub fn train_stage(cfg: &PipelineConfig) -> Result<TrainOutput> {
    cfg.validate_params().map_err(|e| e.in_stage("config"))?;
    let mut timings = Timings::default();
    let (corpus, names) = timings.time("load", || read_corpus(&require(cfg.out_dir.join(CORPUS_FILE))?))?;
    train(cfg, &corpus, &names, cfg.seed, Some(&cfg.out_dir), &mut timings)
}

fn embeddings_path(cfg: &PipelineConfig) -> PathBuf {
    cfg.embeddings.clone().unwrap_or_else(|| cfg.out_dir.join(EMBEDDINGS_FILE))
}

fn write_metrics(cfg: &PipelineConfig, report: &MetricReport) -> Result<()> {
    ensure_dir(&cfg.out_dir)?;
    persist_text(&cfg.out_dir.join(METRICS_FILE), &report.to_tsv())
}

/// Stage `eval-node`: node classification on any embedding file.
pub fn eval_node_stage(cfg: &PipelineConfig) -> Result<MetricReport> {
    let mut timings = Timings::default();
    let (x, labels) = timings.time("load", || {
        let labels = cfg
            .labels
            .as_deref()
            .ok_or_else(|| Error::Config("`labels` is not set".into()))?;
        let x = load_embeddings(&require(embeddings_path(cfg))?)?;
        Ok((x, load_labels(labels)?))
    })?;
    timings.time("evaluate", || {
        let report = evaluate_node_classification(&x, &labels, cfg.ratio, cfg.runs, cfg.seed)?;
        write_metrics(cfg, &report)?;
        Ok(report)
    })
}

/// Stage `split-link`: hides test links and writes the split plus the pruned
/// graph (`train_edges.tsv`, `train_nodes.tsv`) for the downstream stages.
pub fn split_link_stage(cfg: &PipelineConfig) -> Result<LinkEvalSplit> {
    let mut timings = Timings::default();
    let g = timings.time("load", || load_input_graph(cfg))?;
    timings.time("split", || {
        let (pruned, split) = link_split_of(cfg, &g, 0)?;
        ensure_dir(&cfg.out_dir)?;
        persist(&cfg.out_dir.join(LINK_SPLIT_FILE), |p| write_link_split(&split, p))?;
        let edges = cfg.out_dir.join(TRAIN_EDGES_FILE);
        let nodes = cfg.out_dir.join(TRAIN_NODES_FILE);
        write_graph(&pruned, &partial_path(&edges), &partial_path(&nodes))?;
        for p in [&edges, &nodes] {
            fs::rename(partial_path(p), p).map_err(|e| Error::io(p, e))?;
        }
        Ok(split)
    })
}

/// Stage `eval-link`: link prediction on a persisted split.
pub fn eval_link_stage(cfg: &PipelineConfig) -> Result<MetricReport> {
    let mut timings = Timings::default();
    let (x, split) = timings.time("load", || {
        let split_path = cfg.link_split.clone().unwrap_or_else(|| cfg.out_dir.join(LINK_SPLIT_FILE));
        let split = read_link_split(&require(split_path)?)?;
        Ok((load_embeddings(&require(embeddings_path(cfg))?)?, split))
    })?;
    timings.time("evaluate", || {
        let mut report = MetricReport::new(LINK_TASK);
        report.push(0, split.seed, score_links(cfg, &x, &split)?);
        write_metrics(cfg, &report)?;
        Ok(report)
    })
}
