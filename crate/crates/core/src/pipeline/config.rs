use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::embed::TrainConfig;
use crate::error::{Error, Result};
use crate::eval::DEFAULT_RUNS;
use crate::motif::AdjacencyMode;
use crate::walk::{WalkConfig, DEFAULT_ALIAS_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Task {
    #[default]
    None,
    Node,
    Link,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::None => "none",
            Task::Node => "node",
            Task::Link => "link",
        })
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" | "" => Ok(Task::None),
            "node" => Ok(Task::Node),
            "link" => Ok(Task::Link),
            other => Err(format!("unknown task `{other}` (none|node|link)")),
        }
    }
}

/// Every pipeline setting, one flat `key = value` per field.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub edges: PathBuf,
    pub nodes: PathBuf,
    pub motifs: Vec<PathBuf>,
    pub adjacency_mode: AdjacencyMode,

    pub walks_per_node: usize,
    pub walk_length: usize,
    pub p: f64,
    pub q: f64,
    pub alias_budget: usize,

    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub lr: f32,
    pub epochs: usize,
    pub min_count: u64,
    pub shrink_window: bool,
    pub subsample: Option<f64>,

    pub task: Task,
    pub labels: Option<PathBuf>,
    pub edge_type: Option<String>,
    pub ratio: f64,
    pub threshold: f64,
    pub tune_threshold: bool,
    pub runs: usize,
    pub embeddings: Option<PathBuf>,
    pub link_split: Option<PathBuf>,

    pub seed: u64,
    pub workers: usize,
    pub out_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let walk = WalkConfig::default();
        let train = TrainConfig::default();
        PipelineConfig {
            edges: PathBuf::new(),
            nodes: PathBuf::new(),
            motifs: Vec::new(),
            adjacency_mode: AdjacencyMode::Weighted,
            walks_per_node: walk.walks_per_node,
            walk_length: walk.walk_length,
            p: walk.p,
            q: walk.q,
            alias_budget: DEFAULT_ALIAS_BUDGET,
            dim: train.dim,
            window: train.window,
            negatives: train.negatives,
            lr: train.lr_initial,
            epochs: train.epochs,
            min_count: train.min_count,
            shrink_window: train.shrink_window,
            subsample: train.subsample,
            task: Task::None,
            labels: None,
            edge_type: None,
            ratio: 0.7,
            threshold: 0.5,
            tune_threshold: false,
            runs: DEFAULT_RUNS,
            embeddings: None,
            link_split: None,
            seed: 0,
            workers: 1,
            out_dir: PathBuf::from("motif2vec-out"),
        }
    }
}

/// Keys in the order they are written out.
pub const CONFIG_KEYS: &[&str] = &[
    "edges",
    "nodes",
    "motifs",
    "adjacency_mode",
    "walks_per_node",
    "walk_length",
    "p",
    "q",
    "alias_budget",
    "dim",
    "window",
    "negatives",
    "lr",
    "epochs",
    "min_count",
    "shrink_window",
    "subsample",
    "task",
    "labels",
    "edge_type",
    "ratio",
    "threshold",
    "tune_threshold",
    "runs",
    "embeddings",
    "link_split",
    "seed",
    "workers",
    "out_dir",
];

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::Config(format!("`{key}`: cannot parse `{value}`: {e}")))
}

fn opt_path(value: &str) -> Option<PathBuf> {
    (!value.is_empty()).then(|| PathBuf::from(value))
}

fn show_path(p: &Option<PathBuf>) -> String {
    p.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
}

impl PipelineConfig {
    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "edges" => self.edges = PathBuf::from(value),
            "nodes" => self.nodes = PathBuf::from(value),
            "motifs" => {
                self.motifs = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(PathBuf::from)
                    .collect()
            }
            "adjacency_mode" => self.adjacency_mode = parse_value(key, value)?,
            "walks_per_node" => self.walks_per_node = parse_value(key, value)?,
            "walk_length" => self.walk_length = parse_value(key, value)?,
            "p" => self.p = parse_value(key, value)?,
            "q" => self.q = parse_value(key, value)?,
            "alias_budget" => self.alias_budget = parse_value(key, value)?,
            "dim" => self.dim = parse_value(key, value)?,
            "window" => self.window = parse_value(key, value)?,
            "negatives" => self.negatives = parse_value(key, value)?,
            "lr" => self.lr = parse_value(key, value)?,
            "epochs" => self.epochs = parse_value(key, value)?,
            "min_count" => self.min_count = parse_value(key, value)?,
            "shrink_window" => self.shrink_window = parse_value(key, value)?,
            "subsample" => {
                self.subsample = match value {
                    "" | "none" => None,
                    v => Some(parse_value(key, v)?),
                }
            }
            "task" => self.task = parse_value(key, value)?,
            "labels" => self.labels = opt_path(value),
            "edge_type" => self.edge_type = (!value.is_empty()).then(|| value.to_string()),
            "ratio" => self.ratio = parse_value(key, value)?,
            "threshold" => self.threshold = parse_value(key, value)?,
            "tune_threshold" => self.tune_threshold = parse_value(key, value)?,
            "runs" => self.runs = parse_value(key, value)?,
            "embeddings" => self.embeddings = opt_path(value),
            "link_split" => self.link_split = opt_path(value),
            "seed" => self.seed = parse_value(key, value)?,
            "workers" => self.workers = parse_value(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Text form of one key's current value.
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "edges" => self.edges.display().to_string(),
            "nodes" => self.nodes.display().to_string(),
            "motifs" => self
                .motifs
                .iter()
                .map(|p| p.display().to_string())
                .collect::<Vec<_>>()
                .join(","),
            "adjacency_mode" => self.adjacency_mode.to_string(),
            "walks_per_node" => self.walks_per_node.to_string(),
            "walk_length" => self.walk_length.to_string(),
            "p" => self.p.to_string(),
            "q" => self.q.to_string(),
            "alias_budget" => self.alias_budget.to_string(),
            "dim" => self.dim.to_string(),
            "window" => self.window.to_string(),
            "negatives" => self.negatives.to_string(),
            "lr" => self.lr.to_string(),
            "epochs" => self.epochs.to_string(),
            "min_count" => self.min_count.to_string(),
            "shrink_window" => self.shrink_window.to_string(),
            "subsample" => self.subsample.map(|s| s.to_string()).unwrap_or_else(|| "none".into()),
            "task" => self.task.to_string(),
            "labels" => show_path(&self.labels),
            "edge_type" => self.edge_type.clone().unwrap_or_default(),
            "ratio" => self.ratio.to_string(),
            "threshold" => self.threshold.to_string(),
            "tune_threshold" => self.tune_threshold.to_string(),
            "runs" => self.runs.to_string(),
            "embeddings" => show_path(&self.embeddings),
            "link_split" => show_path(&self.link_split),
            "seed" => self.seed.to_string(),
            "workers" => self.workers.to_string(),
            "out_dir" => self.out_dir.display().to_string(),
            _ => return None,
        })
    }

    /// Parses `key = value` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            cfg.set(key.trim(), value)
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(cfg)
    }

    /// Reads a config file. Relative paths inside it resolve against the
    /// file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.rebase(base);
        Ok(cfg)
    }

    /// Joins every relative path onto `base`.
    pub fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if !p.as_os_str().is_empty() && p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.edges);
        fix(&mut self.nodes);
        self.motifs.iter_mut().for_each(fix);
        fix(&mut self.out_dir);
        for p in [&mut self.labels, &mut self.embeddings, &mut self.link_split].into_iter().flatten() {
            fix(p);
        }
    }

    pub fn walk_config(&self, seed: u64) -> WalkConfig {
        WalkConfig {
            walks_per_node: self.walks_per_node,
            walk_length: self.walk_length,
            p: self.p,
            q: self.q,
            seed,
        }
    }

    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            dim: self.dim,
            window: self.window,
            negatives: self.negatives,
            lr_initial: self.lr,
            epochs: self.epochs,
            seed,
            min_count: self.min_count,
            shrink_window: self.shrink_window,
            subsample: self.subsample,
            workers: self.workers,
        }
    }

    /// Parameter checks that do not touch the filesystem.
    pub fn validate_params(&self) -> Result<()> {
        self.walk_config(self.seed).validate()?;
        self.train_config(self.seed).validate()?;
        if self.workers < 1 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::Config(format!("ratio {} outside (0, 1)", self.ratio)));
        }
        if self.task != Task::None && self.runs < 1 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        Ok(())
    }

    /// Full validation for `run`: parameters, task requirements, and input files.
    pub fn validate(&self) -> Result<()> {
        self.validate_params()?;
        match self.task {
            Task::Node if self.labels.is_none() => {
                return Err(Error::Config("task `node` needs `labels`".into()))
            }
            Task::Link if self.edge_type.is_none() => {
                return Err(Error::Config("task `link` needs `edge_type`".into()))
            }
            _ => {}
        }
        self.check_inputs()?;
        if let Some(l) = &self.labels {
            if self.task == Task::Node && !l.is_file() {
                return Err(Error::Config(format!("labels file {} does not exist", l.display())));
            }
        }
        Ok(())
    }

    /// Graph and motif files must exist.
    pub fn check_inputs(&self) -> Result<()> {
        for (key, p) in [("edges", &self.edges), ("nodes", &self.nodes)] {
            if p.as_os_str().is_empty() {
                return Err(Error::Config(format!("`{key}` is not set")));
            }
            if !p.is_file() {
                return Err(Error::Config(format!("{key} file {} does not exist", p.display())));
            }
        }
        for m in &self.motifs {
            if !m.is_file() {
                return Err(Error::Config(format!("motif file {} does not exist", m.display())));
            }
        }
        Ok(())
    }
}

impl fmt::Display for PipelineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for key in CONFIG_KEYS {
            writeln!(f, "{key} = {}", self.get(key).expect("known key"))?;
        }
        Ok(())
    }
}
