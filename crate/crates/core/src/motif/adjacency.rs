use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use super::enumerate::InstanceSet;
use super::pattern::MotifPattern;
use crate::error::{Error, Result};
use crate::graph::{HeteroGraph, NodeIx, WeightedGraphView};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdjacencyMode {
    /// Entry counts the instances containing both nodes.
    #[default]
    Weighted,
    /// Entry is 1 when the nodes share at least one instance.
    Binary,
}

impl fmt::Display for AdjacencyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AdjacencyMode::Weighted => "weighted",
            AdjacencyMode::Binary => "binary",
        })
    }
}

impl FromStr for AdjacencyMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "weighted" => Ok(AdjacencyMode::Weighted),
            "binary" => Ok(AdjacencyMode::Binary),
            other => Err(format!("unknown adjacency mode `{other}` (weighted|binary)")),
        }
    }
}

/// Symmetric motif co-occurrence matrix, stored as its strict upper triangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotifAdjacency {
    name: String,
    num_nodes: usize,
    mode: AdjacencyMode,
    // (i, j, w) with i < j, sorted, w > 0
    entries: Vec<(NodeIx, NodeIx, u64)>,
}

impl MotifAdjacency {
    /// Builds the matrix from `(i, j, w)` triples. Pairs may come in either
    /// orientation but must not repeat.
    pub fn from_entries(
        name: &str,
        num_nodes: usize,
        mode: AdjacencyMode,
        entries: impl IntoIterator<Item = (NodeIx, NodeIx, u64)>,
    ) -> Result<Self> {
        let mut upper = Vec::new();
        for (i, j, w) in entries {
            if i == j {
                return Err(Error::Adjacency(format!("diagonal entry at node {i}")));
            }
            if i as usize >= num_nodes || j as usize >= num_nodes {
                return Err(Error::Adjacency(format!("entry ({i}, {j}) out of range")));
            }
            if w == 0 {
                continue;
            }
            let w = match mode {
                AdjacencyMode::Weighted => w,
                AdjacencyMode::Binary => 1,
            };
            upper.push((i.min(j), i.max(j), w));
        }
        upper.sort_unstable();
        if let Some(p) = upper.windows(2).find(|p| (p[0].0, p[0].1) == (p[1].0, p[1].1)) {
            return Err(Error::Adjacency(format!("pair ({}, {}) listed twice", p[0].0, p[0].1)));
        }
        Ok(MotifAdjacency {
            name: name.to_string(),
            num_nodes,
            mode,
            entries: upper,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn mode(&self) -> AdjacencyMode {
        self.mode
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Upper-triangle entries `(i, j, w)` with `i < j`.
    pub fn entries(&self) -> &[(NodeIx, NodeIx, u64)] {
        &self.entries
    }

    pub fn get(&self, i: NodeIx, j: NodeIx) -> u64 {
        if i == j {
            return 0;
        }
        let key = (i.min(j), i.max(j));
        self.entries
            .binary_search_by(|e| (e.0, e.1).cmp(&key))
            .map(|p| self.entries[p].2)
            .unwrap_or(0)
    }

    /// Nonzero entries of the full symmetric matrix.
    pub fn nonzero_entries(&self) -> usize {
        2 * self.entries.len()
    }

    /// Nodes with no nonzero entry, i.e. in no instance.
    pub fn isolated_nodes(&self) -> usize {
        let mut touched = vec![false; self.num_nodes];
        for &(i, j, _) in &self.entries {
            touched[i as usize] = true;
            touched[j as usize] = true;
        }
        touched.iter().filter(|t| !**t).count()
    }

    /// Symmetric weighted view over the same dense node indices.
    pub fn to_view(&self) -> WeightedGraphView {
        WeightedGraphView::from_undirected(
            self.num_nodes,
            self.entries.iter().map(|&(i, j, w)| (i, j, w as f64)),
        )
        .expect("adjacency entries are valid by construction")
    }
}

/// Tallies, for every node pair, the number of instances containing both.
pub fn build_motif_adjacency(
    g: &HeteroGraph,
    m: &MotifPattern,
    inst: &InstanceSet,
    mode: AdjacencyMode,
) -> Result<MotifAdjacency> {
    if inst.pattern() != m {
        return Err(Error::Adjacency(format!(
            "instance set belongs to motif `{}`, not `{}`",
            inst.pattern().name(),
            m.name()
        )));
    }
    let k = m.k();
    let n = g.num_nodes();
    let mut pairs: Vec<(NodeIx, NodeIx)> = Vec::with_capacity(inst.frequency() * k * (k - 1) / 2);
    for i in inst.instances() {
        let nodes = i.nodes();
        if nodes.len() != k || nodes.iter().any(|&u| u as usize >= n) {
            return Err(Error::Adjacency(format!(
                "instance {nodes:?} does not fit motif `{}` on this graph",
                m.name()
            )));
        }
        for a in 0..k {
            for b in a + 1..k {
                pairs.push((nodes[a], nodes[b]));
            }
        }
    }
    pairs.sort_unstable();
    let mut entries: Vec<(NodeIx, NodeIx, u64)> = Vec::new();
    for (i, j) in pairs {
        match entries.last_mut() {
            Some(last) if (last.0, last.1) == (i, j) => last.2 += 1,
            _ => entries.push((i, j, 1)),
        }
    }
    let adj = MotifAdjacency::from_entries(m.name(), n, mode, entries)?;
    log::info!(
        "motif `{}`: {} instances, {} nonzero entries, {} isolated nodes",
        m.name(),
        inst.frequency(),
        adj.nonzero_entries(),
        adj.isolated_nodes()
    );
    Ok(adj)
}

/// Writes `node_i<TAB>node_j<TAB>weight` rows with `node_i < node_j` as strings,
/// sorted.
pub fn write_adjacency(adj: &MotifAdjacency, g: &HeteroGraph, path: &Path) -> Result<()> {
    let mut rows: Vec<(&str, &str, u64)> = adj
        .entries
        .iter()
        .map(|&(i, j, w)| {
            let (a, b) = (g.node_name(i), g.node_name(j));
            if a < b {
                (a, b, w)
            } else {
                (b, a, w)
            }
        })
        .collect();
    rows.sort_unstable();
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    for (a, b, wt) in rows {
        writeln!(w, "{a}\t{b}\t{wt}").map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Reads an adjacency export back against the graph it was built from.
pub fn read_adjacency(path: &Path, g: &HeteroGraph, name: &str, mode: AdjacencyMode) -> Result<MotifAdjacency> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut entries = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 {
            return Err(Error::parse(path, i + 1, "expected `node_i<TAB>node_j<TAB>weight`"));
        }
        let lookup = |id: &str| {
            g.node_index(id)
                .ok_or_else(|| Error::parse(path, i + 1, format!("unknown node `{id}`")))
        };
        let w: u64 = f[2]
            .parse()
            .map_err(|_| Error::parse(path, i + 1, format!("bad weight `{}`", f[2])))?;
        entries.push((lookup(f[0])?, lookup(f[1])?, w));
    }
    MotifAdjacency::from_entries(name, g.num_nodes(), mode, entries)
        .map_err(|e| Error::parse(path, 0, e.to_string()))
}
