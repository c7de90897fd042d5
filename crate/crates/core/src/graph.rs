//! Typed directed graphs and the weighted views random walks run on.
//!
//! Node ids are opaque strings at the boundary. They are mapped once, in
//! declaration order, to dense `NodeIx` indices which every other module uses.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Dense node index.
pub type NodeIx = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypedEdge {
    pub src: NodeIx,
    pub dst: NodeIx,
    pub edge_type: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    In,
    Out,
}

/// Warnings collected while building a graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub duplicate_edges: usize,
    pub homogeneous: bool,
}

/// Compressed adjacency: `targets[offsets[u]..offsets[u + 1]]` are the sorted,
/// distinct neighbours of `u`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<NodeIx>,
}

impl Csr {
    fn from_pairs(n: usize, mut pairs: Vec<(NodeIx, NodeIx)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &pairs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.into_iter().map(|(_, v)| v).collect();
        Csr { offsets, targets }
    }

    #[inline]
    fn row(&self, u: NodeIx) -> &[NodeIx] {
        let u = u as usize;
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }
}

/// Directed graph with typed nodes and typed edges.
#[derive(Debug, Clone)]
pub struct HeteroGraph {
    names: Vec<String>,
    index: HashMap<String, NodeIx>,
    node_types: Vec<u32>,
    node_type_names: Vec<String>,
    edge_type_names: Vec<String>,
    edges: Vec<TypedEdge>,
    out_adj: Csr,
    in_adj: Csr,
}

/// Incremental constructor for [`HeteroGraph`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    names: Vec<String>,
    index: HashMap<String, NodeIx>,
    node_types: Vec<u32>,
    node_type_names: Vec<String>,
    node_type_index: HashMap<String, u32>,
    edge_type_names: Vec<String>,
    edge_type_index: HashMap<String, u32>,
    edges: BTreeSet<TypedEdge>,
    duplicate_edges: usize,
}

fn intern(names: &mut Vec<String>, index: &mut HashMap<String, u32>, label: &str) -> u32 {
    if let Some(&ix) = index.get(label) {
        return ix;
    }
    let ix = names.len() as u32;
    names.push(label.to_string());
    index.insert(label.to_string(), ix);
    ix
}

fn check_token(kind: &str, token: &str) -> std::result::Result<(), String> {
    if token.is_empty() {
        return Err(format!("empty {kind}"));
    }
    if token.chars().any(char::is_whitespace) {
        return Err(format!("{kind} `{token}` contains whitespace"));
    }
    Ok(())
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a node. Re-declaring with the same type is a no-op.
    pub fn add_node(&mut self, id: &str, node_type: &str) -> Result<NodeIx> {
        check_token("node id", id).map_err(Error::Graph)?;
        check_token("node type", node_type).map_err(Error::Graph)?;
        let ty = intern(&mut self.node_type_names, &mut self.node_type_index, node_type);
        if let Some(&ix) = self.index.get(id) {
            if self.node_types[ix as usize] != ty {
                return Err(Error::Graph(format!(
                    "node `{id}` declared with types `{}` and `{node_type}`",
                    self.node_type_names[self.node_types[ix as usize] as usize]
                )));
            }
            return Ok(ix);
        }
        let ix = self.names.len() as NodeIx;
        self.names.push(id.to_string());
        self.index.insert(id.to_string(), ix);
        self.node_types.push(ty);
        Ok(ix)
    }

    /// Adds a typed arc. Returns `false` when the identical arc was already present.
    pub fn add_edge(&mut self, src: &str, dst: &str, edge_type: &str) -> Result<bool> {
        check_token("edge type", edge_type).map_err(Error::Graph)?;
        let s = *self
            .index
            .get(src)
            .ok_or_else(|| Error::UnknownNode(src.to_string()))?;
        let d = *self
            .index
            .get(dst)
            .ok_or_else(|| Error::UnknownNode(dst.to_string()))?;
        if s == d {
            return Err(Error::Graph(format!("self-loop on `{src}`")));
        }
        let t = intern(&mut self.edge_type_names, &mut self.edge_type_index, edge_type);
        let inserted = self.edges.insert(TypedEdge {
            src: s,
            dst: d,
            edge_type: t,
        });
        if !inserted {
            self.duplicate_edges += 1;
        }
        Ok(inserted)
    }

    pub fn build(self) -> Result<(HeteroGraph, LoadReport)> {
        if self.names.is_empty() {
            return Err(Error::Graph("graph has no nodes".into()));
        }
        let homogeneous = self.node_type_names.len() < 2 || self.edge_type_names.len() < 2;
        if homogeneous {
            log::warn!(
                "graph is not heterogeneous: {} node types, {} edge types",
                self.node_type_names.len(),
                self.edge_type_names.len()
            );
        }
        if self.duplicate_edges > 0 {
            log::warn!("dropped {} duplicate edges", self.duplicate_edges);
        }
        let n = self.names.len();
        let edges: Vec<TypedEdge> = self.edges.into_iter().collect();
        let out_adj = Csr::from_pairs(n, edges.iter().map(|e| (e.src, e.dst)).collect());
        let in_adj = Csr::from_pairs(n, edges.iter().map(|e| (e.dst, e.src)).collect());
        let graph = HeteroGraph {
            names: self.names,
            index: self.index,
            node_types: self.node_types,
            node_type_names: self.node_type_names,
            edge_type_names: self.edge_type_names,
            edges,
            out_adj,
            in_adj,
        };
        let report = LoadReport {
            duplicate_edges: self.duplicate_edges,
            homogeneous,
        };
        Ok((graph, report))
    }
}

/// Splits a data line into exactly `n` tab-separated fields.
fn fields(line: &str, n: usize) -> std::result::Result<Vec<&str>, String> {
    let parts: Vec<&str> = line.split('\t').map(str::trim).collect();
    if parts.len() != n {
        return Err(format!(
            "expected {n} tab-separated fields, found {}",
            parts.len()
        ));
    }
    Ok(parts)
}

/// Iterates `(line_number, content)` over non-blank, non-comment lines.
fn data_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push((i + 1, trimmed.to_string()));
    }
    Ok(out)
}

/// Reads a graph from an edge file (`src<TAB>dst<TAB>type`) and a node-type
/// file (`node<TAB>type`).
pub fn load_graph(edge_file: &Path, node_type_file: &Path) -> Result<(HeteroGraph, LoadReport)> {
    let mut builder = GraphBuilder::new();
    let node_lines = data_lines(node_type_file)?;
    if node_lines.is_empty() {
        return Err(Error::parse(node_type_file, 0, "node file declares no nodes"));
    }
    for (line_no, line) in node_lines {
        let f = fields(&line, 2).map_err(|m| Error::parse(node_type_file, line_no, m))?;
        builder
            .add_node(f[0], f[1])
            .map_err(|e| Error::parse(node_type_file, line_no, e.to_string()))?;
    }
    for (line_no, line) in data_lines(edge_file)? {
        let f = fields(&line, 3).map_err(|m| Error::parse(edge_file, line_no, m))?;
        for id in [f[0], f[1]] {
            if !builder.index.contains_key(id) {
                return Err(Error::parse(
                    edge_file,
                    line_no,
                    format!("edge references undeclared node `{id}`"),
                ));
            }
        }
        builder
            .add_edge(f[0], f[1], f[2])
            .map_err(|e| Error::parse(edge_file, line_no, e.to_string()))?;
    }
    let (graph, report) = builder.build()?;
    log::info!(
        "loaded graph: {} nodes, {} edges, {} node types, {} edge types",
        graph.num_nodes(),
        graph.num_edges(),
        graph.node_type_names.len(),
        graph.edge_type_names.len()
    );
    Ok((graph, report))
}

/// Writes `g` back to the two-file text format read by [`load_graph`].
pub fn write_graph(g: &HeteroGraph, edge_file: &Path, node_type_file: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(node_type_file).map_err(|e| Error::io(node_type_file, e))?);
    for (ix, name) in g.names.iter().enumerate() {
        writeln!(w, "{name}\t{}", g.node_type_names[g.node_types[ix] as usize])
            .map_err(|e| Error::io(node_type_file, e))?;
    }
    w.flush().map_err(|e| Error::io(node_type_file, e))?;

    let mut w = BufWriter::new(File::create(edge_file).map_err(|e| Error::io(edge_file, e))?);
    for e in &g.edges {
        writeln!(
            w,
            "{}\t{}\t{}",
            g.names[e.src as usize], g.names[e.dst as usize], g.edge_type_names[e.edge_type as usize]
        )
        .map_err(|e| Error::io(edge_file, e))?;
    }
    w.flush().map_err(|e| Error::io(edge_file, e))
}

impl HeteroGraph {
    pub fn num_nodes(&self) -> usize {
        self.names.len()
    }

    /// Number of distinct typed edges.
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of distinct type-erased arcs.
    pub fn num_arcs(&self) -> usize {
        self.out_adj.targets.len()
    }

    pub fn node_name(&self, u: NodeIx) -> &str {
        &self.names[u as usize]
    }

    pub fn node_names(&self) -> &[String] {
        &self.names
    }

    pub fn node_index(&self, id: &str) -> Option<NodeIx> {
        self.index.get(id).copied()
    }

    pub fn node_type(&self, u: NodeIx) -> u32 {
        self.node_types[u as usize]
    }

    pub fn node_type_name(&self, u: NodeIx) -> &str {
        &self.node_type_names[self.node_types[u as usize] as usize]
    }

    pub fn node_type_names(&self) -> &[String] {
        &self.node_type_names
    }

    pub fn edge_type_names(&self) -> &[String] {
        &self.edge_type_names
    }

    pub fn node_type_id(&self, label: &str) -> Option<u32> {
        self.node_type_names.iter().position(|t| t == label).map(|i| i as u32)
    }

    pub fn edge_type_id(&self, label: &str) -> Option<u32> {
        self.edge_type_names.iter().position(|t| t == label).map(|i| i as u32)
    }

    /// Typed edges, sorted by `(src, dst, type)`.
    pub fn edges(&self) -> &[TypedEdge] {
        &self.edges
    }

    pub fn nodes_of_type(&self, node_type: u32) -> Vec<NodeIx> {
        (0..self.num_nodes() as NodeIx)
            .filter(|&u| self.node_types[u as usize] == node_type)
            .collect()
    }

    /// Sorted distinct out-neighbours of `u`.
    #[inline]
    pub fn out_neighbors(&self, u: NodeIx) -> &[NodeIx] {
        self.out_adj.row(u)
    }

    /// Sorted distinct in-neighbours of `u`.
    #[inline]
    pub fn in_neighbors(&self, u: NodeIx) -> &[NodeIx] {
        self.in_adj.row(u)
    }

    /// Whether at least one arc `u -> v` exists, of any type.
    #[inline]
    pub fn has_arc(&self, u: NodeIx, v: NodeIx) -> bool {
        self.out_adj.row(u).binary_search(&v).is_ok()
    }

    #[inline]
    pub fn out_degree(&self, u: NodeIx) -> usize {
        self.out_adj.row(u).len()
    }

    #[inline]
    pub fn in_degree(&self, u: NodeIx) -> usize {
        self.in_adj.row(u).len()
    }

    /// Type-erased arc count of node `id` in the given direction.
    pub fn degree(&self, id: &str, direction: Direction) -> Result<usize> {
        let u = self
            .node_index(id)
            .ok_or_else(|| Error::UnknownNode(id.to_string()))?;
        Ok(match direction {
            Direction::Out => self.out_degree(u),
            Direction::In => self.in_degree(u),
        })
    }

    /// Copy of the graph without the given typed edges. The node set is unchanged.
    pub fn without_edges(&self, remove: &HashSet<TypedEdge>) -> HeteroGraph {
        let edges: Vec<TypedEdge> = self
            .edges
            .iter()
            .filter(|e| !remove.contains(e))
            .copied()
            .collect();
        let n = self.num_nodes();
        HeteroGraph {
            names: self.names.clone(),
            index: self.index.clone(),
            node_types: self.node_types.clone(),
            node_type_names: self.node_type_names.clone(),
            edge_type_names: self.edge_type_names.clone(),
            out_adj: Csr::from_pairs(n, edges.iter().map(|e| (e.src, e.dst)).collect()),
            in_adj: Csr::from_pairs(n, edges.iter().map(|e| (e.dst, e.src)).collect()),
            edges,
        }
    }

    /// Typed edges as external `(src, dst, type)` strings, for comparisons that
    /// must not depend on internal numbering.
    pub fn edge_triples(&self) -> BTreeSet<(String, String, String)> {
        self.edges
            .iter()
            .map(|e| {
                (
                    self.names[e.src as usize].clone(),
                    self.names[e.dst as usize].clone(),
                    self.edge_type_names[e.edge_type as usize].clone(),
                )
            })
            .collect()
    }

    /// `(node, type)` pairs as external strings.
    pub fn node_records(&self) -> BTreeSet<(String, String)> {
        (0..self.num_nodes() as NodeIx)
            .map(|u| (self.node_name(u).to_string(), self.node_type_name(u).to_string()))
            .collect()
    }

    pub fn stats(&self) -> GraphStats {
        let mut node_type_counts = vec![0usize; self.node_type_names.len()];
        for &t in &self.node_types {
            node_type_counts[t as usize] += 1;
        }
        let mut edge_type_counts = vec![0usize; self.edge_type_names.len()];
        for e in &self.edges {
            edge_type_counts[e.edge_type as usize] += 1;
        }
        GraphStats {
            nodes: self.num_nodes(),
            edges: self.num_edges(),
            node_types: self.node_type_names.iter().cloned().zip(node_type_counts).collect(),
            edge_types: self.edge_type_names.iter().cloned().zip(edge_type_counts).collect(),
        }
    }

    /// Directed, unit-weight, type-blind view used for walks on the original graph.
    /// Parallel typed edges between the same pair collapse into one arc.
    pub fn as_walk_view(&self) -> WeightedGraphView {
        WeightedGraphView {
            offsets: self.out_adj.offsets.clone(),
            targets: self.out_adj.targets.clone(),
            weights: vec![1.0; self.out_adj.targets.len()],
            symmetric: false,
        }
    }
}

/// Summary counts printed by `graph stats`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub node_types: Vec<(String, usize)>,
    pub edge_types: Vec<(String, usize)>,
}

impl fmt::Display for GraphStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes\t{}", self.nodes)?;
        writeln!(f, "edges\t{}", self.edges)?;
        writeln!(f, "node_types\t{}", self.node_types.len())?;
        writeln!(f, "edge_types\t{}", self.edge_types.len())?;
        for (t, c) in &self.node_types {
            writeln!(f, "node_type\t{t}\t{c}")?;
        }
        for (t, c) in &self.edge_types {
            writeln!(f, "edge_type\t{t}\t{c}")?;
        }
        Ok(())
    }
}

/// Weighted adjacency over dense node indices, stored row-compressed with
/// neighbours sorted within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraphView {
    offsets: Vec<usize>,
    targets: Vec<NodeIx>,
    weights: Vec<f64>,
    symmetric: bool,
}

impl WeightedGraphView {
    /// Builds a view from explicit arcs. Weights must be finite and positive;
    /// a symmetric view must list both directions with equal weight.
    pub fn from_arcs(
        num_nodes: usize,
        arcs: impl IntoIterator<Item = (NodeIx, NodeIx, f64)>,
        symmetric: bool,
    ) -> Result<Self> {
        let mut arcs: Vec<(NodeIx, NodeIx, f64)> = arcs.into_iter().collect();
        for &(u, v, w) in &arcs {
            if u as usize >= num_nodes || v as usize >= num_nodes {
                return Err(Error::Graph(format!("arc {u}->{v} out of range")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Graph(format!("arc {u}->{v} has non-positive weight {w}")));
            }
        }
        arcs.sort_by_key(|a| (a.0, a.1));
        if let Some(w) = arcs.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::Graph(format!("duplicate arc {}->{}", w[0].0, w[0].1)));
        }
        let mut offsets = vec![0usize; num_nodes + 1];
        for &(u, _, _) in &arcs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..num_nodes {
            offsets[i + 1] += offsets[i];
        }
        let view = WeightedGraphView {
            offsets,
            targets: arcs.iter().map(|a| a.1).collect(),
            weights: arcs.iter().map(|a| a.2).collect(),
            symmetric,
        };
        if symmetric {
            for u in 0..num_nodes as NodeIx {
                let (ns, ws) = view.neighbors(u);
                for (&v, &w) in ns.iter().zip(ws) {
                    if view.weight(v, u) != Some(w) {
                        return Err(Error::Graph(format!(
                            "symmetric view lacks matching arc {v}->{u}"
                        )));
                    }
                }
            }
        }
        Ok(view)
    }

    /// Builds a symmetric view from unordered pairs, adding both directions.
    pub fn from_undirected(
        num_nodes: usize,
        pairs: impl IntoIterator<Item = (NodeIx, NodeIx, f64)>,
    ) -> Result<Self> {
        let arcs: Vec<_> = pairs
            .into_iter()
            .flat_map(|(u, v, w)| [(u, v, w), (v, u, w)])
            .collect();
        Self::from_arcs(num_nodes, arcs, true)
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_arcs(&self) -> usize {
        self.targets.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Sorted neighbours of `u` and the matching weights.
    #[inline]
    pub fn neighbors(&self, u: NodeIx) -> (&[NodeIx], &[f64]) {
        let (a, b) = (self.offsets[u as usize], self.offsets[u as usize + 1]);
        (&self.targets[a..b], &self.weights[a..b])
    }

    #[inline]
    pub fn degree(&self, u: NodeIx) -> usize {
        self.offsets[u as usize + 1] - self.offsets[u as usize]
    }

    #[inline]
    pub fn has_arc(&self, u: NodeIx, v: NodeIx) -> bool {
        self.neighbors(u).0.binary_search(&v).is_ok()
    }

    pub fn weight(&self, u: NodeIx, v: NodeIx) -> Option<f64> {
        let (ns, ws) = self.neighbors(u);
        ns.binary_search(&v).ok().map(|i| ws[i])
    }

    /// Position of arc `u -> v` in the flat arc arrays.
    #[inline]
    pub(crate) fn arc_position(&self, u: NodeIx, v: NodeIx) -> Option<usize> {
        let (ns, _) = self.neighbors(u);
        ns.binary_search(&v).ok().map(|i| self.offsets[u as usize] + i)
    }

    /// Iterates all arcs as `(src, dst, weight)`.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeIx, NodeIx, f64)> + '_ {
        (0..self.num_nodes() as NodeIx).flat_map(move |u| {
            let (ns, ws) = self.neighbors(u);
            ns.iter().zip(ws).map(move |(&v, &w)| (u, v, w))
        })
    }
}
