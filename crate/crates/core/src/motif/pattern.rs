use std::fmt;

use crate::error::{MotifSpecError, Result};
use crate::graph::HeteroGraph;

pub const MIN_MOTIF_NODES: usize = 2;
pub const MAX_MOTIF_NODES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SlotType {
    Any,
    Label(String),
}

impl SlotType {
    pub fn label(&self) -> Option<&str> {
        match self {
            SlotType::Any => None,
            SlotType::Label(l) => Some(l),
        }
    }
}

impl fmt::Display for SlotType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlotType::Any => f.write_str("*"),
            SlotType::Label(l) => f.write_str(l),
        }
    }
}

/// A small directed pattern with node-type constraints, matched as an induced
/// subgraph.
///
/// Slots are addressed by position `0..k`; the ids written in the motif file
/// are kept for display only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotifPattern {
    name: String,
    slot_ids: Vec<u32>,
    slot_types: Vec<SlotType>,
    edges: Vec<(usize, usize)>,
    adj: [[bool; MAX_MOTIF_NODES]; MAX_MOTIF_NODES],
}

impl MotifPattern {
    /// Validates and builds a pattern from slot declarations and slot-id edges.
    pub fn new(
        name: &str,
        slots: Vec<(u32, SlotType)>,
        edges: Vec<(u32, u32)>,
    ) -> Result<Self, MotifSpecError> {
        let k = slots.len();
        if !(MIN_MOTIF_NODES..=MAX_MOTIF_NODES).contains(&k) {
            return Err(MotifSpecError::Size(k));
        }
        let mut slot_ids = Vec::with_capacity(k);
        let mut slot_types = Vec::with_capacity(k);
        for (id, ty) in slots {
            if slot_ids.contains(&id) {
                return Err(MotifSpecError::DuplicateSlot(id));
            }
            slot_ids.push(id);
            slot_types.push(ty);
        }
        let pos = |id: u32| {
            slot_ids
                .iter()
                .position(|&s| s == id)
                .ok_or(MotifSpecError::UnknownSlot(id))
        };
        let mut adj = [[false; MAX_MOTIF_NODES]; MAX_MOTIF_NODES];
        let mut resolved = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let (i, j) = (pos(a)?, pos(b)?);
            if i == j {
                return Err(MotifSpecError::SelfLoop(a));
            }
            if adj[i][j] {
                return Err(MotifSpecError::DuplicateEdge(a, b));
            }
            adj[i][j] = true;
            resolved.push((i, j));
        }
        resolved.sort_unstable();

        // Weak connectivity by flood fill over the undirected skeleton.
        let mut seen = [false; MAX_MOTIF_NODES];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..k {
                if !seen[v] && (adj[u][v] || adj[v][u]) {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        if seen[..k].iter().any(|s| !s) {
            return Err(MotifSpecError::Disconnected);
        }

        Ok(MotifPattern {
            name: name.to_string(),
            slot_ids,
            slot_types,
            edges: resolved,
            adj,
        })
    }

    /// Parses the motif text format:
    ///
    /// ```text
    /// name: M2
    /// nodes: 1:A 2:P 3:A
    /// edges: 1->2 3->2
    /// ```
    ///
    /// Sections may also be separated by `;` on one line. `*` is a wildcard type.
    /// A missing `name` defaults to `motif`.
    pub fn parse(text: &str) -> Result<Self, MotifSpecError> {
        let mut name = None;
        let mut nodes = None;
        let mut edges = None;
        for segment in text.split(['\n', ';']) {
            let segment = segment.trim();
            if segment.is_empty() || segment.starts_with('#') {
                continue;
            }
            let (key, rest) = segment
                .split_once(':')
                .ok_or_else(|| MotifSpecError::Syntax(format!("expected `key: value`, got `{segment}`")))?;
            let rest = rest.trim();
            let slot = match key.trim() {
                "name" => &mut name,
                "nodes" => &mut nodes,
                "edges" => &mut edges,
                other => return Err(MotifSpecError::Syntax(format!("unknown section `{other}`"))),
            };
            if slot.is_some() {
                return Err(MotifSpecError::Syntax(format!("section `{}` repeated", key.trim())));
            }
            *slot = Some(rest.to_string());
        }
        let nodes = nodes.ok_or(MotifSpecError::MissingSection("nodes"))?;
        let edges = edges.ok_or(MotifSpecError::MissingSection("edges"))?;

        let parse_id = |s: &str| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| MotifSpecError::Syntax(format!("bad slot id `{s}`")))
        };
        let mut slots = Vec::new();
        for tok in nodes.split_whitespace() {
            let (id, ty) = tok
                .split_once(':')
                .ok_or_else(|| MotifSpecError::Syntax(format!("expected `slot:TYPE`, got `{tok}`")))?;
            let ty = match ty {
                "" => return Err(MotifSpecError::Syntax(format!("missing type in `{tok}`"))),
                "*" => SlotType::Any,
                t => SlotType::Label(t.to_string()),
            };
            slots.push((parse_id(id)?, ty));
        }
        let mut pairs = Vec::new();
        for tok in edges.split_whitespace() {
            let (a, b) = tok
                .split_once("->")
                .ok_or_else(|| MotifSpecError::Syntax(format!("expected `src->dst`, got `{tok}`")))?;
            pairs.push((parse_id(a)?, parse_id(b)?));
        }
        let name = name.filter(|n| !n.is_empty()).unwrap_or_else(|| "motif".to_string());
        if name.chars().any(|c| c.is_whitespace() || c == '/') {
            return Err(MotifSpecError::Syntax(format!("invalid motif name `{name}`")));
        }
        Self::new(&name, slots, pairs)
    }

    /// Fails if a concrete slot type is absent from the graph's node types.
    pub fn check_types(&self, g: &HeteroGraph) -> Result<(), MotifSpecError> {
        for ty in &self.slot_types {
            if let Some(label) = ty.label() {
                if g.node_type_id(label).is_none() {
                    return Err(MotifSpecError::UnknownType(label.to_string()));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// Number of slots.
    pub fn k(&self) -> usize {
        self.slot_types.len()
    }

    pub fn slot_type(&self, slot: usize) -> &SlotType {
        &self.slot_types[slot]
    }

    /// Pattern edges as sorted slot-position pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    pub fn out_degree(&self, slot: usize) -> usize {
        (0..self.k()).filter(|&j| self.adj[slot][j]).count()
    }

    pub fn in_degree(&self, slot: usize) -> usize {
        (0..self.k()).filter(|&j| self.adj[j][slot]).count()
    }

    /// Number of slot permutations preserving edges and slot types.
    pub fn automorphism_count(&self) -> usize {
        let k = self.k();
        let mut perm: Vec<usize> = (0..k).collect();
        let mut count = 0;
        permutations(&mut perm, 0, &mut |p| {
            let types_ok = (0..k).all(|i| self.slot_types[i] == self.slot_types[p[i]]);
            let edges_ok = (0..k).all(|i| (0..k).all(|j| self.adj[i][j] == self.adj[p[i]][p[j]]));
            if types_ok && edges_ok {
                count += 1;
            }
        });
        count
    }
}

fn permutations(v: &mut Vec<usize>, start: usize, f: &mut dyn FnMut(&[usize])) {
    if start == v.len() {
        f(v);
        return;
    }
    for i in start..v.len() {
        v.swap(start, i);
        permutations(v, start + 1, f);
        v.swap(start, i);
    }
}

impl fmt::Display for MotifPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "name: {}", self.name)?;
        write!(f, "nodes:")?;
        for (id, ty) in self.slot_ids.iter().zip(&self.slot_types) {
            write!(f, " {id}:{ty}")?;
        }
        write!(f, "\nedges:")?;
        for &(i, j) in &self.edges {
            write!(f, " {}->{}", self.slot_ids[i], self.slot_ids[j])?;
        }
        writeln!(f)
    }
}
