use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::pattern::{MotifPattern, SlotType, MAX_MOTIF_NODES};
use crate::error::{Error, Result};
use crate::graph::{HeteroGraph, NodeIx};

/// One induced, type-consistent occurrence of a pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MotifInstance {
    assignment: Vec<NodeIx>,
    nodes: Vec<NodeIx>,
}

impl MotifInstance {
    /// Graph node for each pattern slot, in slot order.
    pub fn assignment(&self) -> &[NodeIx] {
        &self.assignment
    }

    /// The instance's node set, sorted. Together with the pattern name this is
    /// the instance's canonical key.
    pub fn nodes(&self) -> &[NodeIx] {
        &self.nodes
    }
}

/// Deduplicated instances of one pattern, sorted by node set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceSet {
    pattern: MotifPattern,
    instances: Vec<MotifInstance>,
}

impl InstanceSet {
    pub fn pattern(&self) -> &MotifPattern {
        &self.pattern
    }

    pub fn instances(&self) -> &[MotifInstance] {
        &self.instances
    }

    pub fn frequency(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }
}

/// Raw motif frequency: the number of distinct instances.
pub fn motif_frequency(inst: &InstanceSet) -> usize {
    inst.frequency()
}

/// Search plan: slots in visiting order, each after the first tied to an
/// already placed slot through a pattern edge.
struct Plan {
    order: Vec<usize>,
    // (anchor slot, true if the pattern edge is anchor -> slot)
    anchors: Vec<Option<(usize, bool)>>,
    types: Vec<Option<u32>>,
    min_out: Vec<usize>,
    min_in: Vec<usize>,
}

impl Plan {
    fn new(m: &MotifPattern, types: Vec<Option<u32>>) -> Plan {
        let k = m.k();
        let score = |s: usize| (m.out_degree(s) + m.in_degree(s), types[s].is_some());
        let first = (0..k).max_by_key(|&s| (score(s), std::cmp::Reverse(s))).unwrap();
        let mut order = vec![first];
        let mut placed = [false; MAX_MOTIF_NODES];
        placed[first] = true;
        while order.len() < k {
            let next = (0..k)
                .filter(|&s| !placed[s])
                .max_by_key(|&s| {
                    let links = order
                        .iter()
                        .filter(|&&p| m.has_edge(p, s) || m.has_edge(s, p))
                        .count();
                    (links, score(s), std::cmp::Reverse(s))
                })
                .unwrap();
            placed[next] = true;
            order.push(next);
        }
        let anchors = order
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                order[..i].iter().find_map(|&p| {
                    if m.has_edge(p, s) {
                        Some((p, true))
                    } else if m.has_edge(s, p) {
                        Some((p, false))
                    } else {
                        None
                    }
                })
            })
            .collect();
        Plan {
            order,
            anchors,
            types,
            min_out: (0..k).map(|s| m.out_degree(s)).collect(),
            min_in: (0..k).map(|s| m.in_degree(s)).collect(),
        }
    }
}

struct Search<'a> {
    g: &'a HeteroGraph,
    m: &'a MotifPattern,
    plan: &'a Plan,
    assign: [NodeIx; MAX_MOTIF_NODES],
    found: Vec<(Vec<NodeIx>, Vec<NodeIx>)>,
}

impl Search<'_> {
    #[inline]
    fn admissible(&self, depth: usize, v: NodeIx) -> bool {
        let slot = self.plan.order[depth];
        if let Some(t) = self.plan.types[slot] {
            if self.g.node_type(v) != t {
                return false;
            }
        }
        if self.g.out_degree(v) < self.plan.min_out[slot] || self.g.in_degree(v) < self.plan.min_in[slot] {
            return false;
        }
        for &prev in &self.plan.order[..depth] {
            let u = self.assign[prev];
            if u == v {
                return false;
            }
            if self.g.has_arc(v, u) != self.m.has_edge(slot, prev)
                || self.g.has_arc(u, v) != self.m.has_edge(prev, slot)
            {
                return false;
            }
        }
        true
    }

    fn extend(&mut self, depth: usize) {
        let k = self.m.k();
        if depth == k {
            let assignment = self.assign[..k].to_vec();
            let mut nodes = assignment.clone();
            nodes.sort_unstable();
            self.found.push((nodes, assignment));
            return;
        }
        let slot = self.plan.order[depth];
        let (anchor, forward) = self.plan.anchors[depth].expect("connected pattern");
        let a = self.assign[anchor];
        let candidates = if forward {
            self.g.out_neighbors(a)
        } else {
            self.g.in_neighbors(a)
        };
        for &v in candidates {
            if self.admissible(depth, v) {
                self.assign[slot] = v;
                self.extend(depth + 1);
            }
        }
    }
}

fn search_from(g: &HeteroGraph, m: &MotifPattern, plan: &Plan, root: NodeIx) -> Vec<(Vec<NodeIx>, Vec<NodeIx>)> {
    let mut s = Search {
        g,
        m,
        plan,
        assign: [0; MAX_MOTIF_NODES],
        found: Vec::new(),
    };
    if s.admissible(0, root) {
        s.assign[plan.order[0]] = root;
        s.extend(1);
    }
    s.found
}

/// Finds every induced, type-consistent occurrence of `m` in `g`.
///
/// Occurrences over the same node set differ only by a pattern automorphism and
/// are reported once, keeping the lexicographically smallest slot assignment.
/// The search over root candidates runs on the current rayon pool when the
/// `parallel` feature is enabled; the result does not depend on the pool size.
pub fn enumerate_instances(g: &HeteroGraph, m: &MotifPattern) -> InstanceSet {
    let mut types = Vec::with_capacity(m.k());
    for s in 0..m.k() {
        match m.slot_type(s) {
            SlotType::Any => types.push(None),
            SlotType::Label(l) => match g.node_type_id(l) {
                Some(t) => types.push(Some(t)),
                None => {
                    log::warn!("motif `{}`: node type `{l}` absent from graph; no instances", m.name());
                    return InstanceSet {
                        pattern: m.clone(),
                        instances: Vec::new(),
                    };
                }
            },
        }
    }
    let plan = Plan::new(m, types);
    let roots: Vec<NodeIx> = match plan.types[plan.order[0]] {
        Some(t) => g.nodes_of_type(t),
        None => (0..g.num_nodes() as NodeIx).collect(),
    };

    #[cfg(feature = "parallel")]
    let mut found: Vec<(Vec<NodeIx>, Vec<NodeIx>)> = roots
        .par_iter()
        .flat_map_iter(|&r| search_from(g, m, &plan, r))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let mut found: Vec<(Vec<NodeIx>, Vec<NodeIx>)> = roots
        .iter()
        .flat_map(|&r| search_from(g, m, &plan, r))
        .collect();

    found.sort_unstable();
    found.dedup_by(|later, earlier| later.0 == earlier.0);
    InstanceSet {
        pattern: m.clone(),
        instances: found
            .into_iter()
            .map(|(nodes, assignment)| MotifInstance { assignment, nodes })
            .collect(),
    }
}

/// Writes one instance per line as tab-separated node ids in slot order.
pub fn write_instances(inst: &InstanceSet, g: &HeteroGraph, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(
        w,
        "# motif {} k={} instances={}",
        inst.pattern.name(),
        inst.pattern.k(),
        inst.frequency()
    )
    .map_err(io)?;
    for i in &inst.instances {
        let row: Vec<&str> = i.assignment.iter().map(|&u| g.node_name(u)).collect();
        writeln!(w, "{}", row.join("\t")).map_err(io)?;
    }
    w.flush().map_err(io)
}
