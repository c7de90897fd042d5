//! Motif patterns, induced-subgraph instance enumeration, and motif co-occurrence
//! matrices.

mod adjacency;
mod enumerate;
mod pattern;

pub use adjacency::{build_motif_adjacency, read_adjacency, write_adjacency, AdjacencyMode, MotifAdjacency};
pub use enumerate::{enumerate_instances, motif_frequency, write_instances, InstanceSet, MotifInstance};
pub use pattern::{MotifPattern, SlotType, MAX_MOTIF_NODES, MIN_MOTIF_NODES};
