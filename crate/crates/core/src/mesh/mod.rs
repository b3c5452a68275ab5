//! Binary/quad-tree meshes with hanging nodes, neighbor queries and a
//! one-deep ghost layer.

mod topology;
mod tree;

pub use topology::{Face, FaceSide, GhostSpec, NbrEntry, Src, Topology};
pub use tree::{Cell, CellId, Domain, GhostCell, Neighbor, NeighborRef, Refinement, Side, TreeMesh};

pub(crate) use tree::sector_contains;
