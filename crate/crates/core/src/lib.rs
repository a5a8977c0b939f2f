//! Subgraph-1-WL isomorphism testing, rooted-subgraph extraction,
//! SubgraphDrop sampling and a deterministic forward-only GNN-AK(+) engine.

pub mod canon;
pub mod error;
pub mod extract;
pub mod forward;
pub mod generators;
pub mod graph;
pub mod hash;
pub mod io;
pub mod oracles;
pub mod sampling;
pub mod suite;
pub mod wl;

pub use error::{Error, Result};
pub use graph::{induced_subgraph, Graph, NodeSet};
