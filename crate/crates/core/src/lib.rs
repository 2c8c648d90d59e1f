//! Approximation-preserving reductions among densest-subgraph style problems.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::too_many_arguments)]

pub mod csp;
pub mod dkc_gp;
pub mod dks;
pub mod error;
pub mod gp_mbcs;
pub mod graph;
pub mod inflate;
pub mod lp;
pub mod oracle;
pub mod profile;
pub mod shrink;
pub mod solvers;

pub use error::{Error, ParseError, Result};
pub use graph::{parse_bipartite, parse_graph, BipartiteGraph, Edge, Graph, SidedSet, Subgraph, VertexSet};
pub use profile::Profile;
