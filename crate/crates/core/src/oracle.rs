//! Solver contracts shared by every reduction, plus the solution carriers for the
//! partition-type problems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pairwise_disjoint, BipartiteGraph, Graph, SidedSet, Subgraph, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Dks,
    Bdks,
    Dkc,
    Gp,
    Mbcs,
}

/// What a solver claims about itself. `alpha` is used for reporting and for the
/// size thresholds some reductions derive from it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleDescriptor {
    pub kind: ProblemKind,
    pub name: String,
    pub alpha: f64,
    pub exact: bool,
    pub ceiling: Option<f64>,
}

impl OracleDescriptor {
    pub fn exact(kind: ProblemKind, name: &str, ceiling: f64) -> Self {
        OracleDescriptor { kind, name: name.into(), alpha: 1.0, exact: true, ceiling: Some(ceiling) }
    }

    pub fn heuristic(kind: ProblemKind, name: &str, alpha: f64) -> Self {
        OracleDescriptor { kind, name: name.into(), alpha: alpha.max(1.0), exact: false, ceiling: None }
    }
}

pub trait DksOracle: Sync {
    fn descriptor(&self) -> OracleDescriptor;
    fn solve(&self, g: &Graph, k: usize) -> Result<VertexSet>;
}

pub trait BdksOracle: Sync {
    fn descriptor(&self) -> OracleDescriptor;
    fn solve(&self, g: &BipartiteGraph, k1: usize, k2: usize) -> Result<SidedSet>;

    /// One answer per `(k1, k2)` pair, in order.
    fn solve_many(&self, g: &BipartiteGraph, pairs: &[(usize, usize)]) -> Result<Vec<SidedSet>> {
        pairs.iter().map(|&(k1, k2)| self.solve(g, k1, k2)).collect()
    }
}

pub trait DkcOracle: Sync {
    fn descriptor(&self) -> OracleDescriptor;
    /// Requires `k` to divide `g.n()`.
    fn solve(&self, g: &Graph, k: usize) -> Result<DkcSolution>;
}

pub trait GpOracle: Sync {
    fn descriptor(&self) -> OracleDescriptor;
    fn solve(&self, g: &Graph, r: usize, h: usize) -> Result<GpSolution>;
}

pub trait MbcsOracle: Sync {
    fn descriptor(&self) -> OracleDescriptor;
    fn solve(&self, g: &Graph, budget: u64) -> Result<Subgraph>;
}

/// `n/k` disjoint blocks of exactly `k` vertices covering the graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DkcSolution {
    pub parts: Vec<VertexSet>,
    pub value: usize,
}

impl DkcSolution {
    pub fn from_parts(g: &Graph, parts: Vec<VertexSet>) -> Result<Self> {
        let mut value = 0;
        for p in &parts {
            value += g.induced_edge_count(p)?;
        }
        Ok(DkcSolution { parts, value })
    }

    pub fn validate(&self, g: &Graph, k: usize) -> Result<()> {
        if k == 0 || !g.n().is_multiple_of(k) || self.parts.len() != g.n() / k {
            return Err(Error::Invariant(format!("expected {} blocks of size {k}", g.n() / k.max(1))));
        }
        let mut seen = vec![false; g.n()];
        let mut value = 0;
        for p in &self.parts {
            if p.len() != k {
                return Err(Error::Invariant(format!("block of size {} instead of {k}", p.len())));
            }
            g.check_set(p)?;
            for v in p.iter() {
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::Invariant(format!("vertex {v} in two blocks")));
                }
            }
            value += g.induced_edge_count(p)?;
        }
        if value != self.value {
            return Err(Error::Invariant(format!("recorded value {} but blocks span {value}", self.value)));
        }
        Ok(())
    }
}

/// Up to `r` vertex-disjoint subgraphs of at most `h` edges each, padded with empty pieces.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GpSolution {
    pub pieces: Vec<Subgraph>,
    pub value: usize,
}

impl GpSolution {
    /// Drops empty pieces and pads back to `r`.
    pub fn new(mut pieces: Vec<Subgraph>, r: usize) -> Self {
        pieces.retain(|p| p.edge_count() > 0);
        pieces.sort_by(|a, b| b.edge_count().cmp(&a.edge_count()).then_with(|| a.vertices().cmp(b.vertices())));
        let value = pieces.iter().map(Subgraph::edge_count).sum();
        while pieces.len() < r {
            pieces.push(Subgraph::empty());
        }
        GpSolution { pieces, value }
    }

    pub fn empty(r: usize) -> Self {
        Self::new(Vec::new(), r)
    }

    pub fn validate(&self, g: &Graph, r: usize, h: usize) -> Result<()> {
        if self.pieces.len() > r {
            return Err(Error::Invariant(format!("{} pieces, at most {r} allowed", self.pieces.len())));
        }
        for p in &self.pieces {
            p.validate(g)?;
            if p.edge_count() > h {
                return Err(Error::Invariant(format!("piece with {} edges exceeds {h}", p.edge_count())));
            }
        }
        if !pairwise_disjoint(&self.pieces) {
            return Err(Error::Invariant("pieces share a vertex".into()));
        }
        let value: usize = self.pieces.iter().map(Subgraph::edge_count).sum();
        if value != self.value {
            return Err(Error::Invariant(format!("recorded value {} but pieces hold {value}", self.value)));
        }
        Ok(())
    }
}
