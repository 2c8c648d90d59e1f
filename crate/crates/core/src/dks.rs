//! Densest k-subgraph solvers (exact and greedy) for the general and bipartite
//! variants, and the two bridges between them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Graph, SidedSet, VertexSet};
use crate::oracle::{BdksOracle, DksOracle, OracleDescriptor, ProblemKind};
use crate::shrink::peel_to_count;

pub const DEFAULT_DKS_CEILING: f64 = 1e12;
pub const DEFAULT_BDKS_CEILING: f64 = 1e7;

/// Twin classes: vertices with equal open neighborhoods, or failing that equal
/// closed neighborhoods. Returns the class of each vertex and the class sizes.
pub fn twin_classes(g: &Graph) -> (Vec<usize>, Vec<usize>) {
    use std::collections::HashMap;
    let n = g.n();
    let mut class = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    let mut open: HashMap<&[usize], usize> = HashMap::new();
    let mut by_open: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let id = *open.entry(g.neighbors(v)).or_insert_with(|| {
            by_open.push(Vec::new());
            by_open.len() - 1
        });
        by_open[id].push(v);
    }
    let mut closed: HashMap<Vec<usize>, usize> = HashMap::new();
    for group in by_open {
        if group.len() > 1 {
            for &v in &group {
                class[v] = sizes.len();
            }
            sizes.push(group.len());
            continue;
        }
        let v = group[0];
        let mut key = g.neighbors(v).to_vec();
        let pos = key.partition_point(|&u| u < v);
        key.insert(pos, v);
        match closed.get(&key) {
            Some(&c) => {
                class[v] = c;
                sizes[c] += 1;
            }
            None => {
                closed.insert(key, sizes.len());
                class[v] = sizes.len();
                sizes.push(1);
            }
        }
    }
    (class, sizes)
}

struct DksSearch<'a> {
    g: &'a Graph,
    k: usize,
    class: Vec<usize>,
    blocked: Vec<bool>,
    to_chosen: Vec<usize>,
    chosen: Vec<usize>,
    threshold: usize,
    best: Option<Vec<usize>>,
    gains: Vec<usize>,
}

impl DksSearch<'_> {
    fn bound_allows(&mut self, i: usize, cur: usize) -> bool {
        let rem = self.k - self.chosen.len();
        self.gains.clear();
        for j in i..self.g.n() {
            if self.blocked[self.class[j]] {
                continue;
            }
            let nb = self.g.neighbors(j);
            let pool = nb.len() - nb.partition_point(|&u| u < i);
            self.gains.push(2 * self.to_chosen[j] + pool.min(rem - 1));
        }
        if self.gains.len() < rem {
            return false;
        }
        let gains = &mut self.gains;
        if rem < gains.len() {
            gains.select_nth_unstable_by(rem - 1, |a, b| b.cmp(a));
        }
        let extra: usize = gains[..rem].iter().sum();
        2 * cur + extra > 2 * self.threshold || (self.best.is_none() && 2 * cur + extra >= 2 * self.threshold)
    }

    fn dfs(&mut self, i: usize, cur: usize) {
        if self.chosen.len() == self.k {
            if self.best.is_none() && cur >= self.threshold || cur > self.threshold {
                self.threshold = cur;
                self.best = Some(self.chosen.clone());
            }
            return;
        }
        if i == self.g.n() || !self.bound_allows(i, cur) {
            return;
        }
        let c = self.class[i];
        if self.blocked[c] {
            self.dfs(i + 1, cur);
            return;
        }
        let gain = self.to_chosen[i];
        for &u in self.g.neighbors(i) {
            self.to_chosen[u] += 1;
        }
        self.chosen.push(i);
        self.dfs(i + 1, cur + gain);
        self.chosen.pop();
        for &u in self.g.neighbors(i) {
            self.to_chosen[u] -= 1;
        }
        self.blocked[c] = true;
        self.dfs(i + 1, cur);
        self.blocked[c] = false;
    }
}

/// Exact densest k-subgraph by branch and bound with twin-symmetry breaking.
/// Among optimal sets the lexicographically smallest is returned.
pub fn solve_dks_exact(g: &Graph, k: usize, ceiling: f64) -> Result<VertexSet> {
    let n = g.n();
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    if k == n {
        return Ok(VertexSet::full(n));
    }
    if k == 0 {
        return Ok(VertexSet::empty());
    }
    let (class, sizes) = twin_classes(g);
    let space: f64 = sizes.iter().map(|&s| (s.min(k) + 1) as f64).product();
    if space > ceiling {
        return Err(Error::CeilingExceeded { what: "exact DkS", size: space, ceiling });
    }
    let greedy = peel_to_count(g, &VertexSet::full(n), k)?;
    let floor = g.induced_edge_count(&greedy)?;
    let classes = sizes.len();
    let mut search = DksSearch {
        g,
        k,
        class,
        blocked: vec![false; classes],
        to_chosen: vec![0; n],
        chosen: Vec::with_capacity(k),
        threshold: floor,
        best: None,
        gains: Vec::with_capacity(n),
    };
    search.dfs(0, 0);
    Ok(VertexSet::new(search.best.unwrap_or_else(|| greedy.into_vec())))
}

/// Lowest-degree peeling from the whole vertex set down to `k`.
pub fn greedy_dks(g: &Graph, k: usize) -> Result<VertexSet> {
    if k > g.n() {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {}", g.n())));
    }
    peel_to_count(g, &VertexSet::full(g.n()), k)
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Top `k` ids of `counts` by (count desc, id asc), plus their count total.
fn top_k(counts: &[usize], k: usize, order: &mut Vec<usize>) -> (usize, Vec<usize>) {
    order.clear();
    order.extend(0..counts.len());
    order.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
    let mut pick = order[..k].to_vec();
    pick.sort_unstable();
    (pick.iter().map(|&v| counts[v]).sum(), pick)
}

type SidedPick = (usize, Vec<usize>, Vec<usize>);

/// Exact bipartite densest subgraph for several `(k1, k2)` at once, by enumerating
/// subsets of the smaller side and completing the other side greedily.
pub fn solve_bdks_exact_many(g: &BipartiteGraph, pairs: &[(usize, usize)], ceiling: f64) -> Result<Vec<SidedSet>> {
    for &(k1, k2) in pairs {
        if k1 > g.na() || k2 > g.nb() {
            return Err(Error::InvalidParameter(format!(
                "side quotas ({k1}, {k2}) exceed sides ({}, {})",
                g.na(),
                g.nb()
            )));
        }
    }
    let flip = g.na() > g.nb();
    let (small, large) = if flip { (g.nb(), g.na()) } else { (g.na(), g.nb()) };
    let nbrs = |v: usize| if flip { g.neighbors_b(v) } else { g.neighbors_a(v) };
    let oriented: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| if flip { (b, a) } else { (a, b) }).collect();
    let mut sizes: Vec<usize> = oriented.iter().map(|p| p.0).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let space: f64 = sizes.iter().map(|&s| binomial(small, s)).sum();
    if space > ceiling {
        return Err(Error::CeilingExceeded { what: "exact BDkS", size: space, ceiling });
    }
    let mut best: Vec<Option<SidedPick>> = vec![None; oriented.len()];
    let mut counts = vec![0usize; large];
    let mut order = Vec::with_capacity(large);
    for &s in &sizes {
        let mut combo: Vec<usize> = (0..s).collect();
        loop {
            counts.iter_mut().for_each(|c| *c = 0);
            for &v in &combo {
                for &u in nbrs(v) {
                    counts[u] += 1;
                }
            }
            for (slot, &(ks, kl)) in best.iter_mut().zip(&oriented) {
                if ks != s {
                    continue;
                }
                let (value, pick) = top_k(&counts, kl, &mut order);
                if slot.as_ref().is_none_or(|b| value > b.0) {
                    *slot = Some((value, combo.clone(), pick));
                }
            }
            if !next_combination(&mut combo, small) {
                break;
            }
        }
    }
    Ok(best
        .into_iter()
        .map(|b| {
            let (_, s, l) = b.expect("every size was enumerated");
            if flip {
                SidedSet::new(l, s)
            } else {
                SidedSet::new(s, l)
            }
        })
        .collect())
}

/// Advances `combo` to the next `|combo|`-subset of `0..n` in lexicographic order.
pub(crate) fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub fn solve_bdks_exact(g: &BipartiteGraph, k1: usize, k2: usize, ceiling: f64) -> Result<SidedSet> {
    Ok(solve_bdks_exact_many(g, &[(k1, k2)], ceiling)?.remove(0))
}

/// Peels lowest-degree vertices from whichever sides are still above quota.
pub fn greedy_bdks(g: &BipartiteGraph, k1: usize, k2: usize) -> Result<SidedSet> {
    if k1 > g.na() || k2 > g.nb() {
        return Err(Error::InvalidParameter(format!("side quotas ({k1}, {k2}) exceed sides")));
    }
    let h = g.to_graph();
    let na = g.na();
    let mut alive = vec![true; h.n()];
    let mut deg: Vec<usize> = (0..h.n()).map(|v| h.degree(v)).collect();
    let (mut left_a, mut left_b) = (na, g.nb());
    while left_a > k1 || left_b > k2 {
        let victim = (0..h.n())
            .filter(|&v| alive[v] && if v < na { left_a > k1 } else { left_b > k2 })
            .min_by_key(|&v| (deg[v], v))
            .expect("a side is above quota");
        alive[victim] = false;
        for &u in h.neighbors(victim) {
            if alive[u] {
                deg[u] -= 1;
            }
        }
        if victim < na {
            left_a -= 1;
        } else {
            left_b -= 1;
        }
    }
    let a = (0..na).filter(|&v| alive[v]).collect();
    let b = (na..h.n()).filter(|&v| alive[v]).map(|v| v - na).collect();
    Ok(SidedSet::new(a, b))
}

/// A reduction's answer together with the value its sub-oracle reported.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bridge<T> {
    pub solution: T,
    pub value: usize,
    pub oracle_value: usize,
}

/// Copy blow-up: `k2` copies of each A-vertex, then `k1` copies of each B-vertex,
/// copies of one vertex consecutive. Every original edge becomes a complete
/// bipartite graph between the two copy sets.
pub fn blow_up(g: &BipartiteGraph, k1: usize, k2: usize) -> Graph {
    let off = g.na() * k2;
    let n = off + g.nb() * k1;
    let mut edges = Vec::with_capacity(g.m() * k1 * k2);
    for &(a, b) in g.edges() {
        for i in 0..k2 {
            for j in 0..k1 {
                edges.push((a * k2 + i, off + b * k1 + j));
            }
        }
    }
    Graph::new(n, edges).expect("blow-up edges are distinct")
}

fn pad(chosen: &mut Vec<usize>, quota: usize, side: usize) {
    let mut v = 0;
    while chosen.len() < quota && v < side {
        if !chosen.contains(&v) {
            chosen.push(v);
        }
        v += 1;
    }
    chosen.sort_unstable();
}

/// Bipartite densest subgraph through a general densest-subgraph solver run on the
/// copy blow-up, followed by the interleaved split of its answer.
pub fn bdks_via_dks(g: &BipartiteGraph, k1: usize, k2: usize, oracle: &dyn DksOracle) -> Result<Bridge<SidedSet>> {
    if k1 > g.na() || k2 > g.nb() {
        return Err(Error::InvalidParameter(format!("side quotas ({k1}, {k2}) exceed sides")));
    }
    if k1 == 0 || k2 == 0 {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        pad(&mut a, k1, g.na());
        pad(&mut b, k2, g.nb());
        return Ok(Bridge { solution: SidedSet::new(a, b), value: 0, oracle_value: 0 });
    }
    let h = blow_up(g, k1, k2);
    let k = (2 * k1 * k2).min(h.n());
    let w = oracle.solve(&h, k)?;
    if w.len() != k {
        return Err(Error::Oracle(format!("DkS oracle returned {} vertices, asked for {k}", w.len())));
    }
    h.check_set(&w)?;
    let oracle_value = h.induced_edge_count(&w)?;
    let off = g.na() * k2;
    let wa: Vec<usize> = w.iter().filter(|&v| v < off).collect();
    let wb: Vec<usize> = w.iter().filter(|&v| v >= off).collect();
    let mut parts_a = vec![Vec::new(); 2 * k2];
    for (idx, &v) in wa.iter().enumerate() {
        parts_a[idx % (2 * k2)].push(v / k2);
    }
    let mut parts_b = vec![Vec::new(); 2 * k1];
    for (idx, &v) in wb.iter().enumerate() {
        parts_b[idx % (2 * k1)].push((v - off) / k1);
    }
    let mut best: Option<(usize, SidedSet)> = None;
    for pa in &parts_a {
        for pb in &parts_b {
            let s = SidedSet::new(pa.clone(), pb.clone());
            let val = g.edge_count(&s);
            if best.as_ref().is_none_or(|b| val > b.0) {
                best = Some((val, s));
            }
        }
    }
    let (value, s) = best.expect("at least one part pair");
    let (mut a, mut b) = (s.a, s.b);
    pad(&mut a, k1, g.na());
    pad(&mut b, k2, g.nb());
    let solution = SidedSet::new(a, b);
    let value = value.max(g.edge_count(&solution));
    Ok(Bridge { solution, value, oracle_value })
}

/// The doubled bipartite graph: two copies of the vertex set, with `(u, v)` and
/// `(v, u)` across for every edge.
pub fn double_cover(g: &Graph) -> BipartiteGraph {
    let edges = g.edges().iter().flat_map(|&(u, v)| [(u, v), (v, u)]);
    BipartiteGraph::new(g.n(), g.n(), edges).expect("double cover edges are distinct")
}

/// Densest k-subgraph through a bipartite solver on the double cover, projecting
/// its answer back and peeling to exactly `k` vertices.
pub fn dks_via_bdks(g: &Graph, k: usize, oracle: &dyn BdksOracle) -> Result<Bridge<VertexSet>> {
    if k > g.n() {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {}", g.n())));
    }
    let h = double_cover(g);
    let s = oracle.solve(&h, k, k)?;
    h.check(&s)?;
    if s.a.len() > k || s.b.len() > k {
        return Err(Error::Oracle("BDkS oracle exceeded its side quotas".into()));
    }
    let oracle_value = h.edge_count(&s);
    let mut u: Vec<usize> = s.a.iter().chain(&s.b).copied().collect();
    u.sort_unstable();
    u.dedup();
    pad(&mut u, k, g.n());
    let out = peel_to_count(g, &VertexSet::new(u), k)?;
    let value = g.induced_edge_count(&out)?;
    Ok(Bridge { solution: out, value, oracle_value })
}

#[derive(Clone, Copy, Debug)]
pub struct ExactDks {
    pub ceiling: f64,
}

impl Default for ExactDks {
    fn default() -> Self {
        ExactDks { ceiling: DEFAULT_DKS_CEILING }
    }
}

impl DksOracle for ExactDks {
    fn descriptor(&self) -> OracleDescriptor {
        OracleDescriptor::exact(ProblemKind::Dks, "exact", self.ceiling)
    }

    fn solve(&self, g: &Graph, k: usize) -> Result<VertexSet> {
        solve_dks_exact(g, k, self.ceiling)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct GreedyDks;

impl DksOracle for GreedyDks {
    fn descriptor(&self) -> OracleDescriptor {
        OracleDescriptor::heuristic(ProblemKind::Dks, "greedy", f64::INFINITY)
    }

    fn solve(&self, g: &Graph, k: usize) -> Result<VertexSet> {
        greedy_dks(g, k)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ExactBdks {
    pub ceiling: f64,
}

impl Default for ExactBdks {
    fn default() -> Self {
        ExactBdks { ceiling: DEFAULT_BDKS_CEILING }
    }
}

impl BdksOracle for ExactBdks {
    fn descriptor(&self) -> OracleDescriptor {
        OracleDescriptor::exact(ProblemKind::Bdks, "exact", self.ceiling)
    }

    fn solve(&self, g: &BipartiteGraph, k1: usize, k2: usize) -> Result<SidedSet> {
        solve_bdks_exact(g, k1, k2, self.ceiling)
    }

    fn solve_many(&self, g: &BipartiteGraph, pairs: &[(usize, usize)]) -> Result<Vec<SidedSet>> {
        solve_bdks_exact_many(g, pairs, self.ceiling)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct GreedyBdks;

impl BdksOracle for GreedyBdks {
    fn descriptor(&self) -> OracleDescriptor {
        OracleDescriptor::heuristic(ProblemKind::Bdks, "greedy", f64::INFINITY)
    }

    fn solve(&self, g: &BipartiteGraph, k1: usize, k2: usize) -> Result<SidedSet> {
        greedy_bdks(g, k1, k2)
    }
}

/// A BDkS solver backed by a DkS solver through the copy blow-up.
pub struct BdksFromDks(pub Box<dyn DksOracle>);

impl BdksOracle for BdksFromDks {
    fn descriptor(&self) -> OracleDescriptor {
        let inner = self.0.descriptor();
        OracleDescriptor {
            kind: ProblemKind::Bdks,
            name: format!("via-dks({})", inner.name),
            alpha: 4.0 * inner.alpha,
            exact: false,
            ceiling: inner.ceiling,
        }
    }

    fn solve(&self, g: &BipartiteGraph, k1: usize, k2: usize) -> Result<SidedSet> {
        Ok(bdks_via_dks(g, k1, k2, self.0.as_ref())?.solution)
    }
}

/// A DkS solver backed by a BDkS solver through the double cover.
pub struct DksFromBdks(pub Box<dyn BdksOracle>);

impl DksOracle for DksFromBdks {
    fn descriptor(&self) -> OracleDescriptor {
        let inner = self.0.descriptor();
        OracleDescriptor {
            kind: ProblemKind::Dks,
            name: format!("via-bdks({})", inner.name),
            alpha: 8.0 * inner.alpha,
            exact: false,
            ceiling: inner.ceiling,
        }
    }

    fn solve(&self, g: &Graph, k: usize) -> Result<VertexSet> {
        Ok(dks_via_bdks(g, k, self.0.as_ref())?.solution)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn val(g: &Graph, s: &VertexSet) -> usize {
        g.induced_edge_count(s).unwrap()
    }

    #[test]
    fn exact_dks_examples() {
        let k4 = Graph::complete(4);
        let s = solve_dks_exact(&k4, 3, 1e9).unwrap();
        assert_eq!(s.as_slice(), &[0, 1, 2]);
        assert_eq!(val(&Graph::path(4), &solve_dks_exact(&Graph::path(4), 2, 1e9).unwrap()), 1);
        let c5 = Graph::cycle(5);
        let s = solve_dks_exact(&c5, 3, 1e9).unwrap();
        assert_eq!(val(&c5, &s), 2);
        assert_eq!(s.as_slice(), &[0, 1, 2]);
    }

    #[test]
    fn exact_dks_errors() {
        assert!(matches!(solve_dks_exact(&Graph::path(3), 4, 1e9), Err(Error::InvalidParameter(_))));
        assert!(matches!(solve_dks_exact(&Graph::path(30), 10, 10.0), Err(Error::CeilingExceeded { .. })));
    }

    #[test]
    fn twins_found() {
        let (class, sizes) = twin_classes(&Graph::star(3));
        assert_eq!(class[1], class[2]);
        assert_eq!(sizes.len(), 2);
        let (class, _) = twin_classes(&Graph::complete(3));
        assert!(class.iter().all(|&c| c == class[0]));
    }

    #[test]
    fn exact_bdks_examples() {
        let e = BipartiteGraph::new(1, 1, [(0, 0)]).unwrap();
        assert_eq!(e.edge_count(&solve_bdks_exact(&e, 1, 1, 1e6).unwrap()), 1);
        let c4 = BipartiteGraph::new(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        assert_eq!(c4.edge_count(&solve_bdks_exact(&c4, 1, 2, 1e6).unwrap()), 2);
        assert_eq!(c4.edge_count(&solve_bdks_exact(&c4, 2, 2, 1e6).unwrap()), 4);
    }

    #[test]
    fn greedy_examples() {
        let k4 = Graph::complete(4);
        assert_eq!(val(&k4, &greedy_dks(&k4, 4).unwrap()), 6);
        let k4i = k4.with_isolated(1);
        let s = greedy_dks(&k4i, 4).unwrap();
        assert_eq!(s.as_slice(), &[0, 1, 2, 3]);
        assert_eq!(val(&Graph::path(3), &greedy_dks(&Graph::path(3), 2).unwrap()), 1);
    }

    #[test]
    fn bridges() {
        let e = BipartiteGraph::new(1, 1, [(0, 0)]).unwrap();
        assert_eq!(bdks_via_dks(&e, 1, 1, &ExactDks::default()).unwrap().value, 1);
        let c4 = BipartiteGraph::new(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        let out = bdks_via_dks(&c4, 1, 2, &ExactDks::default()).unwrap();
        assert_eq!(out.value, 2);
        assert!(bdks_via_dks(&c4, 2, 2, &ExactDks::default()).unwrap().value >= 1);

        let edge = Graph::path(2);
        assert_eq!(dks_via_bdks(&edge, 2, &ExactBdks::default()).unwrap().value, 1);
        let k4 = Graph::complete(4);
        let out = dks_via_bdks(&k4, 3, &ExactBdks::default()).unwrap();
        assert_eq!((out.solution.len(), out.value), (3, 3));
        assert_eq!(dks_via_bdks(&Graph::empty(4), 2, &ExactBdks::default()).unwrap().value, 0);
    }

    #[test]
    fn combinations_enumerate() {
        let mut c = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut c, 4) {
            count += 1;
        }
        assert_eq!(count, 6);
    }
}
