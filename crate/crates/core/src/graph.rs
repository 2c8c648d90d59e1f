//! Simple undirected and bipartite graphs, vertex sets, explicit-edge subgraphs,
//! and the plain-text edge-list formats.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};

pub type Edge = (usize, usize);

fn canon(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Strictly increasing list of vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        VertexSet(ids)
    }

    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    pub fn full(n: usize) -> Self {
        VertexSet((0..n).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        self.iter().chain(other.iter()).collect()
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.iter().filter(|&v| !other.contains(v)).collect())
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::new(iter.into_iter().collect())
    }
}

/// Immutable simple graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut list = Vec::new();
        let mut seen = HashSet::new();
        for (u, v) in edges {
            if u >= n || v >= n || u == v || !seen.insert(canon(u, v)) {
                return Err(Error::InvalidEdge(u, v));
            }
            list.push(canon(u, v));
        }
        Ok(Self::from_canonical(n, list))
    }

    /// Builds a graph from an edge multiset, merging duplicates. Self-loops are still rejected.
    pub fn from_edge_set(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let set: BTreeSet<Edge> = edges.into_iter().map(|(u, v)| canon(u, v)).collect();
        Self::new(n, set)
    }

    fn from_canonical(n: usize, mut edges: Vec<Edge>) -> Self {
        edges.sort_unstable();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_canonical(n, Vec::new())
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::from_canonical(n, edges)
    }

    pub fn path(n: usize) -> Self {
        Self::from_canonical(n, (1..n).map(|v| (v - 1, v)).collect())
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        let mut edges: Vec<Edge> = (1..n).map(|v| (v - 1, v)).collect();
        edges.push((0, n - 1));
        Self::from_canonical(n, edges)
    }

    /// Star with center 0 and leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Self {
        Self::from_canonical(leaves + 1, (1..=leaves).map(|v| (0, v)).collect())
    }

    /// Vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let off = self.n;
        let edges = self.edges.iter().copied().chain(other.edges.iter().map(|&(u, v)| (u + off, v + off))).collect();
        Self::from_canonical(self.n + other.n, edges)
    }

    /// Same graph with `extra` isolated vertices appended.
    pub fn with_isolated(&self, extra: usize) -> Graph {
        Self::from_canonical(self.n + extra, self.edges.clone())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list: `u < v`, sorted lexicographically.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn check_set(&self, s: &VertexSet) -> Result<()> {
        match s.as_slice().last() {
            Some(&v) if v >= self.n => Err(Error::InvalidVertex(v)),
            _ => Ok(()),
        }
    }

    fn mask(&self, s: &VertexSet) -> Vec<bool> {
        let mut mask = vec![false; self.n];
        for v in s.iter() {
            mask[v] = true;
        }
        mask
    }

    /// `m(S)`: number of edges with both endpoints in `s`.
    pub fn induced_edge_count(&self, s: &VertexSet) -> Result<usize> {
        self.check_set(s)?;
        let mask = self.mask(s);
        Ok(s.iter().map(|u| self.adj[u].iter().filter(|&&v| v > u && mask[v]).count()).sum())
    }

    pub fn induced_edges(&self, s: &VertexSet) -> Result<Vec<Edge>> {
        self.check_set(s)?;
        let mask = self.mask(s);
        let mut out = Vec::new();
        for u in s.iter() {
            for &v in &self.adj[u] {
                if v > u && mask[v] {
                    out.push((u, v));
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    pub fn volume(&self, s: &VertexSet) -> Result<usize> {
        self.check_set(s)?;
        Ok(s.iter().map(|v| self.degree(v)).sum())
    }

    pub fn induced_subgraph(&self, s: &VertexSet) -> Result<Subgraph> {
        let edges = self.induced_edges(s)?;
        Ok(Subgraph { vertices: s.clone(), edges })
    }

    /// Induced subgraph relabelled to `0..|s|`; the second component maps new ids to old.
    pub fn relabel(&self, s: &VertexSet) -> Result<(Graph, Vec<usize>)> {
        self.check_set(s)?;
        let mut index = vec![usize::MAX; self.n];
        for (i, v) in s.iter().enumerate() {
            index[v] = i;
        }
        let edges = self.induced_edges(s)?.into_iter().map(|(u, v)| (index[u], index[v])).collect();
        Ok((Self::from_canonical(s.len(), edges), s.as_slice().to_vec()))
    }

    /// The graph whose edges are exactly those of `sub`, on the same vertex range.
    pub fn edge_subgraph(&self, edges: &[Edge]) -> Graph {
        Self::from_canonical(self.n, edges.iter().map(|&(u, v)| canon(u, v)).collect())
    }

    pub fn connected_components(&self) -> Vec<Subgraph> {
        let mut comp = vec![usize::MAX; self.n];
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = groups.len();
            let mut stack = vec![s];
            let mut members = Vec::new();
            comp[s] = id;
            while let Some(u) = stack.pop() {
                members.push(u);
                for &v in &self.adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = id;
                        stack.push(v);
                    }
                }
            }
            groups.push(members);
        }
        let mut edges: Vec<Vec<Edge>> = vec![Vec::new(); groups.len()];
        for &(u, v) in &self.edges {
            edges[comp[u]].push((u, v));
        }
        groups.into_iter().zip(edges).map(|(vs, es)| Subgraph { vertices: VertexSet::new(vs), edges: es }).collect()
    }

    /// Canonical edge-list document.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

fn numbers(line: &str, lineno: usize) -> std::result::Result<Vec<usize>, ParseError> {
    line.split_whitespace().map(|t| t.parse::<usize>().map_err(|_| ParseError::Malformed { line: lineno })).collect()
}

/// Content lines with their 1-based line numbers, skipping blanks and `#` comments.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_numbers(line: &str, lineno: usize, arity: usize) -> std::result::Result<Vec<usize>, ParseError> {
    let nums = numbers(line, lineno)?;
    if nums.len() != arity {
        return Err(ParseError::Malformed { line: lineno });
    }
    Ok(nums)
}

/// Parses the `n m` header followed by `m` lines `u v`.
pub fn parse_graph(text: &str) -> std::result::Result<Graph, ParseError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or(ParseError::Header)?;
    let h = parse_numbers(header, hl, 2).map_err(|_| ParseError::Header)?;
    let (n, m) = (h[0], h[1]);
    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(m);
    for (lineno, line) in lines {
        let e = parse_numbers(line, lineno, 2)?;
        let (u, v) = (e[0], e[1]);
        for id in [u, v] {
            if id >= n {
                return Err(ParseError::OutOfRange { line: lineno, id });
            }
        }
        if u == v {
            return Err(ParseError::SelfLoop { line: lineno, v: u });
        }
        if !seen.insert(canon(u, v)) {
            return Err(ParseError::Duplicate { line: lineno, u, v });
        }
        edges.push(canon(u, v));
    }
    if edges.len() != m {
        return Err(ParseError::Count { expected: m, found: edges.len() });
    }
    Ok(Graph::from_canonical(n, edges))
}

/// Bipartite graph with sides `0..na` and `0..nb`; edges are `(a, b)` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    na: usize,
    nb: usize,
    edges: Vec<Edge>,
    adj_a: Vec<Vec<usize>>,
    adj_b: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(na: usize, nb: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut list: Vec<Edge> = Vec::new();
        let mut seen = HashSet::new();
        for (a, b) in edges {
            if a >= na || b >= nb || !seen.insert((a, b)) {
                return Err(Error::InvalidEdge(a, b));
            }
            list.push((a, b));
        }
        Ok(Self::from_list(na, nb, list))
    }

    fn from_list(na: usize, nb: usize, mut edges: Vec<Edge>) -> Self {
        edges.sort_unstable();
        let mut adj_a = vec![Vec::new(); na];
        let mut adj_b = vec![Vec::new(); nb];
        for &(a, b) in &edges {
            adj_a[a].push(b);
            adj_b[b].push(a);
        }
        for l in adj_a.iter_mut().chain(adj_b.iter_mut()) {
            l.sort_unstable();
        }
        BipartiteGraph { na, nb, edges, adj_a, adj_b }
    }

    pub fn na(&self) -> usize {
        self.na
    }

    pub fn nb(&self) -> usize {
        self.nb
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors_a(&self, a: usize) -> &[usize] {
        &self.adj_a[a]
    }

    pub fn neighbors_b(&self, b: usize) -> &[usize] {
        &self.adj_b[b]
    }

    /// Edges between the two sides of `s`.
    pub fn edge_count(&self, s: &SidedSet) -> usize {
        let mut in_b = vec![false; self.nb];
        for &b in &s.b {
            in_b[b] = true;
        }
        s.a.iter().map(|&a| self.adj_a[a].iter().filter(|&&b| in_b[b]).count()).sum()
    }

    pub fn check(&self, s: &SidedSet) -> Result<()> {
        if let Some(&a) = s.a.iter().find(|&&a| a >= self.na) {
            return Err(Error::InvalidVertex(a));
        }
        if let Some(&b) = s.b.iter().find(|&&b| b >= self.nb) {
            return Err(Error::InvalidVertex(b));
        }
        Ok(())
    }

    /// General graph with side B shifted by `na`.
    pub fn to_graph(&self) -> Graph {
        let off = self.na;
        Graph::from_canonical(self.na + self.nb, self.edges.iter().map(|&(a, b)| (a, b + off)).collect())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.na, self.nb, self.edges.len());
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }
}

/// Parses the `nA nB m` header followed by `m` lines `a b`.
pub fn parse_bipartite(text: &str) -> std::result::Result<BipartiteGraph, ParseError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or(ParseError::Header)?;
    let h = parse_numbers(header, hl, 3).map_err(|_| ParseError::Header)?;
    let (na, nb, m) = (h[0], h[1], h[2]);
    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(m);
    for (lineno, line) in lines {
        let e = parse_numbers(line, lineno, 2)?;
        let (a, b) = (e[0], e[1]);
        if a >= na {
            return Err(ParseError::OutOfRange { line: lineno, id: a });
        }
        if b >= nb {
            return Err(ParseError::OutOfRange { line: lineno, id: b });
        }
        if !seen.insert((a, b)) {
            return Err(ParseError::Duplicate { line: lineno, u: a, v: b });
        }
        edges.push((a, b));
    }
    if edges.len() != m {
        return Err(ParseError::Count { expected: m, found: edges.len() });
    }
    Ok(BipartiteGraph::from_list(na, nb, edges))
}

/// A vertex selection on each side of a bipartite graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SidedSet {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl SidedSet {
    pub fn new(mut a: Vec<usize>, mut b: Vec<usize>) -> Self {
        a.sort_unstable();
        a.dedup();
        b.sort_unstable();
        b.dedup();
        SidedSet { a, b }
    }

    pub fn len(&self) -> usize {
        self.a.len() + self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty() && self.b.is_empty()
    }
}

/// A subgraph given by an explicit vertex subset and an explicit edge subset.
/// Need not be induced.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subgraph {
    vertices: VertexSet,
    edges: Vec<Edge>,
}

impl Subgraph {
    pub fn new(g: &Graph, vertices: VertexSet, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        g.check_set(&vertices)?;
        let mut list: Vec<Edge> = edges.into_iter().map(|(u, v)| canon(u, v)).collect();
        list.sort_unstable();
        list.dedup();
        for &(u, v) in &list {
            if !g.has_edge(u, v) || !vertices.contains(u) || !vertices.contains(v) {
                return Err(Error::InvalidEdge(u, v));
            }
        }
        Ok(Subgraph { vertices, edges: list })
    }

    /// Subgraph spanned by `edges`; its vertices are their endpoints.
    pub fn from_edges(g: &Graph, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let list: Vec<Edge> = edges.into_iter().collect();
        let vertices = list.iter().flat_map(|&(u, v)| [u, v]).collect();
        Self::new(g, vertices, list)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub(crate) fn from_parts_unchecked(vertices: VertexSet, edges: Vec<Edge>) -> Self {
        Subgraph { vertices, edges }
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_disjoint(&self, other: &Subgraph) -> bool {
        self.vertices.is_disjoint(&other.vertices)
    }

    /// Union of two subgraphs of the same parent.
    pub fn union(&self, other: &Subgraph) -> Subgraph {
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        edges.sort_unstable();
        edges.dedup();
        Subgraph { vertices: self.vertices.union(&other.vertices), edges }
    }

    /// Keeps the first `h` edges in canonical order and drops vertices left isolated.
    pub fn trim_edges(&self, h: usize) -> Subgraph {
        if self.edges.len() <= h {
            return self.clone();
        }
        let edges: Vec<Edge> = self.edges[..h].to_vec();
        let vertices = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        Subgraph { vertices, edges }
    }

    /// Restriction to the vertices in `keep` (edges with both endpoints kept).
    pub fn restrict(&self, keep: &VertexSet) -> Subgraph {
        let vertices = VertexSet(self.vertices.iter().filter(|&v| keep.contains(v)).collect());
        let edges = self.edges.iter().copied().filter(|&(u, v)| vertices.contains(u) && vertices.contains(v)).collect();
        Subgraph { vertices, edges }
    }

    pub fn without_isolated(&self) -> Subgraph {
        let vertices = self.edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        Subgraph { vertices, edges: self.edges.clone() }
    }

    /// The subgraph relabelled onto `0..vertex_count()`, with the map back to parent ids.
    pub fn compact(&self) -> (Graph, Vec<usize>) {
        let map = self.vertices.as_slice().to_vec();
        let index: HashMap<usize, usize> = map.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges = self.edges.iter().map(|&(u, v)| (index[&u], index[&v])).collect();
        (Graph::from_canonical(map.len(), edges), map)
    }

    /// Connected components, isolated vertices included.
    pub fn components(&self) -> Vec<Subgraph> {
        let (local, map) = self.compact();
        local
            .connected_components()
            .into_iter()
            .map(|c| Subgraph {
                vertices: c.vertices.iter().map(|v| map[v]).collect(),
                edges: c.edges.iter().map(|&(u, v)| (map[u], map[v])).collect(),
            })
            .collect()
    }

    /// The subgraph as a standalone graph on the parent's vertex range.
    pub fn as_graph(&self, parent_n: usize) -> Graph {
        Graph::from_canonical(parent_n, self.edges.clone())
    }

    /// Checks the handle against its parent graph.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        Subgraph::new(g, self.vertices.clone(), self.edges.iter().copied()).map(|_| ())
    }
}

/// `true` when the subgraphs are pairwise vertex-disjoint.
pub fn pairwise_disjoint(pieces: &[Subgraph]) -> bool {
    let mut seen = HashSet::new();
    pieces.iter().all(|p| p.vertices().iter().all(|v| seen.insert(v)))
}
