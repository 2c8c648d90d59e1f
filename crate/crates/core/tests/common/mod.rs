//! Brute-force reference answers for tiny instances. Everything here works on bitmasks
//! and shares no code with the library's solvers.
#![allow(dead_code)]

use std::collections::HashMap;

use densekit::{BipartiteGraph, Edge, Graph};
use rand::Rng;

pub fn gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

pub fn bipartite_gnp<R: Rng + ?Sized>(na: usize, nb: usize, p: f64, rng: &mut R) -> BipartiteGraph {
    let mut edges = Vec::new();
    for a in 0..na {
        for b in 0..nb {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    BipartiteGraph::new(na, nb, edges).unwrap()
}

/// Every graph on `n` labelled vertices.
pub fn all_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<Edge> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e);
            Graph::new(n, edges).unwrap()
        })
        .collect()
}

pub fn adjacency(g: &Graph) -> Vec<u64> {
    let mut adj = vec![0u64; g.n()];
    for &(u, v) in g.edges() {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    adj
}

pub fn edges_in(adj: &[u64], mask: u64) -> usize {
    let mut twice = 0;
    let mut rest = mask;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        twice += (adj[v] & mask).count_ones() as usize;
    }
    twice / 2
}

pub fn mask_to_vec(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

pub fn brute_dks(g: &Graph, k: usize) -> usize {
    let adj = adjacency(g);
    (0u64..1 << g.n()).filter(|m| m.count_ones() as usize == k).map(|m| edges_in(&adj, m)).max().unwrap_or(0)
}

pub fn brute_bdks(g: &BipartiteGraph, k1: usize, k2: usize) -> usize {
    let mut rows = vec![0u64; g.na()];
    for &(a, b) in g.edges() {
        rows[a] |= 1 << b;
    }
    let mut best = 0;
    for ma in 0u64..1 << g.na() {
        if ma.count_ones() as usize > k1 {
            continue;
        }
        for mb in 0u64..1 << g.nb() {
            if mb.count_ones() as usize > k2 {
                continue;
            }
            let e: usize = mask_to_vec(ma).iter().map(|&a| (rows[a] & mb).count_ones() as usize).sum();
            best = best.max(e);
        }
    }
    best
}

/// Best partition into blocks of exactly `k` vertices.
pub fn brute_dkc(g: &Graph, k: usize) -> usize {
    fn go(adj: &[u64], free: u64, k: usize, memo: &mut HashMap<u64, usize>) -> usize {
        if free == 0 {
            return 0;
        }
        if let Some(&v) = memo.get(&free) {
            return v;
        }
        let low = free & free.wrapping_neg();
        let others = free & !low;
        let mut best = 0;
        let mut sub = others;
        loop {
            if sub.count_ones() as usize == k - 1 {
                let block = sub | low;
                best = best.max(edges_in(adj, block) + go(adj, free & !block, k, memo));
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & others;
        }
        memo.insert(free, best);
        best
    }
    assert_eq!(g.n() % k, 0);
    go(&adjacency(g), (1u64 << g.n()) - 1, k, &mut HashMap::new())
}

/// Best choice of at most `r` vertex-disjoint vertex sets, each worth `min(h, m(S))`.
pub fn brute_gp(g: &Graph, r: usize, h: usize) -> usize {
    fn go(adj: &[u64], free: u64, r: usize, h: usize, memo: &mut HashMap<(u64, usize), usize>) -> usize {
        if free == 0 || r == 0 {
            return 0;
        }
        if let Some(&v) = memo.get(&(free, r)) {
            return v;
        }
        let low = free & free.wrapping_neg();
        let others = free & !low;
        let mut best = go(adj, others, r, h, memo);
        let mut sub = others;
        loop {
            let block = sub | low;
            let here = edges_in(adj, block).min(h);
            if here > 0 {
                best = best.max(here + go(adj, free & !block, r - 1, h, memo));
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & others;
        }
        memo.insert((free, r), best);
        best
    }
    go(&adjacency(g), (1u64 << g.n()) - 1, r, h, &mut HashMap::new())
}

/// Crossing surrogate of an edge set: components with more edges than vertices cost
/// `|E(c)|²`, the rest are free.
pub fn surrogate_cost(n: usize, edges: &[Edge]) -> u64 {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let root = find(p, p[x]);
            p[x] = root;
        }
        p[x]
    }
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a] = b;
        }
    }
    let mut verts: HashMap<usize, u64> = HashMap::new();
    let mut count: HashMap<usize, u64> = HashMap::new();
    let mut touched = vec![false; n];
    for &(u, v) in edges {
        touched[u] = true;
        touched[v] = true;
        *count.entry(find(&mut parent, u)).or_default() += 1;
    }
    for (v, &t) in touched.iter().enumerate() {
        if t {
            *verts.entry(find(&mut parent, v)).or_default() += 1;
        }
    }
    count.iter().filter(|(root, &e)| e > verts[root]).map(|(_, &e)| e * e).sum()
}

pub fn brute_mbcs(g: &Graph, budget: u64) -> usize {
    let edges = g.edges();
    assert!(edges.len() <= 16);
    (0u32..1 << edges.len())
        .filter_map(|mask| {
            let pick: Vec<Edge> =
                edges.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            (surrogate_cost(g.n(), &pick) <= budget).then_some(pick.len())
        })
        .max()
        .unwrap_or(0)
}

pub fn two_triangles() -> Graph {
    Graph::complete(3).disjoint_union(&Graph::complete(3))
}
