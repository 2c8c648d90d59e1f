//! Exact (subset dynamic programming) and greedy solvers for dense k-coloring and
//! (r,h)-graph partitioning.

use std::collections::HashSet;

use crate::dks::greedy_dks;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::oracle::{DkcOracle, DkcSolution, GpOracle, GpSolution, OracleDescriptor, ProblemKind};
use crate::shrink::peel_to_edge_budget;

pub const DEFAULT_DKC_CEILING: f64 = 5e8;
pub const DEFAULT_GP_CEILING: f64 = 2e8;
const MAX_BITS: usize = 26;

fn adjacency_masks(g: &Graph) -> Vec<u64> {
    (0..g.n()).map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << u)).collect()
}

fn mask_edges(adj: &[u64], mask: u64) -> usize {
    let mut total = 0;
    let mut rest = mask;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        total += (adj[v] & mask).count_ones() as usize;
    }
    total / 2
}

fn mask_to_set(mask: u64) -> VertexSet {
    let mut out = Vec::new();
    let mut rest = mask;
    while rest != 0 {
        out.push(rest.trailing_zeros() as usize);
        rest &= rest - 1;
    }
    VertexSet::new(out)
}

/// Calls `f` on every submask of `mask` with exactly `size` bits.
fn for_each_subset(mask: u64, size: usize, f: &mut impl FnMut(u64)) {
    fn rec(bits: &[u64], start: usize, size: usize, acc: u64, f: &mut impl FnMut(u64)) {
        if size == 0 {
            f(acc);
            return;
        }
        for i in start..=bits.len() - size {
            rec(bits, i + 1, size - 1, acc | bits[i], f);
        }
    }
    let bits: Vec<u64> = (0..64).filter(|&i| mask >> i & 1 == 1).map(|i| 1u64 << i).collect();
    if size <= bits.len() {
        rec(&bits, 0, size, 0, f);
    }
}

/// Calls `f` on every submask of `mask` with at most `limit` bits.
fn for_each_block(mask: u64, limit: usize, f: &mut impl FnMut(u64)) {
    if limit >= mask.count_ones() as usize {
        let mut sub = mask;
        loop {
            f(sub);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
        return;
    }
    for size in 0..=limit {
        for_each_subset(mask, size, f);
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exact dense k-coloring. Requires `k | n`.
pub fn solve_dkc_exact(g: &Graph, k: usize, ceiling: f64) -> Result<DkcSolution> {
    let n = g.n();
    if k == 0 || !n.is_multiple_of(k) {
        return Err(Error::InvalidParameter(format!("k = {k} must divide n = {n}")));
    }
    let space = 2f64.powi(n as i32) * binomial(n.saturating_sub(1), k - 1);
    if n > MAX_BITS || space > ceiling {
        return Err(Error::CeilingExceeded { what: "exact DkC", size: space, ceiling });
    }
    let adj = adjacency_masks(g);
    let mut memo = vec![-1i32; 1usize << n];
    memo[0] = 0;
    fn best(mask: u64, k: usize, adj: &[u64], memo: &mut [i32]) -> i32 {
        if memo[mask as usize] >= 0 {
            return memo[mask as usize];
        }
        let low = mask & mask.wrapping_neg();
        let mut top = -1;
        let mut candidates = Vec::new();
        for_each_subset(mask & !low, k - 1, &mut |t| candidates.push(t | low));
        for block in candidates {
            let val = mask_edges(adj, block) as i32 + best(mask & !block, k, adj, memo);
            top = top.max(val);
        }
        memo[mask as usize] = top;
        top
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    best(full, k, &adj, &mut memo);
    let mut parts = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let target = memo[mask as usize];
        let low = mask & mask.wrapping_neg();
        let mut chosen = None;
        for_each_subset(mask & !low, k - 1, &mut |t| {
            let block = t | low;
            if chosen.is_none() && mask_edges(&adj, block) as i32 + memo[(mask & !block) as usize] == target {
                chosen = Some(block);
            }
        });
        let block = chosen.expect("memo is consistent");
        parts.push(mask_to_set(block));
        mask &= !block;
    }
    DkcSolution::from_parts(g, parts)
}

/// Exact (r,h)-graph partitioning: disjoint vertex sets maximizing the sum of
/// `min(h, m(S_i))`, each realized by its first `h` induced edges.
pub fn solve_gp_exact(g: &Graph, r: usize, h: usize, ceiling: f64) -> Result<GpSolution> {
    let n = g.n();
    let r_eff = r.min(n / 2);
    if r_eff == 0 || h == 0 || g.m() == 0 {
        return Ok(GpSolution::empty(r));
    }
    let greedy = greedy_gp(g, r, h)?;
    if greedy.value >= (r_eff * h).min(g.m()) {
        return Ok(greedy);
    }
    // An optimal piece never needs more than 2h vertices, so blocks through the lowest
    // free vertex are enumerated up to that size.
    let max_block = (2 * h).min(n);
    let space: f64 =
        (1..=n).map(|s| binomial(n, s) * (0..max_block.min(s)).map(|t| binomial(s - 1, t)).sum::<f64>()).sum::<f64>()
            * r_eff as f64;
    if n > MAX_BITS || space > ceiling {
        return Err(Error::CeilingExceeded { what: "exact GP", size: space, ceiling });
    }
    let adj = adjacency_masks(g);
    let size = 1usize << n;
    let mut weight = vec![0u32; size];
    for (mask, w) in weight.iter_mut().enumerate() {
        *w = mask_edges(&adj, mask as u64).min(h) as u32;
    }
    // table[j][mask]: best value using at most j pieces inside mask
    let mut table = vec![vec![0u32; size]; r_eff + 1];
    for j in 1..=r_eff {
        let (prev, cur) = table.split_at_mut(j);
        let prev = &prev[j - 1];
        let cur = &mut cur[0];
        for mask in 1..size {
            let low = mask & mask.wrapping_neg();
            let mut top = cur[mask & !low];
            let rest = mask & !low;
            for_each_block(rest as u64, max_block - 1, &mut |sub| {
                let block = sub as usize | low;
                if weight[block] > 0 {
                    top = top.max(weight[block] + prev[mask & !block]);
                }
            });
            cur[mask] = top;
        }
    }
    let mut pieces = Vec::new();
    let mut mask = size - 1;
    let mut j = r_eff;
    while mask != 0 && j > 0 {
        let target = table[j][mask];
        let low = mask & mask.wrapping_neg();
        if table[j][mask & !low] == target {
            mask &= !low;
            continue;
        }
        let rest = mask & !low;
        let mut found = None;
        for_each_block(rest as u64, max_block - 1, &mut |sub| {
            let block = sub as usize | low;
            if found.is_none() && weight[block] > 0 && weight[block] + table[j - 1][mask & !block] == target {
                found = Some(block);
            }
        });
        let block = found.expect("table is consistent");
        let induced = g.induced_subgraph(&mask_to_set(block as u64))?;
        pieces.push(induced.trim_edges(h).without_isolated());
        mask &= !block;
        j -= 1;
    }
    Ok(GpSolution::new(pieces, r))
}

/// Repeatedly carves `k` vertices out of the remaining graph by peeling.
pub fn greedy_dkc(g: &Graph, k: usize) -> Result<DkcSolution> {
    let n = g.n();
    if k == 0 || !n.is_multiple_of(k) {
        return Err(Error::InvalidParameter(format!("k = {k} must divide n = {n}")));
    }
    let mut remaining = VertexSet::full(n);
    let mut parts = Vec::new();
    while !remaining.is_empty() {
        let (sub, map) = g.relabel(&remaining)?;
        let local = greedy_dks(&sub, k)?;
        let block: VertexSet = local.iter().map(|v| map[v]).collect();
        remaining = remaining.difference(&block);
        parts.push(block);
    }
    DkcSolution::from_parts(g, parts)
}

/// Takes the largest remaining component (peeled to `h` edges if needed), `r` times.
pub fn greedy_gp(g: &Graph, r: usize, h: usize) -> Result<GpSolution> {
    if h == 0 {
        return Ok(GpSolution::empty(r));
    }
    let mut used: HashSet<usize> = HashSet::new();
    let mut pieces = Vec::new();
    for _ in 0..r {
        let free: VertexSet = (0..g.n()).filter(|v| !used.contains(v)).collect();
        let (sub, map) = g.relabel(&free)?;
        let Some(comp) = sub
            .connected_components()
            .into_iter()
            .max_by_key(|c| (c.edge_count(), std::cmp::Reverse(c.vertices().clone())))
        else {
            break;
        };
        if comp.edge_count() == 0 {
            break;
        }
        let set = if comp.edge_count() > h {
            peel_to_edge_budget(&sub, comp.vertices(), h)?
        } else {
            comp.vertices().clone()
        };
        let global: VertexSet = set.iter().map(|v| map[v]).collect();
        let piece = g.induced_subgraph(&global)?.trim_edges(h).without_isolated();
        used.extend(piece.vertices().iter());
        pieces.push(piece);
    }
    Ok(GpSolution::new(pieces, r))
}

#[derive(Clone, Copy, Debug)]
pub struct ExactDkc {
    pub ceiling: f64,
}

impl Default for ExactDkc {
    fn default() -> Self {
        ExactDkc { ceiling: DEFAULT_DKC_CEILING }
    }
}

impl DkcOracle for ExactDkc {
    fn descriptor(&self) -> OracleDescriptor {
        OracleDescriptor::exact(ProblemKind::Dkc, "exact", self.ceiling)
    }

    fn solve(&self, g: &Graph, k: usize) -> Result<DkcSolution> {
        solve_dkc_exact(g, k, self.ceiling)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct GreedyDkc;

impl DkcOracle for GreedyDkc {
    fn descriptor(&self) -> OracleDescriptor {
        OracleDescriptor::heuristic(ProblemKind::Dkc, "greedy", f64::INFINITY)
    }

    fn solve(&self, g: &Graph, k: usize) -> Result<DkcSolution> {
        greedy_dkc(g, k)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ExactGp {
    pub ceiling: f64,
}

impl Default for ExactGp {
    fn default() -> Self {
        ExactGp { ceiling: DEFAULT_GP_CEILING }
    }
}

impl GpOracle for ExactGp {
    fn descriptor(&self) -> OracleDescriptor {
        OracleDescriptor::exact(ProblemKind::Gp, "exact", self.ceiling)
    }

    fn solve(&self, g: &Graph, r: usize, h: usize) -> Result<GpSolution> {
        solve_gp_exact(g, r, h, self.ceiling)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct GreedyGp;

impl GpOracle for GreedyGp {
    fn descriptor(&self) -> OracleDescriptor {
        OracleDescriptor::heuristic(ProblemKind::Gp, "greedy", f64::INFINITY)
    }

    fn solve(&self, g: &Graph, r: usize, h: usize) -> Result<GpSolution> {
        greedy_gp(g, r, h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dkc_two_triangles() {
        let g = Graph::complete(3).disjoint_union(&Graph::complete(3));
        let sol = solve_dkc_exact(&g, 3, 1e9).unwrap();
        sol.validate(&g, 3).unwrap();
        assert_eq!(sol.value, 6);
        assert!(solve_dkc_exact(&g, 4, 1e9).is_err());
    }

    #[test]
    fn dkc_path() {
        let g = Graph::path(4);
        let sol = solve_dkc_exact(&g, 2, 1e9).unwrap();
        assert_eq!(sol.value, 2);
    }

    #[test]
    fn gp_examples() {
        let g = Graph::complete(3).disjoint_union(&Graph::complete(3));
        let sol = solve_gp_exact(&g, 2, 3, 1e9).unwrap();
        sol.validate(&g, 2, 3).unwrap();
        assert_eq!(sol.value, 6);
        let sol = solve_gp_exact(&g, 1, 2, 1e9).unwrap();
        assert_eq!(sol.value, 2);
        let sol = solve_gp_exact(&Graph::complete(4), 2, 1, 1e9).unwrap();
        assert_eq!(sol.value, 2);
        assert_eq!(solve_gp_exact(&Graph::empty(3), 2, 2, 1e9).unwrap().value, 0);
    }

    #[test]
    fn greedy_feasible() {
        let g = Graph::complete(4).disjoint_union(&Graph::path(4));
        greedy_dkc(&g, 4).unwrap().validate(&g, 4).unwrap();
        let sol = greedy_gp(&g, 2, 4).unwrap();
        sol.validate(&g, 2, 4).unwrap();
        assert!(sol.value >= 6);
    }
}
