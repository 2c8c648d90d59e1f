//! Greedy lowest-degree peeling.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

/// Repeatedly drops the vertex of lowest degree inside the current set until `target`
/// vertices remain. Ties go to the smallest id.
pub fn peel_to_count(g: &Graph, s: &VertexSet, target: usize) -> Result<VertexSet> {
    g.check_set(s)?;
    if target >= s.len() {
        return Ok(s.clone());
    }
    let mut alive = vec![false; g.n()];
    for v in s.iter() {
        alive[v] = true;
    }
    let mut deg = vec![0usize; g.n()];
    for v in s.iter() {
        deg[v] = g.neighbors(v).iter().filter(|&&u| alive[u]).count();
    }
    let mut left = s.len();
    while left > target {
        let victim =
            s.iter().filter(|&v| alive[v]).min_by_key(|&v| (deg[v], v)).expect("set is nonempty while above target");
        alive[victim] = false;
        for &u in g.neighbors(victim) {
            if alive[u] {
                deg[u] -= 1;
            }
        }
        left -= 1;
    }
    Ok(s.iter().filter(|&v| alive[v]).collect())
}

/// Shrinks `s` to `⌊beta·|s|⌋` vertices. Requires `2/|s| ≤ beta ≤ 1`.
pub fn peel_to_size(g: &Graph, s: &VertexSet, beta: f64) -> Result<VertexSet> {
    let k = s.len();
    if k == 0 {
        return Err(Error::InvalidParameter("peel_to_size needs a nonempty set".into()));
    }
    if !(beta * k as f64 >= 2.0 - 1e-9 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!("beta {beta} outside [2/{k}, 1]")));
    }
    peel_to_count(g, s, size_target(beta, k))
}

/// `⌊beta·k⌋`, robust to representation error in `beta`.
pub fn size_target(beta: f64, k: usize) -> usize {
    ((beta * k as f64) + 1e-9).floor() as usize
}

/// The edge count the size-reducing lemma guarantees after peeling `s` (with `k = |s|`
/// vertices and `edges` induced edges) down to `t` vertices.
pub fn peel_guarantee(k: usize, t: usize, edges: usize) -> f64 {
    if k < 2 {
        return edges as f64;
    }
    (t * t.saturating_sub(1)) as f64 / (k * (k - 1)) as f64 * edges as f64
}

/// Peels `s` until at most `h` edges remain inside it; the result keeps at least `⌈h/3⌉`.
pub fn peel_to_edge_budget(g: &Graph, s: &VertexSet, h: usize) -> Result<VertexSet> {
    if h == 0 {
        return Err(Error::InvalidParameter("edge budget must be positive".into()));
    }
    let total = g.induced_edge_count(s)?;
    if total < h {
        return Err(Error::Precondition(format!("set spans {total} edges, budget is {h}")));
    }
    let mut alive = vec![false; g.n()];
    for v in s.iter() {
        alive[v] = true;
    }
    let mut deg = vec![0usize; g.n()];
    for v in s.iter() {
        deg[v] = g.neighbors(v).iter().filter(|&&u| alive[u]).count();
    }
    let mut edges = total;
    while edges > h {
        let victim =
            s.iter().filter(|&v| alive[v]).min_by_key(|&v| (deg[v], v)).expect("edges remain so vertices remain");
        alive[victim] = false;
        edges -= deg[victim];
        for &u in g.neighbors(victim) {
            if alive[u] {
                deg[u] -= 1;
            }
        }
    }
    let out: VertexSet = s.iter().filter(|&v| alive[v]).collect();
    debug_assert!(edges >= h.div_ceil(3));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_half() {
        let g = Graph::complete(4);
        let out = peel_to_size(&g, &VertexSet::full(4), 0.5).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(g.induced_edge_count(&out).unwrap(), 1);
    }

    #[test]
    fn beta_one_is_identity() {
        let g = Graph::cycle(5);
        let s = VertexSet::new(vec![0, 2, 3]);
        assert_eq!(peel_to_size(&g, &s, 1.0).unwrap(), s);
    }

    #[test]
    fn star_keeps_center() {
        let g = Graph::star(5);
        let out = peel_to_size(&g, &VertexSet::full(6), 0.5).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.contains(0));
        assert_eq!(g.induced_edge_count(&out).unwrap(), 2);
    }

    #[test]
    fn beta_range_checked() {
        let g = Graph::complete(4);
        assert!(peel_to_size(&g, &VertexSet::full(4), 0.5 - 1e-3).is_err());
        assert!(peel_to_size(&g, &VertexSet::full(4), 1.5).is_err());
        assert!(peel_to_size(&g, &VertexSet::empty(), 1.0).is_err());
    }

    #[test]
    fn edge_budget_examples() {
        let tri = Graph::complete(3);
        let pair = peel_to_edge_budget(&tri, &VertexSet::full(3), 1).unwrap();
        assert_eq!(pair.len(), 2);
        assert_eq!(tri.induced_edge_count(&pair).unwrap(), 1);

        let p5 = Graph::path(5);
        let sub = peel_to_edge_budget(&p5, &VertexSet::full(5), 3).unwrap();
        assert_eq!(sub.as_slice(), &[1, 2, 3, 4]);
        assert_eq!(p5.induced_edge_count(&sub).unwrap(), 3);

        let k5 = Graph::complete(5);
        let k4 = peel_to_edge_budget(&k5, &VertexSet::full(5), 6).unwrap();
        assert_eq!(k4.len(), 4);
        assert_eq!(k5.induced_edge_count(&k4).unwrap(), 6);
    }

    #[test]
    fn edge_budget_precondition() {
        let g = Graph::path(3);
        assert!(matches!(peel_to_edge_budget(&g, &VertexSet::full(3), 3), Err(Error::Precondition(_))));
    }
}
