//! Seeded instance generators. Planted structure is written as `#` comment lines, which
//! every parser skips.

use std::fmt::Write as _;

use densekit::csp::planted_csp;
use densekit::{BipartiteGraph, Edge, Graph};
use rand::seq::index;
use rand::Rng;

use crate::CliError;

fn check_p(name: &str, p: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--{name} must lie in [0, 1], got {p}")))
    }
}

fn invalid(e: densekit::Error) -> CliError {
    CliError::Usage(e.to_string())
}

/// G(n, p), or the bipartite G(n, nb, p) when `nb` is given.
pub fn gnp<R: Rng + ?Sized>(n: usize, nb: Option<usize>, p: f64, rng: &mut R) -> Result<String, CliError> {
    check_p("p", p)?;
    if let Some(nb) = nb {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in 0..nb {
                if rng.gen_bool(p) {
                    edges.push((a, b));
                }
            }
        }
        return Ok(BipartiteGraph::new(n, nb, edges).map_err(invalid)?.to_text());
    }
    let mut edges: Vec<Edge> = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::new(n, edges).map_err(invalid)?.to_text())
}

/// G(n, p) with a random `k`-set whose internal pairs appear with probability `p_in`.
pub fn planted_dense<R: Rng + ?Sized>(n: usize, k: usize, p: f64, p_in: f64, rng: &mut R) -> Result<String, CliError> {
    check_p("p", p)?;
    check_p("p-in", p_in)?;
    if k > n {
        return Err(CliError::Usage(format!("--k {k} exceeds --n {n}")));
    }
    let mut planted = index::sample(rng, n, k).into_vec();
    planted.sort_unstable();
    let mut inside = vec![false; n];
    for &v in &planted {
        inside[v] = true;
    }
    let mut edges: Vec<Edge> = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let q = if inside[u] && inside[v] { p_in } else { p };
            if rng.gen_bool(q) {
                edges.push((u, v));
            }
        }
    }
    let g = Graph::new(n, edges).map_err(invalid)?;
    let ids: Vec<String> = planted.iter().map(|v| v.to_string()).collect();
    Ok(format!("# planted {}\n{}", ids.join(" "), g.to_text()))
}

/// Random d-to-d instance with a hidden assignment that satisfies every constraint.
pub fn planted<R: Rng + ?Sized>(
    x: usize,
    y: usize,
    a: usize,
    c: usize,
    d: usize,
    rng: &mut R,
) -> Result<String, CliError> {
    let (inst, hidden) = planted_csp(x, y, a, c, d, rng).map_err(invalid)?;
    let show = |vals: &[usize]| vals.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    let _ = writeln!(out, "# planted x: {}", show(&hidden.x));
    let _ = writeln!(out, "# planted y: {}", show(&hidden.y));
    out.push_str(&inst.to_text());
    Ok(out)
}

pub fn disjoint_cliques(sizes: &[usize]) -> Result<String, CliError> {
    if sizes.is_empty() {
        return Err(CliError::Usage("--sizes needs at least one clique".into()));
    }
    let g = sizes.iter().fold(Graph::empty(0), |acc, &s| acc.disjoint_union(&Graph::complete(s)));
    Ok(g.to_text())
}
