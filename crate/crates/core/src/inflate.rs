//! The shifted-copy inflation: a host graph on a prime number of vertices in which every
//! edge of `G` is replicated under all cyclic shifts of a random embedding, with origin
//! tracking, plus the DkS drivers that solve DkC or GP on the host and pull back.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dks::next_combination;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Subgraph, VertexSet};
use crate::oracle::{DkcOracle, DksOracle, GpOracle, OracleDescriptor, ProblemKind};
use crate::shrink::peel_to_count;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InflationConfig {
    /// `M` is drawn from `[N^{c_exp·q}, 2·N^{c_exp·q}]`.
    pub c_exp: u32,
    /// Ensemble bound; `None` means `⌈log2 N⌉`.
    pub q: Option<u32>,
    /// Largest admissible lower end of the modulus interval.
    pub modulus_ceiling: f64,
    /// Largest number of ensembles `has_bad_ensemble` may enumerate.
    pub ensemble_ceiling: f64,
    /// Fresh embeddings tried after an ambiguous origin before giving up.
    pub retries: usize,
    pub profile: String,
}

impl InflationConfig {
    pub fn desk() -> Self {
        InflationConfig {
            c_exp: 1,
            q: Some(2),
            modulus_ceiling: 1e6,
            ensemble_ceiling: 1e8,
            retries: 3,
            profile: "desk".into(),
        }
    }

    pub fn paper() -> Self {
        InflationConfig {
            c_exp: 5,
            q: None,
            modulus_ceiling: 1e6,
            ensemble_ceiling: 1e8,
            retries: 3,
            profile: "paper".into(),
        }
    }

    pub fn q_for(&self, n: usize) -> u32 {
        self.q.unwrap_or_else(|| (n.max(2) as f64).log2().ceil() as u32).max(1)
    }

    /// `[N^{c·q}, 2·N^{c·q}]`, or a ceiling error.
    pub fn modulus_range(&self, n: usize) -> Result<(u64, u64)> {
        let exp = self.c_exp.max(1) * self.q_for(n);
        let lo = (n.max(2) as f64).powi(exp as i32);
        if lo > self.modulus_ceiling {
            return Err(Error::CeilingExceeded { what: "inflation modulus", size: lo, ceiling: self.modulus_ceiling });
        }
        let lo = (n.max(2) as u64).pow(exp);
        Ok((lo, 2 * lo))
    }
}

impl Default for InflationConfig {
    fn default() -> Self {
        Self::desk()
    }
}

fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= x {
        if x.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime in `[lo, hi]`.
pub fn find_prime_in(lo: u64, hi: u64) -> Result<u64> {
    if lo < 2 || lo > hi {
        return Err(Error::InvalidParameter(format!("prime search range [{lo}, {hi}]")));
    }
    (lo..=hi).find(|&x| is_prime(x)).ok_or(Error::NoPrime { lo, hi })
}

/// Where an inflated edge came from: an edge of `G` (by index) and a shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Origin {
    pub edge: usize,
    pub shift: usize,
}

#[derive(Clone, Debug)]
pub struct InflatedGraph {
    modulus: usize,
    f: Vec<usize>,
    host: Graph,
    origins: Vec<Vec<Origin>>,
    index: HashMap<Edge, usize>,
    base: Vec<Edge>,
}

impl InflatedGraph {
    /// Builds the host for a fixed embedding `f: [N] → [M]`.
    pub fn with_embedding(g: &Graph, modulus: usize, f: Vec<usize>) -> Result<Self> {
        if f.len() != g.n() {
            return Err(Error::InvalidParameter(format!("embedding has {} entries for {} vertices", f.len(), g.n())));
        }
        if modulus == 0 || f.iter().any(|&x| x >= modulus) {
            return Err(Error::InvalidParameter(format!("embedding values must lie in [0, {modulus})")));
        }
        let mut index: HashMap<Edge, usize> = HashMap::new();
        let mut records: Vec<(Edge, Vec<Origin>)> = Vec::new();
        for (e, &(i, j)) in g.edges().iter().enumerate() {
            if f[i] == f[j] {
                continue;
            }
            for t in 0..modulus {
                let (a, b) = ((f[i] + t) % modulus, (f[j] + t) % modulus);
                let key = if a < b { (a, b) } else { (b, a) };
                let slot = *index.entry(key).or_insert_with(|| {
                    records.push((key, Vec::new()));
                    records.len() - 1
                });
                records[slot].1.push(Origin { edge: e, shift: t });
            }
        }
        records.sort_by_key(|r| r.0);
        let host = Graph::new(modulus, records.iter().map(|r| r.0))?;
        let index = records.iter().enumerate().map(|(i, r)| (r.0, i)).collect();
        let origins = records.into_iter().map(|r| r.1).collect();
        Ok(InflatedGraph { modulus, f, host, origins, index, base: g.edges().to_vec() })
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn embedding(&self) -> &[usize] {
        &self.f
    }

    pub fn host(&self) -> &Graph {
        &self.host
    }

    /// Origin records of a host edge, in order of production.
    pub fn origins_of(&self, e: Edge) -> Option<&[Origin]> {
        let key = if e.0 < e.1 { e } else { (e.1, e.0) };
        self.index.get(&key).map(|&i| self.origins[i].as_slice())
    }

    /// Distinct `G`-edges producing host edge `e`.
    pub fn origin_edges(&self, e: Edge) -> Vec<Edge> {
        let mut out: Vec<Edge> = self.origins_of(e).unwrap_or(&[]).iter().map(|o| self.base[o.edge]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// True when every host edge comes from a single `G`-edge.
    pub fn origins_unique(&self) -> bool {
        self.host.edges().iter().all(|&e| self.origin_edges(e).len() == 1)
    }

    /// The vertex of the host that `v` lands on under shift `t`.
    pub fn shifted(&self, v: usize, t: usize) -> usize {
        (self.f[v] + t) % self.modulus
    }
}

/// Samples a prime modulus and a uniform embedding, then builds the host.
pub fn build_inflated_graph<R: Rng + ?Sized>(g: &Graph, cfg: &InflationConfig, rng: &mut R) -> Result<InflatedGraph> {
    let (lo, hi) = cfg.modulus_range(g.n())?;
    let m = find_prime_in(lo, hi)? as usize;
    let f = (0..g.n()).map(|_| rng.gen_range(0..m)).collect();
    InflatedGraph::with_embedding(g, m, f)
}

/// Index set with nonzero coefficients in `[-q, q]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ensemble {
    pub indices: Vec<usize>,
    pub coefficients: Vec<i64>,
}

impl Ensemble {
    pub fn is_bad(&self, f: &[usize], modulus: usize) -> bool {
        let m = modulus as i128;
        let sum: i128 = self.indices.iter().zip(&self.coefficients).map(|(&i, &x)| x as i128 * f[i] as i128).sum();
        sum.rem_euclid(m) == 0
    }
}

/// First bad ensemble, ordered by size, then index tuple, then coefficient tuple (with
/// coefficients ordered `-q, …, -1, 1, …, q`).
pub fn has_bad_ensemble(f: &[usize], modulus: usize, q: u32, ceiling: f64) -> Result<Option<Ensemble>> {
    if q == 0 || modulus == 0 {
        return Err(Error::InvalidParameter("q and the modulus must be positive".into()));
    }
    let n = f.len();
    let max_size = (2 * q as usize).min(n);
    let choices = 2 * q as usize;
    let mut space = 0.0;
    let mut binom = 1.0;
    for t in 1..=max_size {
        binom = binom * (n + 1 - t) as f64 / t as f64;
        space += binom * (choices as f64).powi(t as i32);
    }
    if space > ceiling {
        return Err(Error::CeilingExceeded { what: "ensemble enumeration", size: space, ceiling });
    }
    let coeff: Vec<i64> = (-(q as i64)..=q as i64).filter(|&x| x != 0).collect();
    let m = modulus as i128;
    for t in 1..=max_size {
        let mut combo: Vec<usize> = (0..t).collect();
        loop {
            let mut digits = vec![0usize; t];
            loop {
                let sum: i128 = combo.iter().zip(&digits).map(|(&i, &d)| coeff[d] as i128 * f[i] as i128).sum();
                if sum.rem_euclid(m) == 0 {
                    return Ok(Some(Ensemble {
                        indices: combo.clone(),
                        coefficients: digits.iter().map(|&d| coeff[d]).collect(),
                    }));
                }
                let mut pos = t;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    digits[pos] += 1;
                    if digits[pos] < choices {
                        break;
                    }
                    digits[pos] = 0;
                    if pos == 0 {
                        pos = usize::MAX;
                        break;
                    }
                }
                if pos == usize::MAX {
                    break;
                }
            }
            if !next_combination(&mut combo, n) {
                break;
            }
        }
    }
    Ok(None)
}

/// The subgraph of `G` formed by the origins of `hsub`'s edges. Fails if some edge has
/// more than one origin.
pub fn origin_graph(g: &Graph, hsub: &Subgraph, inflated: &InflatedGraph) -> Result<Subgraph> {
    let mut edges = Vec::with_capacity(hsub.edge_count());
    for &e in hsub.edges() {
        let from = inflated.origin_edges(e);
        match from.len() {
            0 => return Err(Error::InvalidEdge(e.0, e.1)),
            1 => edges.push(from[0]),
            k => return Err(Error::AmbiguousOrigin(k)),
        }
    }
    Subgraph::from_edges(g, edges)
}

/// `max(log2 k, 1)`.
pub fn log_k(k: usize) -> f64 {
    (k.max(1) as f64).log2().max(1.0)
}

/// Disjoint shifted copies of `s_opt` in the host: `⌊M/(k log k)⌋` shifts drawn with
/// replacement, vertices shared between copies removed, and only edges coming from
/// `E_G(s_opt)` kept.
pub fn planted_copies<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    s_opt: &VertexSet,
    inflated: &InflatedGraph,
    rng: &mut R,
) -> Result<Vec<Subgraph>> {
    if s_opt.len() != k {
        return Err(Error::InvalidParameter(format!("planted set has {} vertices, expected {k}", s_opt.len())));
    }
    let base = g.induced_edges(s_opt)?;
    let m = inflated.modulus();
    let r = (m as f64 / (k as f64 * log_k(k))).floor() as usize;
    let shifts: Vec<usize> = (0..r).map(|_| rng.gen_range(0..m)).collect();
    let copies: Vec<VertexSet> =
        shifts.iter().map(|&t| s_opt.iter().map(|v| inflated.shifted(v, t)).collect()).collect();
    let mut count = vec![0usize; m];
    for c in &copies {
        for u in c.iter() {
            count[u] += 1;
        }
    }
    let mut out = Vec::with_capacity(r);
    for (c, &t) in copies.iter().zip(&shifts) {
        let kept: VertexSet = c.iter().filter(|&u| count[u] == 1).collect();
        let edges: Vec<Edge> = base
            .iter()
            .map(|&(a, b)| (inflated.shifted(a, t), inflated.shifted(b, t)))
            .filter(|&(a, b)| a != b && kept.contains(a) && kept.contains(b))
            .collect();
        out.push(Subgraph::new(inflated.host(), kept, edges)?);
    }
    Ok(out)
}

/// What the inflation drivers did.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InflationReport {
    pub modulus: usize,
    pub embedding: Vec<usize>,
    /// Embeddings discarded because the chosen host piece had an ambiguous origin.
    pub resamples: usize,
    /// `(h, value)` for each edge budget tried by the GP driver.
    pub per_h: Vec<(usize, usize)>,
    pub value: usize,
}

/// Peels the origin graph's vertices down to `k` in `G`, padding with the smallest
/// unused ids when it is smaller.
fn pull_back(g: &Graph, w: &Subgraph, k: usize) -> Result<VertexSet> {
    let s = peel_to_count(g, w.vertices(), k)?;
    if s.len() == k {
        return Ok(s);
    }
    let extra: Vec<usize> = (0..g.n()).filter(|&v| !s.contains(v)).take(k - s.len()).collect();
    Ok(s.union(&VertexSet::new(extra)))
}

fn check_k(g: &Graph, k: usize) -> Result<()> {
    if k == 0 || k > g.n() {
        return Err(Error::InvalidParameter(format!("k = {k} outside [1, {}]", g.n())));
    }
    Ok(())
}

/// DkS through DkC on the inflated host: solve DkC there, keep the densest block, map its
/// edges back to their origins and peel to `k` vertices.
pub fn dks_via_dkc<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    oracle: &dyn DkcOracle,
    cfg: &InflationConfig,
    rng: &mut R,
) -> Result<(VertexSet, InflationReport)> {
    check_k(g, k)?;
    let mut report = InflationReport::default();
    if g.m() == 0 {
        return Ok((VertexSet::full(k), report));
    }
    for attempt in 0..=cfg.retries {
        let inflated = build_inflated_graph(g, cfg, rng)?;
        report.modulus = inflated.modulus();
        report.embedding = inflated.embedding().to_vec();
        let host = inflated.host();
        let pad = (k - host.n() % k) % k;
        let padded = host.with_isolated(pad);
        let sol = oracle.solve(&padded, k)?;
        sol.validate(&padded, k).map_err(|e| Error::Oracle(format!("DkC answer rejected: {e}")))?;
        let mut pieces = Vec::with_capacity(sol.parts.len());
        for part in &sol.parts {
            let in_host: VertexSet = part.iter().filter(|&v| v < host.n()).collect();
            pieces.push(host.induced_subgraph(&in_host)?);
        }
        match best_origin(g, &pieces, &inflated) {
            Ok(w) => {
                let s = pull_back(g, &w, k)?;
                report.value = g.induced_edge_count(&s)?;
                return Ok((s, report));
            }
            Err(Error::AmbiguousOrigin(_)) if attempt < cfg.retries => report.resamples += 1,
            Err(Error::AmbiguousOrigin(_)) => return Err(Error::BadEvent(cfg.retries)),
            Err(e) => return Err(e),
        }
    }
    Err(Error::BadEvent(cfg.retries))
}

/// Origin graph of a densest piece, preferring maximizers whose edges pull back
/// unambiguously. Among those, the lexicographically smallest vertex set wins.
fn best_origin(g: &Graph, pieces: &[Subgraph], inflated: &InflatedGraph) -> Result<Subgraph> {
    let Some(top) = pieces.iter().map(Subgraph::edge_count).max() else {
        return Ok(Subgraph::default());
    };
    let mut ties: Vec<&Subgraph> = pieces.iter().filter(|p| p.edge_count() == top).collect();
    ties.sort_by(|a, b| a.vertices().cmp(b.vertices()));
    let mut first_err = None;
    for piece in ties {
        match origin_graph(g, piece, inflated) {
            Ok(w) => return Ok(w),
            Err(e @ Error::AmbiguousOrigin(_)) => {
                first_err.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(first_err.expect("at least one maximizer"))
}

/// DkS through GP on the inflated host, trying every power-of-two edge budget up to `|E|`.
pub fn dks_via_gp<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    oracle: &dyn GpOracle,
    cfg: &InflationConfig,
    rng: &mut R,
) -> Result<(VertexSet, InflationReport)> {
    check_k(g, k)?;
    let mut report = InflationReport::default();
    let mut best = VertexSet::full(k);
    let mut best_value = 0;
    if g.m() == 0 || k < 2 {
        return Ok((best, report));
    }
    let alpha = oracle.descriptor().alpha;
    let small = 100.0 * alpha * k as f64 * log_k(k);
    let mut h = 1;
    while h <= g.m() {
        let mut done = false;
        for attempt in 0..=cfg.retries {
            let inflated = build_inflated_graph(g, cfg, rng)?;
            report.modulus = inflated.modulus();
            report.embedding = inflated.embedding().to_vec();
            let host = inflated.host();
            let r = ((host.n() as f64 / (k as f64 * log_k(k))).floor() as usize).max(1);
            let sol = oracle.solve(host, r, h)?;
            sol.validate(host, r, h).map_err(|e| Error::Oracle(format!("GP answer rejected: {e}")))?;
            let pieces: Vec<Subgraph> =
                sol.pieces.iter().filter(|p| p.vertex_count() as f64 <= small).cloned().collect();
            match best_origin(g, &pieces, &inflated) {
                Ok(w) => {
                    let s = pull_back(g, &w, k)?;
                    let value = g.induced_edge_count(&s)?;
                    report.per_h.push((h, value));
                    if value > best_value {
                        best_value = value;
                        best = s;
                    }
                    done = true;
                    break;
                }
                Err(Error::AmbiguousOrigin(_)) if attempt < cfg.retries => report.resamples += 1,
                Err(Error::AmbiguousOrigin(_)) => break,
                Err(e) => return Err(e),
            }
        }
        if !done {
            return Err(Error::BadEvent(cfg.retries));
        }
        h *= 2;
    }
    report.value = best_value;
    Ok((best, report))
}

/// DkS solver backed by a DkC solver through the inflation.
pub struct DksViaDkc {
    pub dkc: Box<dyn DkcOracle>,
    pub cfg: InflationConfig,
    pub seed: u64,
}

impl DksOracle for DksViaDkc {
    fn descriptor(&self) -> OracleDescriptor {
        let inner = self.dkc.descriptor();
        OracleDescriptor::heuristic(ProblemKind::Dks, &format!("inflate-dkc({})", inner.name), inner.alpha)
    }

    fn solve(&self, g: &Graph, k: usize) -> Result<VertexSet> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        Ok(dks_via_dkc(g, k, self.dkc.as_ref(), &self.cfg, &mut rng)?.0)
    }
}

/// DkS solver backed by a GP solver through the inflation.
pub struct DksViaGp {
    pub gp: Box<dyn GpOracle>,
    pub cfg: InflationConfig,
    pub seed: u64,
}

impl DksOracle for DksViaGp {
    fn descriptor(&self) -> OracleDescriptor {
        let inner = self.gp.descriptor();
        OracleDescriptor::heuristic(ProblemKind::Dks, &format!("inflate-gp({})", inner.name), inner.alpha.powi(3))
    }

    fn solve(&self, g: &Graph, k: usize) -> Result<VertexSet> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        Ok(dks_via_gp(g, k, self.gp.as_ref(), &self.cfg, &mut rng)?.0)
    }
}
