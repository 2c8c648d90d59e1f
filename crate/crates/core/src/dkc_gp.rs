//! LP-based approximation for Dense k-Coloring and (r,h)-Graph Partitioning: dual
//! normalization, the randomized separation oracles built on a bipartite densest-subgraph
//! solver, randomized rounding, and the end-to-end drivers.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Graph, Subgraph, VertexSet};
use crate::lp::{maximize_via_binary_search, solve_restricted_primal, Column, DualLp, DualPoint, EllipsoidConfig};
use crate::oracle::{BdksOracle, DkcOracle, DkcSolution, GpOracle, GpSolution, OracleDescriptor, ProblemKind};

/// Which dual is being normalized, with the quantity its cap is derived from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualFamily {
    /// Cap is the smallest power of two above `|E|`.
    Dkc { edges: usize },
    /// Values above `h` go to the smallest power of two above `h`.
    Gp { h: usize },
}

/// Rounded dual: `z' = 2z`, every `y'` is zero or a power of two.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedDual {
    pub z: f64,
    pub y: Vec<f64>,
}

fn pow2_above(x: f64) -> f64 {
    let mut p = 1.0;
    while p <= x {
        p *= 2.0;
    }
    p
}

/// Bucket index: 0 for `y' = 0`, `i` for `y' = 2^{i-1}`.
fn bucket_of(y: f64) -> usize {
    if y == 0.0 {
        0
    } else {
        y.log2().round() as usize + 1
    }
}

pub fn normalize_dual(z: f64, y: &[f64], family: DualFamily) -> Result<NormalizedDual> {
    if !(z >= 0.0) || y.iter().any(|&v| !(v >= 0.0)) {
        return Err(Error::InvalidParameter("dual values must be nonnegative".into()));
    }
    let (threshold, top) = match family {
        DualFamily::Dkc { edges } => {
            let m = pow2_above(edges as f64);
            (m, m)
        }
        DualFamily::Gp { h } => (h as f64, pow2_above(h as f64)),
    };
    let y = y
        .iter()
        .map(|&v| {
            if v > threshold {
                top
            } else if v < 0.25 {
                0.0
            } else {
                pow2_above(4.0 * v)
            }
        })
        .collect();
    Ok(NormalizedDual { z: 2.0 * z, y })
}

/// Number of nonzero buckets, `⌈log2(8m)⌉` or `⌈log2(8h)⌉`.
pub fn bucket_count(family: DualFamily) -> usize {
    let base = match family {
        DualFamily::Dkc { edges } => pow2_above(edges as f64),
        DualFamily::Gp { h } => h as f64,
    };
    (8.0 * base).log2().ceil() as usize
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Separation<T> {
    Accept,
    Violated(T),
}

impl<T> Separation<T> {
    pub fn violated(self) -> Option<T> {
        match self {
            Separation::Accept => None,
            Separation::Violated(t) => Some(t),
        }
    }
}

/// Shared search: random bipartition, bucket pairs by `y'`, and a BDkS call for every
/// side-quota pair. Every set passing `success` (which receives `z' + Σ y'` and the
/// bipartite edge count) is handed to `score`; the highest score wins, ties going to the
/// earliest in `(i, j, k1, k2)` order.
fn bucket_search<R: Rng + ?Sized, T>(
    g: &Graph,
    nd: &NormalizedDual,
    quota: usize,
    q: usize,
    oracle: &dyn BdksOracle,
    rng: &mut R,
    success: impl Fn(f64, usize) -> bool,
    score: impl Fn(VertexSet) -> Result<(f64, T)>,
) -> Result<Option<T>> {
    let mut best: Option<(f64, T)> = None;
    let n = g.n();
    let side: Vec<bool> = (0..n).map(|_| rng.gen::<bool>()).collect();
    let mut a_buckets = vec![Vec::new(); q + 1];
    let mut b_buckets = vec![Vec::new(); q + 1];
    for v in 0..n {
        let i = bucket_of(nd.y[v]);
        if i > q {
            return Err(Error::Invariant(format!("normalized value {} beyond bucket {q}", nd.y[v])));
        }
        if side[v] {
            a_buckets[i].push(v);
        } else {
            b_buckets[i].push(v);
        }
    }
    let mut local = vec![usize::MAX; n];
    for i in 0..=q {
        for j in 0..=q {
            let (a, b) = (&a_buckets[i], &b_buckets[j]);
            if a.is_empty() || b.is_empty() {
                continue;
            }
            for (t, &v) in a.iter().enumerate() {
                local[v] = t;
            }
            for (t, &v) in b.iter().enumerate() {
                local[v] = t;
            }
            let mut edges = Vec::new();
            for &u in a {
                for &w in g.neighbors(u) {
                    if !side[w] && bucket_of(nd.y[w]) == j {
                        edges.push((local[u], local[w]));
                    }
                }
            }
            if edges.is_empty() {
                continue;
            }
            let bip = BipartiteGraph::new(a.len(), b.len(), edges)?;
            let mut pairs = Vec::new();
            for k1 in 1..=a.len().min(quota) {
                for k2 in 1..=b.len().min(quota - k1) {
                    pairs.push((k1, k2));
                }
            }
            if pairs.is_empty() {
                continue;
            }
            let answers = oracle.solve_many(&bip, &pairs)?;
            for (ans, &(k1, k2)) in answers.iter().zip(&pairs) {
                if ans.a.len() > k1 || ans.b.len() > k2 {
                    return Err(Error::Oracle(format!("BDkS answer exceeds quotas ({k1}, {k2})")));
                }
                bip.check(ans)?;
                let m_ij = bip.edge_count(ans);
                let cost = nd.z
                    + ans.a.iter().map(|&t| nd.y[a[t]]).sum::<f64>()
                    + ans.b.iter().map(|&t| nd.y[b[t]]).sum::<f64>();
                if success(cost, m_ij) {
                    let s = ans.a.iter().map(|&t| a[t]).chain(ans.b.iter().map(|&t| b[t])).collect();
                    let (value, found) = score(s)?;
                    if best.as_ref().is_none_or(|(b, _)| value > *b) {
                        best = Some((value, found));
                    }
                }
            }
        }
    }
    Ok(best.map(|(_, t)| t))
}

fn cover(z: f64, y: &[f64], s: &VertexSet) -> f64 {
    z + s.iter().map(|v| y[v]).sum::<f64>()
}

/// Approximate separation for the DkC dual: either a set of at most `k` vertices whose
/// covering constraint `z + y(S) ≥ m(S)` fails, or acceptance.
pub fn separation_oracle_dkc<R: Rng + ?Sized>(
    z: f64,
    y: &[f64],
    g: &Graph,
    k: usize,
    oracle: &dyn BdksOracle,
    rng: &mut R,
) -> Result<Separation<VertexSet>> {
    if y.len() != g.n() {
        return Err(Error::InvalidParameter(format!("{} dual values for {} vertices", y.len(), g.n())));
    }
    let family = DualFamily::Dkc { edges: g.m() };
    let nd = normalize_dual(z, y, family)?;
    let score = |s: VertexSet| -> Result<(f64, VertexSet)> {
        let cleaned = g.induced_subgraph(&s)?.without_isolated().vertices().clone();
        let gap = g.induced_edge_count(&cleaned)? as f64 - cover(z, y, &cleaned);
        if !(gap > 0.0) {
            return Err(Error::OracleBug);
        }
        Ok((gap, cleaned))
    };
    let found = bucket_search(g, &nd, k, bucket_count(family), oracle, rng, |cost, m| cost < m as f64, score)?;
    Ok(found.map_or(Separation::Accept, Separation::Violated))
}

/// Approximate separation for the GP dual: either a subgraph with at most `h` edges whose
/// constraint `z + y(V(H)) ≥ |E(H)|` fails, or acceptance.
pub fn separation_oracle_gp<R: Rng + ?Sized>(
    z: f64,
    y: &[f64],
    g: &Graph,
    h: usize,
    oracle: &dyn BdksOracle,
    rng: &mut R,
) -> Result<Separation<Subgraph>> {
    if y.len() != g.n() {
        return Err(Error::InvalidParameter(format!("{} dual values for {} vertices", y.len(), g.n())));
    }
    if h == 0 {
        return Err(Error::InvalidParameter("h must be positive".into()));
    }
    let family = DualFamily::Gp { h };
    let nd = normalize_dual(z, y, family)?;
    let score = |s: VertexSet| -> Result<(f64, Subgraph)> {
        let piece = g.induced_subgraph(&s)?.trim_edges(h).without_isolated();
        let gap = piece.edge_count() as f64 - cover(z, y, piece.vertices());
        if !(gap > 0.0) {
            return Err(Error::OracleBug);
        }
        Ok((gap, piece))
    };
    let found =
        bucket_search(g, &nd, g.n(), bucket_count(family), oracle, rng, |cost, m| cost < h.min(m) as f64, score)?;
    Ok(found.map_or(Separation::Accept, Separation::Violated))
}

/// Knobs for the LP pipelines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpConfig {
    pub ellipsoid: EllipsoidConfig,
    /// `c` in `β(N) = c·α(N²)·log²N`.
    pub beta_constant: f64,
    /// Whether the DkC rounding may fall back on a single heavy column.
    pub heavy_shortcut: bool,
    /// Rounding attempts; `None` means `N²`.
    pub rounding_trials: Option<usize>,
}

impl Default for LpConfig {
    fn default() -> Self {
        LpConfig {
            ellipsoid: EllipsoidConfig::default(),
            beta_constant: 4.0,
            heavy_shortcut: true,
            rounding_trials: None,
        }
    }
}

fn log2n(n: usize) -> f64 {
    (n.max(2) as f64).log2()
}

/// `β(N) = c·α(N²)·log²N`, with `α` taken from the BDkS solver's descriptor.
pub fn beta_of(n: usize, alpha: f64, c: f64) -> f64 {
    c * alpha * log2n(n).powi(2)
}

/// What happened during rounding.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundingReport {
    pub trials: usize,
    /// Trials abandoned because the sampled family was too large, too overlapping, or too light.
    pub bad_events: usize,
    pub heavy_shortcut: bool,
    pub lp_value: f64,
    pub value: usize,
}

fn check_fractional(columns: &[Column], x: &[f64], n: usize, limit: f64) -> Result<()> {
    if columns.len() != x.len() {
        return Err(Error::InvalidParameter(format!("{} weights for {} columns", x.len(), columns.len())));
    }
    let tol = 1e-6;
    let mut load = vec![0.0; n];
    let mut total = 0.0;
    for (c, &xi) in columns.iter().zip(x) {
        if !(xi >= -tol) {
            return Err(Error::InvalidParameter(format!("negative weight {xi}")));
        }
        for v in c.vertices().iter() {
            if v >= n {
                return Err(Error::InvalidVertex(v));
            }
            load[v] += xi;
        }
        total += xi;
    }
    if load.iter().any(|&l| l > 1.0 + tol) || total > limit + tol {
        return Err(Error::InvalidParameter("fractional solution violates the packing constraints".into()));
    }
    Ok(())
}

/// Samples each column with probability `x_S`; `None` when a bad event fires.
fn sample_family<R: Rng + ?Sized>(
    columns: &[Column],
    x: &[f64],
    n: usize,
    size_limit: f64,
    lp_value: f64,
    rng: &mut R,
) -> Option<Vec<usize>> {
    let logn = log2n(n);
    let picked: Vec<usize> = (0..columns.len()).filter(|&i| rng.gen::<f64>() < x[i].clamp(0.0, 1.0)).collect();
    let mut load = vec![0usize; n];
    for &i in &picked {
        for v in columns[i].vertices().iter() {
            load[v] += 1;
        }
    }
    let weight: usize = picked.iter().map(|&i| columns[i].weight()).sum();
    let too_overlapping = load.iter().any(|&l| l as f64 > 5.0 * logn);
    let too_many = picked.len() as f64 > size_limit * 5.0 * logn;
    let too_light = (weight as f64) < lp_value / 8.0;
    if too_overlapping || too_many || too_light {
        return None;
    }
    Some(picked)
}

/// Keeps the `count` heaviest sampled columns and lets every covered vertex pick one of
/// the kept columns containing it uniformly at random. Returns the owned vertex lists.
fn resolve_owners<R: Rng + ?Sized>(
    columns: &[Column],
    mut picked: Vec<usize>,
    count: usize,
    n: usize,
    rng: &mut R,
) -> (Vec<usize>, Vec<Vec<usize>>) {
    picked.sort_by(|&a, &b| {
        columns[b].weight().cmp(&columns[a].weight()).then_with(|| columns[a].vertices().cmp(columns[b].vertices()))
    });
    picked.truncate(count);
    let mut holders = vec![Vec::new(); n];
    for (slot, &i) in picked.iter().enumerate() {
        for v in columns[i].vertices().iter() {
            holders[v].push(slot);
        }
    }
    let mut owned = vec![Vec::new(); picked.len()];
    for (v, hs) in holders.iter().enumerate() {
        if let Some(&slot) = hs.choose(rng) {
            owned[slot].push(v);
        }
    }
    (picked, owned)
}

/// Fills the blocks up to `k` with unused vertices in id order and adds blocks until
/// there are `n/k`.
fn complete_partition(g: &Graph, k: usize, mut blocks: Vec<Vec<usize>>) -> Result<DkcSolution> {
    let n = g.n();
    blocks.resize(n / k, Vec::new());
    let mut used = vec![false; n];
    for b in &blocks {
        for &v in b {
            used[v] = true;
        }
    }
    let mut free = (0..n).filter(|&v| !used[v]);
    for b in &mut blocks {
        while b.len() < k {
            b.push(free.next().expect("block sizes sum to n"));
        }
    }
    DkcSolution::from_parts(g, blocks.into_iter().map(VertexSet::new).collect())
}

/// Randomized rounding of a fractional DkC packing into a partition into blocks of `k`.
pub fn round_dkc<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    columns: &[Column],
    x: &[f64],
    cfg: &LpConfig,
    rng: &mut R,
) -> Result<(DkcSolution, RoundingReport)> {
    let n = g.n();
    if k == 0 || !n.is_multiple_of(k) {
        return Err(Error::InvalidParameter(format!("k = {k} must divide n = {n}")));
    }
    let blocks = n / k;
    check_fractional(columns, x, n, blocks as f64)?;
    if let Some(c) = columns.iter().find(|c| c.vertices().len() > k) {
        return Err(Error::InvalidParameter(format!("column of {} vertices exceeds k = {k}", c.vertices().len())));
    }
    let lp_value: f64 = columns.iter().zip(x).map(|(c, &xi)| c.weight() as f64 * xi.max(0.0)).sum();
    let mut report = RoundingReport { lp_value, ..RoundingReport::default() };
    let mut best = complete_partition(g, k, Vec::new())?;
    if cfg.heavy_shortcut && lp_value > 0.0 {
        let threshold = lp_value / (300.0 * log2n(n).powi(3));
        let heavy = columns
            .iter()
            .zip(x)
            .filter(|(c, &xi)| xi > 0.0 && c.weight() as f64 >= threshold)
            .max_by(|(a, _), (b, _)| a.weight().cmp(&b.weight()).then_with(|| b.vertices().cmp(a.vertices())));
        if let Some((c, _)) = heavy {
            report.heavy_shortcut = true;
            let sol = complete_partition(g, k, vec![c.vertices().clone().into_vec()])?;
            if sol.value > best.value {
                best = sol;
            }
        }
    }
    let trials = cfg.rounding_trials.unwrap_or(n * n).max(1);
    for _ in 0..trials {
        report.trials += 1;
        let Some(picked) = sample_family(columns, x, n, blocks as f64, lp_value, rng) else {
            report.bad_events += 1;
            continue;
        };
        let (_, owned) = resolve_owners(columns, picked, blocks, n, rng);
        let sol = complete_partition(g, k, owned)?;
        if sol.value > best.value {
            best = sol;
        }
    }
    report.value = best.value;
    Ok((best, report))
}

/// Randomized rounding of a fractional GP packing into `r` disjoint pieces.
pub fn round_gp<R: Rng + ?Sized>(
    g: &Graph,
    r: usize,
    h: usize,
    columns: &[Column],
    x: &[f64],
    cfg: &LpConfig,
    rng: &mut R,
) -> Result<(GpSolution, RoundingReport)> {
    let n = g.n();
    if r == 0 || h == 0 {
        return Err(Error::InvalidParameter("r and h must be positive".into()));
    }
    check_fractional(columns, x, n, r as f64)?;
    if let Some(c) = columns.iter().find(|c| c.weight() > h) {
        return Err(Error::InvalidParameter(format!("column with {} edges exceeds h = {h}", c.weight())));
    }
    let lp_value: f64 = columns.iter().zip(x).map(|(c, &xi)| c.weight() as f64 * xi.max(0.0)).sum();
    let mut report = RoundingReport { lp_value, ..RoundingReport::default() };
    let mut best = GpSolution::empty(r);
    let trials = cfg.rounding_trials.unwrap_or(n * n).max(1);
    for _ in 0..trials {
        report.trials += 1;
        let Some(picked) = sample_family(columns, x, n, r as f64, lp_value, rng) else {
            report.bad_events += 1;
            continue;
        };
        let (kept, owned) = resolve_owners(columns, picked, r, n, rng);
        let pieces =
            kept.iter().zip(owned).map(|(&i, vs)| columns[i].to_subgraph().restrict(&VertexSet::new(vs))).collect();
        let sol = GpSolution::new(pieces, r);
        if sol.value > best.value {
            best = sol;
        }
    }
    report.value = best.value;
    Ok((best, report))
}

/// Summary of one pipeline run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LpRunReport {
    /// Accepted budget `2^{C*}`.
    pub lp_budget: f64,
    pub columns: usize,
    pub restricted_value: f64,
    pub ellipsoid_iterations: usize,
    pub borderline: bool,
    pub beta: f64,
    /// Isolated vertices appended so that `k` divides the vertex count.
    pub padding: usize,
    pub rounding: RoundingReport,
    pub value: usize,
}

/// Clamps tiny negative coordinates left by the ellipsoid's tolerance.
fn clamp_point(p: &DualPoint) -> (f64, Vec<f64>) {
    (p.z.max(0.0), p.y.iter().map(|v| v.max(0.0)).collect())
}

/// LP-based DkC approximation. When `k` does not divide `n`, isolated vertices are
/// appended first and the partition covers them too (ids `n..`).
pub fn approx_dkc<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    oracle: &dyn BdksOracle,
    cfg: &LpConfig,
    rng: &mut R,
) -> Result<(DkcSolution, LpRunReport)> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let padding = (k - g.n() % k) % k;
    let padded;
    let g = if padding > 0 {
        padded = g.with_isolated(padding);
        &padded
    } else {
        g
    };
    let n = g.n();
    let beta = beta_of(n, oracle.descriptor().alpha, cfg.beta_constant);
    let lp = DualLp::dkc(g, k)?;
    let mut sep = |p: &DualPoint| -> Result<Option<Column>> {
        let (z, y) = clamp_point(p);
        match separation_oracle_dkc(z, &y, g, k, oracle, rng)? {
            Separation::Accept => Ok(None),
            Separation::Violated(s) => Ok(Some(Column::induced(g, &s)?)),
        }
    };
    let solved = maximize_via_binary_search(&lp, beta, &mut sep, &cfg.ellipsoid)?;
    let primal = solve_restricted_primal(solved.columns.as_slice(), n, lp.coef)?;
    let (sol, rounding) = round_dkc(g, k, solved.columns.as_slice(), &primal.x, cfg, rng)?;
    let report = LpRunReport {
        lp_budget: solved.value,
        columns: solved.columns.len(),
        restricted_value: primal.value,
        ellipsoid_iterations: solved.iterations,
        borderline: solved.borderline,
        beta,
        padding,
        value: sol.value,
        rounding,
    };
    Ok((sol, report))
}

/// LP-based GP approximation.
pub fn approx_gp<R: Rng + ?Sized>(
    g: &Graph,
    r: usize,
    h: usize,
    oracle: &dyn BdksOracle,
    cfg: &LpConfig,
    rng: &mut R,
) -> Result<(GpSolution, LpRunReport)> {
    let n = g.n();
    let lp = DualLp::gp(g, r, h)?;
    let beta = beta_of(n, oracle.descriptor().alpha, cfg.beta_constant);
    let mut sep = |p: &DualPoint| -> Result<Option<Column>> {
        let (z, y) = clamp_point(p);
        match separation_oracle_gp(z, &y, g, h, oracle, rng)? {
            Separation::Accept => Ok(None),
            Separation::Violated(piece) => Ok(Some(Column::from_subgraph(&piece))),
        }
    };
    let solved = maximize_via_binary_search(&lp, beta, &mut sep, &cfg.ellipsoid)?;
    let primal = solve_restricted_primal(solved.columns.as_slice(), n, lp.coef)?;
    let (sol, rounding) = round_gp(g, r, h, solved.columns.as_slice(), &primal.x, cfg, rng)?;
    let report = LpRunReport {
        lp_budget: solved.value,
        columns: solved.columns.len(),
        restricted_value: primal.value,
        ellipsoid_iterations: solved.iterations,
        borderline: solved.borderline,
        beta,
        padding: 0,
        value: sol.value,
        rounding,
    };
    Ok((sol, report))
}

fn lp_descriptor(kind: ProblemKind, inner: &OracleDescriptor, c: f64) -> OracleDescriptor {
    // Constant part of the guarantee only; the polylog factor depends on N.
    let mut d = OracleDescriptor::heuristic(kind, &format!("lp({})", inner.name), 2000.0 * c * inner.alpha);
    d.ceiling = inner.ceiling;
    d
}

/// DkC solver running the LP pipeline with a fixed seed.
pub struct LpDkc {
    pub bdks: Box<dyn BdksOracle>,
    pub cfg: LpConfig,
    pub seed: u64,
}

impl DkcOracle for LpDkc {
    fn descriptor(&self) -> OracleDescriptor {
        lp_descriptor(ProblemKind::Dkc, &self.bdks.descriptor(), self.cfg.beta_constant)
    }

    fn solve(&self, g: &Graph, k: usize) -> Result<DkcSolution> {
        if k == 0 || !g.n().is_multiple_of(k) {
            return Err(Error::InvalidParameter(format!("k = {k} must divide n = {}", g.n())));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        Ok(approx_dkc(g, k, self.bdks.as_ref(), &self.cfg, &mut rng)?.0)
    }
}

/// GP solver running the LP pipeline with a fixed seed.
pub struct LpGp {
    pub bdks: Box<dyn BdksOracle>,
    pub cfg: LpConfig,
    pub seed: u64,
}

impl GpOracle for LpGp {
    fn descriptor(&self) -> OracleDescriptor {
        lp_descriptor(ProblemKind::Gp, &self.bdks.descriptor(), self.cfg.beta_constant)
    }

    fn solve(&self, g: &Graph, r: usize, h: usize) -> Result<GpSolution> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        Ok(approx_gp(g, r, h, self.bdks.as_ref(), &self.cfg, &mut rng)?.0)
    }
}
