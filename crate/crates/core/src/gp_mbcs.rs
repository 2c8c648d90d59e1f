//! Graph partitioning versus maximum bounded-crossing subgraphs: balanced-cut
//! decomposition, regrouping into good solutions, and the reductions both ways.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pairwise_disjoint, Edge, Graph, Subgraph, VertexSet};
use crate::oracle::{GpOracle, GpSolution, MbcsOracle, OracleDescriptor, ProblemKind};

/// Polylog exponents. Each threshold `log^e N` uses the field of the same name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exponents {
    pub e1: i32,
    pub e2: i32,
    pub e3: i32,
    pub e6: i32,
    pub e7: i32,
    pub e8: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutProfile {
    pub name: String,
    /// Balance constant: each side may keep at most `gamma·|E|` edges.
    pub gamma: f64,
    /// Largest vertex count cut by exhaustive enumeration.
    pub exact_limit: usize,
    /// Restarts of the move heuristic above `exact_limit`.
    pub restarts: usize,
    pub exponents: Exponents,
    /// `c` in the decomposition precondition `|E(H)| ≥ c·N·log^e6 N`.
    pub precondition_factor: f64,
    /// `c` in the case split `C* ≥ c·n·α·log^e7 n`.
    pub case1_factor: f64,
    /// `c` in the forest test `|E(F)| ≥ C*/(c·α·log^e7 n')`.
    pub case2_factor: f64,
    /// `c'` in the pruning test `h'' ≤ c'·h'·α·log^e8 n`.
    pub h_factor: f64,
    /// Also offer the top components of each MBCS answer, trimmed to `h'`, as a candidate.
    pub direct_packing: bool,
}

impl CutProfile {
    pub fn desk() -> Self {
        CutProfile {
            name: "desk".into(),
            gamma: 0.8,
            exact_limit: 18,
            restarts: 8,
            exponents: Exponents { e1: 0, e2: 0, e3: 0, e6: 0, e7: 0, e8: 0 },
            precondition_factor: 1.0,
            case1_factor: 1.0,
            case2_factor: 1.0,
            h_factor: 4.0,
            direct_packing: true,
        }
    }

    pub fn paper() -> Self {
        CutProfile {
            name: "paper".into(),
            exponents: Exponents { e1: 1, e2: 2, e3: 3, e6: 6, e7: 7, e8: 8 },
            precondition_factor: 4.0,
            case1_factor: 16.0,
            case2_factor: 64.0,
            ..Self::desk()
        }
    }
}

impl Default for CutProfile {
    fn default() -> Self {
        Self::desk()
    }
}

/// `max(log2 n, 1)^e`.
pub fn polylog(n: usize, e: i32) -> f64 {
    (n.max(2) as f64).log2().max(1.0).powi(e)
}

/// A vertex bipartition with its crossing edge count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    pub a: VertexSet,
    pub b: VertexSet,
    pub value: usize,
}

fn mask_counts(adj: &[u64], mask: u64, full: u64) -> (usize, usize, usize) {
    let mut inside_a = 0;
    let mut inside_b = 0;
    let mut across = 0;
    for (v, &nb) in adj.iter().enumerate() {
        if mask >> v & 1 == 1 {
            inside_a += (nb & mask).count_ones() as usize;
            across += (nb & !mask & full).count_ones() as usize;
        } else {
            inside_b += (nb & !mask & full).count_ones() as usize;
        }
    }
    (inside_a / 2, inside_b / 2, across)
}

/// A `gamma`-balanced cut of a connected graph. Up to `exact_limit` vertices the
/// minimum-value balanced cut is found by enumeration (ties go to the split with the
/// smaller larger side, then to the first mask). Larger graphs use a seeded sweep plus
/// single-vertex moves.
pub fn balanced_cut<R: Rng + ?Sized>(g: &Graph, profile: &CutProfile, rng: &mut R) -> Result<Cut> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Precondition("balanced cut needs at least 2 vertices".into()));
    }
    if g.connected_components().len() != 1 {
        return Err(Error::Precondition("balanced cut needs a connected graph".into()));
    }
    let limit = g.m() as f64 * profile.gamma + 1e-9;
    let side = if n <= profile.exact_limit.min(63) {
        exact_cut(g, limit)
    } else {
        heuristic_cut(g, limit, profile.restarts.max(1), rng)
    };
    let side = side.ok_or(Error::NoBalancedCut)?;
    let a: VertexSet = (0..n).filter(|&v| side[v]).collect();
    let b: VertexSet = (0..n).filter(|&v| !side[v]).collect();
    let value = g.edges().iter().filter(|&&(u, v)| side[u] != side[v]).count();
    Ok(Cut { a, b, value })
}

fn exact_cut(g: &Graph, limit: f64) -> Option<Vec<bool>> {
    let n = g.n();
    let adj: Vec<u64> = (0..n).map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << u)).collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best: Option<(usize, usize, u64)> = None;
    // vertex 0 always on side A
    for rest in 0..(1u64 << (n - 1)) {
        let mask = 1 | rest << 1;
        if mask == full {
            continue;
        }
        let (ea, eb, across) = mask_counts(&adj, mask, full);
        if ea as f64 > limit || eb as f64 > limit {
            continue;
        }
        let key = (across, ea.max(eb));
        if best.is_none_or(|(c, s, _)| key < (c, s)) {
            best = Some((key.0, key.1, mask));
        }
    }
    best.map(|(_, _, mask)| (0..n).map(|v| mask >> v & 1 == 1).collect())
}

struct CutState<'a> {
    g: &'a Graph,
    side: Vec<bool>,
    ea: usize,
    eb: usize,
    across: usize,
    count_a: usize,
}

impl CutState<'_> {
    fn flipped(&self, v: usize) -> (usize, usize, usize) {
        let same = self.g.neighbors(v).iter().filter(|&&u| self.side[u] == self.side[v]).count();
        let other = self.g.degree(v) - same;
        if self.side[v] {
            (self.ea - same, self.eb + other, self.across - other + same)
        } else {
            (self.ea + other, self.eb - same, self.across - other + same)
        }
    }

    fn flip(&mut self, v: usize) {
        let (ea, eb, across) = self.flipped(v);
        self.ea = ea;
        self.eb = eb;
        self.across = across;
        if self.side[v] {
            self.count_a -= 1;
        } else {
            self.count_a += 1;
        }
        self.side[v] = !self.side[v];
    }
}

fn heuristic_cut<R: Rng + ?Sized>(g: &Graph, limit: f64, restarts: usize, rng: &mut R) -> Option<Vec<bool>> {
    let n = g.n();
    let mut best: Option<((usize, usize), Vec<bool>)> = None;
    for attempt in 0..restarts {
        let start = if attempt == 0 { 0 } else { rng.gen_range(0..n) };
        // sweep: breadth-first prefixes from the start vertex
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        seen[start] = true;
        order.push(start);
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            let mut next: Vec<usize> = g.neighbors(u).iter().copied().filter(|&w| !seen[w]).collect();
            next.shuffle(rng);
            for w in next {
                seen[w] = true;
                order.push(w);
            }
        }
        let mut state = CutState { g, side: vec![false; n], ea: 0, eb: g.m(), across: 0, count_a: 0 };
        let mut sweep_best: Option<((usize, usize), usize)> = None;
        for (i, &v) in order[..n - 1].iter().enumerate() {
            state.flip(v);
            if state.ea as f64 <= limit && state.eb as f64 <= limit {
                let key = (state.across, state.ea.max(state.eb));
                if sweep_best.is_none_or(|(k, _)| key < k) {
                    sweep_best = Some((key, i + 1));
                }
            }
        }
        let Some((_, prefix)) = sweep_best else { continue };
        let mut state = CutState { g, side: vec![false; n], ea: 0, eb: g.m(), across: 0, count_a: 0 };
        for &v in &order[..prefix] {
            state.flip(v);
        }
        // moves: flip single vertices while the value strictly drops
        let mut improved = true;
        let mut passes = 0;
        while improved && passes < 4 * n {
            improved = false;
            passes += 1;
            for v in 0..n {
                let leaves_empty = if state.side[v] { state.count_a == 1 } else { state.count_a == n - 1 };
                if leaves_empty {
                    continue;
                }
                let (ea, eb, across) = state.flipped(v);
                if ea as f64 <= limit && eb as f64 <= limit && across < state.across {
                    state.flip(v);
                    improved = true;
                }
            }
        }
        let key = (state.across, state.ea.max(state.eb));
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, state.side));
        }
    }
    best.map(|(_, side)| side)
}

/// Upper bound on the crossing number: components with at most as many edges as
/// vertices (forests and unicyclic graphs) are planar and cost 0, any other component
/// costs `|E(c)|²`.
pub fn crossing_upper_bound(h: &Subgraph) -> u64 {
    h.components().iter().filter(|c| c.edge_count() > c.vertex_count()).map(|c| (c.edge_count() as u64).pow(2)).sum()
}

/// A GP solution in which every piece holds between `h/2` and `h` edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodGpSolution {
    r: usize,
    h: usize,
    pieces: Vec<Subgraph>,
}

impl GoodGpSolution {
    pub fn new(h: usize, pieces: Vec<Subgraph>) -> Result<Self> {
        for p in &pieces {
            let e = p.edge_count();
            if 2 * e < h || e > h {
                return Err(Error::Invariant(format!("piece with {e} edges is not within [{h}/2, {h}]")));
            }
        }
        if !pairwise_disjoint(&pieces) {
            return Err(Error::Invariant("pieces share a vertex".into()));
        }
        Ok(GoodGpSolution { r: pieces.len(), h, pieces })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn pieces(&self) -> &[Subgraph] {
        &self.pieces
    }

    pub fn value(&self) -> usize {
        self.pieces.iter().map(Subgraph::edge_count).sum()
    }

    pub fn to_gp(&self) -> GpSolution {
        GpSolution::new(self.pieces.clone(), self.r)
    }
}

/// Groups pieces by edge count into `[2^(i-1), 2^i)` and keeps the heaviest group
/// (the smallest `i` on ties), with `h* = 2^i`.
pub fn regroup_equal_size(pieces: &[Subgraph]) -> Result<GoodGpSolution> {
    let total: usize = pieces.iter().map(Subgraph::edge_count).sum();
    if total == 0 {
        return Err(Error::Precondition("every piece is empty".into()));
    }
    if !pairwise_disjoint(pieces) {
        return Err(Error::Precondition("pieces share a vertex".into()));
    }
    let mut groups: HashMap<u32, (usize, Vec<Subgraph>)> = HashMap::new();
    for p in pieces.iter().filter(|p| p.edge_count() > 0) {
        let i = usize::BITS - p.edge_count().leading_zeros();
        let entry = groups.entry(i).or_default();
        entry.0 += p.edge_count();
        entry.1.push(p.clone());
    }
    let count = groups.len();
    let (i, (weight, chosen)) = groups
        .into_iter()
        .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then_with(|| b.0.cmp(&a.0)))
        .expect("some piece has edges");
    if weight * count < total {
        return Err(Error::Invariant("heaviest group below the average".into()));
    }
    GoodGpSolution::new(1 << i, chosen)
}

/// The family left when splitting stops, with its bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitFamily {
    pub family: Vec<Subgraph>,
    pub original: usize,
    pub retained: usize,
    pub splits: usize,
    /// Splits refused because an edge's accumulated charge would pass 1/2.
    pub guarded: usize,
}

/// Repeatedly cuts active pieces of `h` by balanced cuts. A piece becomes inactive when
/// its cut has at least `|E|/log^e2 N` edges, or when splitting it would raise some
/// edge's charge above 1/2. The charge of a split is spread evenly over the split
/// piece's edges and bounds the number of deleted edges.
pub fn split_family<R: Rng + ?Sized>(h: &Subgraph, n: usize, profile: &CutProfile, rng: &mut R) -> Result<SplitFamily> {
    let threshold = polylog(n, profile.exponents.e2);
    let mut charge: HashMap<Edge, f64> = HashMap::new();
    let mut active: Vec<Subgraph> = h.components().into_iter().filter(|c| c.edge_count() > 0).collect();
    active.reverse();
    let mut done = Vec::new();
    let mut splits = 0;
    let mut guarded = 0;
    while let Some(piece) = active.pop() {
        let (local, map) = piece.compact();
        let cut = balanced_cut(&local, profile, rng)?;
        let m = piece.edge_count();
        if cut.value as f64 >= m as f64 / threshold {
            done.push(piece);
            continue;
        }
        let step = cut.value as f64 / m as f64;
        let peak = piece.edges().iter().map(|e| charge.get(e).copied().unwrap_or(0.0)).fold(0.0, f64::max);
        if peak + step > 0.5 + 1e-12 {
            guarded += 1;
            done.push(piece);
            continue;
        }
        for &e in piece.edges() {
            *charge.entry(e).or_insert(0.0) += step;
        }
        splits += 1;
        let mut parts = Vec::new();
        for side in [&cut.a, &cut.b] {
            let keep: VertexSet = side.iter().map(|v| map[v]).collect();
            parts.extend(piece.restrict(&keep).components().into_iter().filter(|c| c.edge_count() > 0));
        }
        for p in parts.into_iter().rev() {
            active.push(p);
        }
    }
    done.sort_by(|a, b| a.vertices().cmp(b.vertices()));
    let retained = done.iter().map(Subgraph::edge_count).sum();
    let original = h.edge_count();
    if 2 * retained < original {
        return Err(Error::Invariant(format!("split kept {retained} of {original} edges")));
    }
    Ok(SplitFamily { family: done, original, retained, splits, guarded })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub r: usize,
    pub h: usize,
    pub good: GoodGpSolution,
    pub split: SplitFamily,
    pub dense: usize,
    pub sparse: usize,
}

/// Splits a bounded-crossing subgraph `h` of `g` into a good GP solution with
/// `r·h² ≤ L·log^e6 N` and `r·h ≥ |E(h)|/(16·log^e1 N)`. Either inequality failing is
/// reported as [`Error::ProfileInequality`].
pub fn decompose_bounded_crossing<R: Rng + ?Sized>(
    g: &Graph,
    budget: u64,
    h: &Subgraph,
    profile: &CutProfile,
    rng: &mut R,
) -> Result<Decomposition> {
    h.validate(g)?;
    let n = g.n();
    let ex = profile.exponents;
    let needed = profile.precondition_factor * n as f64 * polylog(n, ex.e6);
    if (h.edge_count() as f64) < needed {
        return Err(Error::Precondition(format!("subgraph has {} edges, needs {needed}", h.edge_count())));
    }
    let split = split_family(h, n, profile, rng)?;
    let dense_bar = polylog(n, ex.e6);
    let (dense, sparse): (Vec<Subgraph>, Vec<Subgraph>) =
        split.family.iter().cloned().partition(|p| p.edge_count() as f64 >= p.vertex_count() as f64 * dense_bar);
    if dense.is_empty() {
        return Err(Error::ProfileInequality("no dense piece after splitting".into()));
    }
    let good = regroup_equal_size(&dense)?;
    let (r, hh) = (good.r(), good.h());
    let lhs = r as f64 * (hh as f64).powi(2);
    let rhs = budget as f64 * polylog(n, ex.e6);
    if lhs > rhs {
        return Err(Error::ProfileInequality(format!("r·h² = {lhs} exceeds L·log^e6 N = {rhs}")));
    }
    let floor = h.edge_count() as f64 / (16.0 * polylog(n, ex.e1));
    if ((r * hh) as f64) < floor {
        return Err(Error::ProfileInequality(format!("r·h = {} below {floor}", r * hh)));
    }
    Ok(Decomposition { r, h: hh, good, split, dense: dense.len(), sparse: sparse.len() })
}

/// A spanning forest of `g`, taking edges greedily in canonical order.
pub fn spanning_forest(g: &Graph) -> Subgraph {
    maximal_bounded_forest(g, usize::MAX)
}

/// Greedy forest in canonical edge order that keeps every degree at most `h`.
/// Its vertices are the endpoints of the chosen edges.
pub fn maximal_bounded_forest(g: &Graph, h: usize) -> Subgraph {
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut degree = vec![0usize; g.n()];
    let mut chosen = Vec::new();
    for &(u, v) in g.edges() {
        if degree[u] >= h || degree[v] >= h {
            continue;
        }
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a == b {
            continue;
        }
        parent[a] = b;
        degree[u] += 1;
        degree[v] += 1;
        chosen.push((u, v));
    }
    let vertices = chosen.iter().flat_map(|&(u, v)| [u, v]).collect();
    Subgraph::from_parts_unchecked(vertices, chosen)
}

/// Cuts a tree of maximum degree `delta` into vertex-disjoint pieces of `⌈delta/2⌉` to
/// `delta` edges, keeping at least half of its edges.
pub fn cut_tree(t: &Subgraph, delta: usize) -> Result<Vec<Subgraph>> {
    let m = t.edge_count();
    if delta == 0 {
        return Err(Error::Precondition("delta must be positive".into()));
    }
    if m + 1 != t.vertex_count() || t.components().len() != 1 {
        return Err(Error::Precondition("input is not a tree".into()));
    }
    if 2 * m < delta {
        return Err(Error::Precondition(format!("tree has {m} edges, fewer than {delta}/2")));
    }
    let (local, map) = t.compact();
    let n = local.n();
    if (0..n).any(|v| local.degree(v) > delta) {
        return Err(Error::Precondition(format!("tree degree exceeds {delta}")));
    }
    // root at local vertex 0; breadth-first order gives parents and depths
    let mut parent = vec![usize::MAX; n];
    let mut order = vec![0];
    parent[0] = 0;
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &w in local.neighbors(u) {
            if parent[w] == usize::MAX {
                parent[w] = u;
                order.push(w);
            }
        }
    }
    let mut alive = vec![true; n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &v in &order[1..] {
        children[parent[v]].push(v);
    }
    let mut edges_left = m;
    let mut raw: Vec<Vec<usize>> = Vec::new();
    while edges_left > delta {
        // deepest non-leaf vertex: all of its children are leaves
        let u = *order
            .iter()
            .rev()
            .find(|&&v| alive[v] && children[v].iter().any(|&c| alive[c]))
            .expect("a tree with edges has a non-leaf vertex");
        debug_assert!(u != 0, "root only remains with at most delta edges");
        let mut piece = vec![u];
        piece.extend(children[u].iter().copied().filter(|&c| alive[c]));
        edges_left -= piece.len();
        for &v in &piece {
            alive[v] = false;
        }
        raw.push(piece);
    }
    raw.push((0..n).filter(|&v| alive[v]).collect());
    let to_sub = |vs: &[usize]| -> Subgraph {
        let keep: VertexSet = vs.iter().map(|&v| map[v]).collect();
        t.restrict(&keep)
    };
    let mut pieces: Vec<Subgraph> = raw.iter().map(|p| to_sub(p)).filter(|p| p.edge_count() > 0).collect();
    let kept_before: usize = pieces.iter().map(Subgraph::edge_count).sum();
    if 2 * kept_before < m {
        return Err(Error::Invariant(format!("tree cutting kept {kept_before} of {m} edges")));
    }
    let half = delta.div_ceil(2);
    let mut out: Vec<Subgraph> = Vec::new();
    let mut bucket: Option<Subgraph> = None;
    pieces.sort_by(|a, b| b.edge_count().cmp(&a.edge_count()).then_with(|| a.vertices().cmp(b.vertices())));
    for p in pieces {
        if p.edge_count() >= half {
            out.push(p);
            continue;
        }
        let merged = match bucket.take() {
            Some(b) => b.union(&p),
            None => p,
        };
        if merged.edge_count() >= half {
            out.push(merged);
        } else {
            bucket = Some(merged);
        }
    }
    if let Some(left) = bucket {
        // attach the undersized remainder to the smallest piece it fits into
        if let Some(target) =
            out.iter_mut().filter(|p| p.edge_count() + left.edge_count() <= delta).min_by_key(|p| p.edge_count())
        {
            *target = target.union(&left);
        }
    }
    Ok(out)
}

/// Repeatedly unions the two pieces with fewest edges until at most `r` remain.
/// Requires every piece to have at most `⌈h/2⌉` edges and all pieces together at most
/// `r·⌈h/2⌉`; then no merged piece exceeds `h`. Empty pieces are dropped first.
pub fn merge_clusters(pieces: &[Subgraph], r: usize, h: usize) -> Result<Vec<Subgraph>> {
    if r == 0 || h == 0 {
        return Err(Error::Precondition("r and h must be positive".into()));
    }
    let half = h.div_ceil(2);
    let total: usize = pieces.iter().map(Subgraph::edge_count).sum();
    if total > r * half {
        return Err(Error::Precondition(format!("{total} edges exceed r·⌈h/2⌉ = {}", r * half)));
    }
    if let Some(p) = pieces.iter().find(|p| p.edge_count() > half) {
        return Err(Error::Precondition(format!("piece with {} edges exceeds ⌈h/2⌉ = {half}", p.edge_count())));
    }
    if !pairwise_disjoint(pieces) {
        return Err(Error::Precondition("pieces share a vertex".into()));
    }
    let mut out: Vec<Subgraph> = pieces.iter().filter(|p| p.edge_count() > 0).cloned().collect();
    while out.len() > r {
        out.sort_by(|a, b| a.edge_count().cmp(&b.edge_count()).then_with(|| a.vertices().cmp(b.vertices())));
        let first = out.remove(0);
        let second = out.remove(0);
        out.push(first.union(&second));
    }
    if let Some(p) = out.iter().find(|p| p.edge_count() > h) {
        return Err(Error::Invariant(format!("merged piece with {} edges exceeds {h}", p.edge_count())));
    }
    out.sort_by(|a, b| a.vertices().cmp(b.vertices()));
    Ok(out)
}

/// Removes edges from the end of the list until at most `budget` remain in total.
fn trim_total(pieces: Vec<Subgraph>, budget: usize) -> Vec<Subgraph> {
    let mut left = budget;
    pieces
        .into_iter()
        .map(|p| {
            let keep = p.edge_count().min(left);
            left -= keep;
            p.trim_edges(keep)
        })
        .filter(|p| p.edge_count() > 0)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MbcsCandidate {
    pub r: usize,
    pub h: usize,
    pub eligible: bool,
    pub gp_value: usize,
    pub thinned: usize,
    pub certificate: u64,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MbcsReport {
    pub subgraph: Subgraph,
    pub value: usize,
    pub forest: usize,
    pub certificate: u64,
    pub candidates: Vec<MbcsCandidate>,
}

/// MBCS through GP. Every eligible pair (`h` a power of two, `r = ⌊L·log^e6 N/h²⌋`) and,
/// for each `h`, the pair `r = N` are handed to the GP oracle. Each piece of an answer is
/// thinned to `⌊|E|/log^e3 N⌋` edges and the union is kept if its crossing bound is at
/// most `L`. The result is the best such union or a spanning forest, whichever is larger.
pub fn mbcs_via_gp(g: &Graph, budget: u64, oracle: &dyn GpOracle, profile: &CutProfile) -> Result<MbcsReport> {
    let n = g.n();
    let ex = profile.exponents;
    let forest = spanning_forest(g);
    let mut best = forest.clone();
    let mut candidates = Vec::new();
    let thin = polylog(n, ex.e3);
    let mut h = 1usize;
    loop {
        let scaled = budget as f64 * polylog(n, ex.e6) / (h as f64 * h as f64);
        let eligible_r = scaled.floor().min((n / 2) as f64) as usize;
        let mut pairs = Vec::new();
        if eligible_r >= 1 {
            pairs.push((eligible_r, true));
        }
        if eligible_r < n / 2 {
            pairs.push((n / 2, false));
        }
        for (r, eligible) in pairs {
            let sol = oracle.solve(g, r, h)?;
            sol.validate(g, r, h).map_err(|e| Error::Oracle(format!("GP answer rejected: {e}")))?;
            let mut union = Subgraph::empty();
            for p in sol.pieces.iter().filter(|p| p.edge_count() > 0) {
                let keep = (p.edge_count() as f64 / thin + 1e-9).floor() as usize;
                union = union.union(&p.trim_edges(keep));
            }
            let certificate = crossing_upper_bound(&union);
            let accepted = certificate <= budget;
            if eligible && !accepted {
                return Err(Error::Invariant(format!(
                    "eligible pair ({r}, {h}) produced crossing bound {certificate}"
                )));
            }
            candidates.push(MbcsCandidate {
                r,
                h,
                eligible,
                gp_value: sol.value,
                thinned: union.edge_count(),
                certificate,
                accepted,
            });
            if accepted && union.edge_count() > best.edge_count() {
                best = union;
            }
        }
        if h >= g.m() {
            break;
        }
        h *= 2;
    }
    let certificate = crossing_upper_bound(&best);
    debug_assert!(certificate <= budget);
    Ok(MbcsReport { value: best.edge_count(), forest: forest.edge_count(), subgraph: best, certificate, candidates })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GuessTrace {
    pub guess: usize,
    pub case: String,
    pub value: usize,
    pub oracle_calls: usize,
    pub prunes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GpViaMbcsReport {
    pub solution: GpSolution,
    pub value: usize,
    pub trace: Vec<GuessTrace>,
}

struct Case1<'a> {
    oracle: &'a dyn MbcsOracle,
    profile: &'a CutProfile,
    alpha: f64,
    cache: HashMap<(usize, u64), Subgraph>,
}

impl Case1<'_> {
    fn mbcs(&mut self, g: &Graph, budget: u64, tag: usize, trace: &mut GuessTrace) -> Result<Subgraph> {
        if let Some(h) = self.cache.get(&(tag, budget)) {
            return Ok(h.clone());
        }
        trace.oracle_calls += 1;
        let h = self.oracle.solve(g, budget)?;
        h.validate(g).map_err(|e| Error::Oracle(format!("MBCS answer rejected: {e}")))?;
        self.cache.insert((tag, budget), h.clone());
        Ok(h)
    }

    /// Best solution over all `(r', h')` with `r'h' ≥ C*/(4 log^e1 n)`.
    fn run<R: Rng + ?Sized>(
        &mut self,
        g: &Graph,
        tag: usize,
        r: usize,
        h: usize,
        guess: usize,
        trace: &mut GuessTrace,
        rng: &mut R,
    ) -> Result<Vec<Subgraph>> {
        let n = g.n();
        let ex = self.profile.exponents;
        let floor = guess as f64 / (4.0 * polylog(n, ex.e1));
        let mut best: Vec<Subgraph> = Vec::new();
        let mut best_value = 0;
        for rp in 1..=r.min(n / 2).max(1) {
            for hp in 1..=h.min(g.m()) {
                if ((rp * hp) as f64) < floor {
                    continue;
                }
                let budget = (rp * hp * hp) as u64;
                let found = self.mbcs(g, budget, tag, trace)?;
                let mut candidates: Vec<Vec<Subgraph>> = Vec::new();
                if self.profile.direct_packing {
                    let mut comps: Vec<Subgraph> =
                        found.components().into_iter().filter(|c| c.edge_count() > 0).collect();
                    comps.sort_by(|a, b| {
                        b.edge_count().cmp(&a.edge_count()).then_with(|| a.vertices().cmp(b.vertices()))
                    });
                    candidates.push(comps.into_iter().take(rp).map(|c| c.trim_edges(hp)).collect());
                }
                let small = guess as f64 / (4.0 * self.alpha * polylog(n, ex.e1));
                if (found.edge_count() as f64) < small {
                    trace.prunes.push(format!("({rp},{hp}): small MBCS answer"));
                } else {
                    match decompose_bounded_crossing(g, budget, &found, self.profile, rng) {
                        Ok(dec) => {
                            let cap = self.profile.h_factor * hp as f64 * self.alpha * polylog(n, ex.e8);
                            if dec.h as f64 > cap {
                                trace.prunes.push(format!("({rp},{hp}): h'' = {} too large", dec.h));
                            } else {
                                let half = hp.div_ceil(2);
                                let trimmed: Vec<Subgraph> =
                                    dec.good.pieces().iter().map(|p| p.trim_edges(half)).collect();
                                let trimmed = trim_total(trimmed, rp * half);
                                candidates.push(merge_clusters(&trimmed, rp, hp)?);
                            }
                        }
                        Err(e @ (Error::Precondition(_) | Error::ProfileInequality(_))) => {
                            trace.prunes.push(format!("({rp},{hp}): {e}"));
                        }
                        Err(e) => return Err(e),
                    }
                }
                for c in candidates {
                    let value: usize = c.iter().map(Subgraph::edge_count).sum();
                    if value > best_value {
                        best_value = value;
                        best = c;
                    }
                }
            }
        }
        Ok(best)
    }
}

/// Forest route: cut each tree of a maximal degree-`h` forest, trim pieces to `⌈h/2⌉`
/// edges and the total to `r·⌈h/2⌉`, then merge down to `r` pieces.
fn forest_pieces(forest: &Subgraph, r: usize, h: usize) -> Result<Vec<Subgraph>> {
    let half = h.div_ceil(2);
    let mut pieces = Vec::new();
    for tree in forest.components().into_iter().filter(|t| t.edge_count() > 0) {
        if tree.vertex_count() <= h {
            pieces.push(tree);
        } else {
            pieces.extend(cut_tree(&tree, h)?);
        }
    }
    let trimmed: Vec<Subgraph> = pieces.iter().map(|p| p.trim_edges(half)).collect();
    merge_clusters(&trim_total(trimmed, r * half), r, h)
}

/// GP through MBCS, trying the guesses `C*` among the powers of two up to `|E|` and
/// `|E|` itself, and returning the best solution found.
pub fn gp_via_mbcs<R: Rng + ?Sized>(
    g: &Graph,
    r: usize,
    h: usize,
    oracle: &dyn MbcsOracle,
    profile: &CutProfile,
    rng: &mut R,
) -> Result<GpViaMbcsReport> {
    if r == 0 || h == 0 {
        return Err(Error::InvalidParameter("r and h must be positive".into()));
    }
    let m = g.m();
    let n = g.n();
    let ex = profile.exponents;
    let alpha = oracle.descriptor().alpha;
    let mut guesses: Vec<usize> = (0..usize::BITS).map(|i| 1usize << i).take_while(|&c| c <= m).collect();
    if m > 0 && guesses.last() != Some(&m) {
        guesses.push(m);
    }
    let mut case1 = Case1 { oracle, profile, alpha, cache: HashMap::new() };
    let mut best: Vec<Subgraph> = Vec::new();
    let mut best_value = 0;
    let mut trace = Vec::new();
    let forest = maximal_bounded_forest(g, h);
    let support = forest.vertices().clone();
    let (inner, inner_map) = g.relabel(&support)?;
    for guess in guesses {
        let mut t = GuessTrace { guess, ..GuessTrace::default() };
        let found = if guess as f64 >= profile.case1_factor * n as f64 * alpha * polylog(n, ex.e7) {
            t.case = "1".into();
            case1.run(g, 0, r, h, guess, &mut t, rng)?
        } else {
            let n2 = support.len();
            let need = guess as f64 / (profile.case2_factor * alpha * polylog(n2, ex.e7));
            if forest.edge_count() as f64 >= need {
                t.case = "2a".into();
                forest_pieces(&forest, r, h)?
            } else {
                t.case = "2b".into();
                let mut inner_best: Vec<Subgraph> = Vec::new();
                let mut inner_value = 0;
                for sub_guess in [guess.div_ceil(2), guess] {
                    let local = case1.run(&inner, 1, r, h, sub_guess, &mut t, rng)?;
                    let value: usize = local.iter().map(Subgraph::edge_count).sum();
                    if value > inner_value {
                        inner_value = value;
                        inner_best = local;
                    }
                }
                inner_best
                    .iter()
                    .map(|p| {
                        let edges: Vec<Edge> = p.edges().iter().map(|&(u, v)| (inner_map[u], inner_map[v])).collect();
                        Subgraph::from_edges(g, edges)
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        let value: usize = found.iter().map(Subgraph::edge_count).sum();
        t.value = value;
        trace.push(t);
        if value > best_value {
            best_value = value;
            best = found;
        }
    }
    let solution = GpSolution::new(best, r);
    solution
        .validate(g, r, h)
        .map_err(|e| Error::Invariant(format!("GP via MBCS produced an invalid solution: {e}")))?;
    Ok(GpViaMbcsReport { value: solution.value, solution, trace })
}

/// Exhaustive MBCS against the crossing surrogate: the largest edge subset whose
/// [`crossing_upper_bound`] is at most `L`. Sizes are tried from `|E|` down and the first
/// feasible subset in combination order wins.
pub fn solve_mbcs_exact(g: &Graph, budget: u64, ceiling: f64) -> Result<Subgraph> {
    let m = g.m();
    let space = 2f64.powi(m as i32);
    if space > ceiling {
        return Err(Error::CeilingExceeded { what: "exact MBCS", size: space, ceiling });
    }
    let edges = g.edges();
    for size in (0..=m).rev() {
        let mut pick: Vec<usize> = (0..size).collect();
        loop {
            let chosen: Vec<Edge> = pick.iter().map(|&i| edges[i]).collect();
            let sub = Subgraph::from_edges(g, chosen)?;
            if crossing_upper_bound(&sub) <= budget {
                return Ok(sub);
            }
            if !crate::dks::next_combination(&mut pick, m) {
                break;
            }
        }
    }
    Ok(Subgraph::empty())
}

/// Spanning forest first, then every other edge in canonical order whose addition keeps
/// the crossing bound within `L`.
pub fn greedy_mbcs(g: &Graph, budget: u64) -> Subgraph {
    let mut current = spanning_forest(g);
    for &e in g.edges() {
        if current.edges().binary_search(&e).is_ok() {
            continue;
        }
        let (u, v) = e;
        let grown = current.union(&Subgraph::from_parts_unchecked(VertexSet::new(vec![u, v]), vec![e]));
        if crossing_upper_bound(&grown) <= budget {
            current = grown;
        }
    }
    current
}

pub const DEFAULT_MBCS_CEILING: f64 = 4.0e6;

#[derive(Clone, Copy, Debug)]
pub struct ExactMbcs {
    pub ceiling: f64,
}

impl Default for ExactMbcs {
    fn default() -> Self {
        ExactMbcs { ceiling: DEFAULT_MBCS_CEILING }
    }
}

impl MbcsOracle for ExactMbcs {
    fn descriptor(&self) -> OracleDescriptor {
        OracleDescriptor::exact(ProblemKind::Mbcs, "exact-surrogate", self.ceiling)
    }

    fn solve(&self, g: &Graph, budget: u64) -> Result<Subgraph> {
        solve_mbcs_exact(g, budget, self.ceiling)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct GreedyMbcs;

impl MbcsOracle for GreedyMbcs {
    fn descriptor(&self) -> OracleDescriptor {
        OracleDescriptor::heuristic(ProblemKind::Mbcs, "greedy", f64::INFINITY)
    }

    fn solve(&self, g: &Graph, budget: u64) -> Result<Subgraph> {
        Ok(greedy_mbcs(g, budget))
    }
}

/// MBCS solver backed by a GP solver.
pub struct MbcsViaGp {
    pub gp: Box<dyn GpOracle>,
    pub profile: CutProfile,
}

impl MbcsOracle for MbcsViaGp {
    fn descriptor(&self) -> OracleDescriptor {
        let inner = self.gp.descriptor();
        OracleDescriptor::heuristic(ProblemKind::Mbcs, &format!("via-gp({})", inner.name), inner.alpha)
    }

    fn solve(&self, g: &Graph, budget: u64) -> Result<Subgraph> {
        Ok(mbcs_via_gp(g, budget, self.gp.as_ref(), &self.profile)?.subgraph)
    }
}

/// GP solver backed by an MBCS solver.
pub struct GpViaMbcs {
    pub mbcs: Box<dyn MbcsOracle>,
    pub profile: CutProfile,
    pub seed: u64,
}

impl GpOracle for GpViaMbcs {
    fn descriptor(&self) -> OracleDescriptor {
        let inner = self.mbcs.descriptor();
        OracleDescriptor::heuristic(ProblemKind::Gp, &format!("via-mbcs({})", inner.name), inner.alpha.powi(2))
    }

    fn solve(&self, g: &Graph, r: usize, h: usize) -> Result<GpSolution> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        Ok(gp_via_mbcs(g, r, h, self.mbcs.as_ref(), &self.profile, &mut rng)?.solution)
    }
}
