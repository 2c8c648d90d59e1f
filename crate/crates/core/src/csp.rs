//! Bipartite 2-CSP instances, their constraint and assignment graphs, and the
//! decomposition engine that splits the constraint graph into a bad part and good rounds.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::graph::{content_lines, parse_numbers, BipartiteGraph, Edge, SidedSet};
use crate::oracle::BdksOracle;

/// Largest number of assignments the exhaustive verifiers may enumerate.
pub const DEFAULT_CSP_CEILING: f64 = 1e7;

/// Hard cap on Step-4 draws when `20·β³` is astronomically large.
const SAMPLE_CAP: usize = 100_000;

/// One constraint `C(x, y)` with its satisfying pairs (0-based values, sorted).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub x: usize,
    pub y: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl Constraint {
    pub fn satisfied_by(&self, a: usize, b: usize) -> bool {
        self.pairs.binary_search(&(a, b)).is_ok()
    }

    /// Largest number of pairs sharing a left or a right value.
    pub fn degree(&self) -> usize {
        let mut left: HashMap<usize, usize> = HashMap::new();
        let mut right: HashMap<usize, usize> = HashMap::new();
        for &(a, b) in &self.pairs {
            *left.entry(a).or_default() += 1;
            *right.entry(b).or_default() += 1;
        }
        left.values().chain(right.values()).copied().max().unwrap_or(0)
    }
}

/// Values for every variable, 0-based. Value `0` is printed as `1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
}

impl Assignment {
    pub fn zeros(inst: &Csp2Instance) -> Self {
        Assignment { x: vec![0; inst.nx()], y: vec![0; inst.ny()] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Csp2Instance {
    nx: usize,
    ny: usize,
    alphabet: usize,
    constraints: Vec<Constraint>,
    index: HashMap<(usize, usize), usize>,
}

impl Csp2Instance {
    pub fn new(nx: usize, ny: usize, alphabet: usize, constraints: Vec<Constraint>) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::InvalidParameter("alphabet must be nonempty".into()));
        }
        let mut index = HashMap::with_capacity(constraints.len());
        let mut list = Vec::with_capacity(constraints.len());
        for (i, mut c) in constraints.into_iter().enumerate() {
            if c.x >= nx || c.y >= ny {
                return Err(Error::InvalidEdge(c.x, c.y));
            }
            if let Some(&(a, b)) = c.pairs.iter().find(|&&(a, b)| a >= alphabet || b >= alphabet) {
                return Err(Error::InvalidParameter(format!("pair ({a}, {b}) outside alphabet {alphabet}")));
            }
            if index.insert((c.x, c.y), i).is_some() {
                return Err(Error::InvalidParameter(format!("second constraint on ({}, {})", c.x, c.y)));
            }
            c.pairs.sort_unstable();
            c.pairs.dedup();
            list.push(c);
        }
        Ok(Csp2Instance { nx, ny, alphabet, constraints: list, index })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    /// `|C|·A² + |X| + |Y|`.
    pub fn size(&self) -> usize {
        self.m() * self.alphabet * self.alphabet + self.nx + self.ny
    }

    /// Smallest `d` for which the instance is d-to-d.
    pub fn max_degree(&self) -> usize {
        self.constraints.iter().map(Constraint::degree).max().unwrap_or(0)
    }

    pub fn constraint_at(&self, x: usize, y: usize) -> Option<usize> {
        self.index.get(&(x, y)).copied()
    }

    /// How many of the listed constraints the assignment satisfies. Out-of-range ids
    /// and missing values count as unsatisfied.
    pub fn count_satisfied(&self, ids: &[usize], asg: &Assignment) -> usize {
        ids.iter()
            .filter_map(|&i| self.constraints.get(i))
            .filter(|c| match (asg.x.get(c.x), asg.y.get(c.y)) {
                (Some(&a), Some(&b)) => c.satisfied_by(a, b),
                _ => false,
            })
            .count()
    }

    pub fn all_ids(&self) -> Vec<usize> {
        (0..self.m()).collect()
    }

    fn check_ids(&self, ids: &[usize]) -> Result<()> {
        match ids.iter().find(|&&i| i >= self.m()) {
            Some(&i) => Err(Error::InvalidParameter(format!("constraint {i} does not exist"))),
            None => Ok(()),
        }
    }

    /// The `|X| |Y| A |C|` document with 1-based values.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {} {}\n", self.nx, self.ny, self.alphabet, self.m());
        for c in &self.constraints {
            let _ = writeln!(out, "{} {} {}", c.x, c.y, c.pairs.len());
            for &(a, b) in &c.pairs {
                let _ = writeln!(out, "{} {}", a + 1, b + 1);
            }
        }
        out
    }
}

/// Parses the `|X| |Y| A |C|` header, then per constraint a line `x y p` followed by
/// `p` lines `a a'` with values in `1..=A`.
pub fn parse_csp(text: &str) -> std::result::Result<Csp2Instance, ParseError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or(ParseError::Header)?;
    let h = parse_numbers(header, hl, 4).map_err(|_| ParseError::Header)?;
    let (nx, ny, alphabet, m) = (h[0], h[1], h[2], h[3]);
    if alphabet == 0 {
        return Err(ParseError::Header);
    }
    let mut seen = HashMap::new();
    let mut constraints = Vec::with_capacity(m);
    while let Some((lineno, line)) = lines.next() {
        let head = parse_numbers(line, lineno, 3)?;
        let (x, y, p) = (head[0], head[1], head[2]);
        if x >= nx {
            return Err(ParseError::OutOfRange { line: lineno, id: x });
        }
        if y >= ny {
            return Err(ParseError::OutOfRange { line: lineno, id: y });
        }
        if seen.insert((x, y), lineno).is_some() {
            return Err(ParseError::DuplicateConstraint { line: lineno, x, y });
        }
        let mut pairs = Vec::with_capacity(p);
        for _ in 0..p {
            let (pl, pline) = lines.next().ok_or(ParseError::Count { expected: p, found: pairs.len() })?;
            let v = parse_numbers(pline, pl, 2)?;
            for value in [v[0], v[1]] {
                if value == 0 || value > alphabet {
                    return Err(ParseError::Value { line: pl, value });
                }
            }
            let pair = (v[0] - 1, v[1] - 1);
            if pairs.contains(&pair) {
                return Err(ParseError::Duplicate { line: pl, u: v[0], v: v[1] });
            }
            pairs.push(pair);
        }
        constraints.push(Constraint { x, y, pairs });
    }
    if constraints.len() != m {
        return Err(ParseError::Count { expected: m, found: constraints.len() });
    }
    Ok(Csp2Instance::new(nx, ny, alphabet, constraints).expect("parser enforces every instance rule"))
}

/// One edge `(x, y)` per constraint. Edge `(x, y)` represents `constraint_at(x, y)`.
pub fn constraint_graph(inst: &Csp2Instance) -> Result<BipartiteGraph> {
    BipartiteGraph::new(inst.nx(), inst.ny(), inst.constraints().iter().map(|c| (c.x, c.y)))
}

/// Constraint ids of a set of constraint-graph edges.
pub fn constraints_of(inst: &Csp2Instance, edges: &[Edge]) -> Result<Vec<usize>> {
    let mut ids = edges
        .iter()
        .map(|&(x, y)| inst.constraint_at(x, y).ok_or(Error::InvalidEdge(x, y)))
        .collect::<Result<Vec<_>>>()?;
    ids.sort_unstable();
    Ok(ids)
}

fn sub_graph(inst: &Csp2Instance, ids: &[usize]) -> BipartiteGraph {
    BipartiteGraph::new(inst.nx(), inst.ny(), ids.iter().map(|&i| (inst.constraints[i].x, inst.constraints[i].y)))
        .expect("distinct constraints occupy distinct pairs")
}

/// Maximum number of the listed constraints satisfiable at once, with a witness.
/// Enumerates the side with fewer touched variables and optimizes the other side per variable.
pub fn max_satisfied(inst: &Csp2Instance, ids: &[usize], ceiling: f64) -> Result<(usize, Assignment)> {
    inst.check_ids(ids)?;
    let mut ids = ids.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let mut tx: Vec<usize> = ids.iter().map(|&i| inst.constraints[i].x).collect();
    let mut ty: Vec<usize> = ids.iter().map(|&i| inst.constraints[i].y).collect();
    tx.sort_unstable();
    tx.dedup();
    ty.sort_unstable();
    ty.dedup();
    let flip = ty.len() < tx.len();
    let (outer, inner) = if flip { (&ty, &tx) } else { (&tx, &ty) };
    let a = inst.alphabet();
    let space = (a as f64).powi(outer.len() as i32);
    if space > ceiling {
        return Err(Error::CeilingExceeded { what: "exhaustive CSP search", size: space, ceiling });
    }
    let outer_pos: HashMap<usize, usize> = outer.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // per inner variable: list of (outer slot, constraint)
    let mut by_inner: Vec<Vec<(usize, &Constraint)>> = vec![Vec::new(); inner.len()];
    let inner_pos: HashMap<usize, usize> = inner.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    for &i in &ids {
        let c = &inst.constraints[i];
        let (o, n) = if flip { (c.y, c.x) } else { (c.x, c.y) };
        by_inner[inner_pos[&n]].push((outer_pos[&o], c));
    }
    let mut values = vec![0usize; outer.len()];
    let mut best: Option<(usize, Vec<usize>, Vec<usize>)> = None;
    let mut score = vec![0usize; a];
    loop {
        let mut total = 0;
        let mut picks = Vec::with_capacity(inner.len());
        for list in &by_inner {
            score.iter_mut().for_each(|s| *s = 0);
            for &(slot, c) in list {
                let ov = values[slot];
                for (b, s) in score.iter_mut().enumerate() {
                    let ok = if flip { c.satisfied_by(b, ov) } else { c.satisfied_by(ov, b) };
                    if ok {
                        *s += 1;
                    }
                }
            }
            let (pick, &s) = score.iter().enumerate().rev().max_by_key(|&(_, s)| s).expect("alphabet is nonempty");
            total += s;
            picks.push(pick);
        }
        if best.as_ref().is_none_or(|b| total > b.0) {
            best = Some((total, values.clone(), picks));
        }
        let mut i = 0;
        while i < values.len() {
            values[i] += 1;
            if values[i] < a {
                break;
            }
            values[i] = 0;
            i += 1;
        }
        if i == values.len() {
            break;
        }
    }
    let (total, ov, iv) = best.expect("at least one assignment was scored");
    let mut asg = Assignment::zeros(inst);
    let (xs, ys) = if flip { (&iv, &ov) } else { (&ov, &iv) };
    let (xvars, yvars) = if flip { (inner, outer) } else { (outer, inner) };
    for (&v, &val) in xvars.iter().zip(xs.iter()) {
        asg.x[v] = val;
    }
    for (&v, &val) in yvars.iter().zip(ys.iter()) {
        asg.y[v] = val;
    }
    Ok((total, asg))
}

/// Whether no assignment satisfies more than `|C'|/γ` of the listed constraints.
pub fn verify_bad_set(inst: &Csp2Instance, ids: &[usize], gamma: f64) -> Result<bool> {
    let (best, _) = max_satisfied(inst, ids, DEFAULT_CSP_CEILING)?;
    Ok(best as f64 * gamma <= ids.len() as f64)
}

/// Whether the assignment satisfies at least `|E'|/β³` of the listed constraints.
pub fn verify_good_witness(inst: &Csp2Instance, ids: &[usize], asg: &Assignment, beta: f64) -> bool {
    inst.count_satisfied(ids, asg) >= good_quota(ids.len(), beta)
}

/// `⌈m/β³⌉`, tolerant of rounding at exact multiples.
pub fn good_quota(m: usize, beta: f64) -> usize {
    let q = m as f64 / beta.powi(3);
    (q - 1e-9).ceil().max(0.0) as usize
}

fn log2n(n: usize) -> f64 {
    (n.max(2) as f64).log2()
}

fn dyadic(x: usize) -> usize {
    (usize::BITS - 1 - x.leading_zeros()) as usize
}

/// Index of the heaviest group, the smallest index on ties.
fn heaviest(weights: &[usize]) -> usize {
    let mut best = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > weights[best] {
            best = i;
        }
    }
    best
}

fn bump(weights: &mut Vec<usize>, group: usize, by: usize) {
    if weights.len() <= group {
        weights.resize(group + 1, 0);
    }
    weights[group] += by;
}

/// A `(d1, d2)`-nice subgraph of a constraint graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceSubgraph {
    pub d1: usize,
    pub d2: usize,
    pub xs: Vec<usize>,
    pub ys: Vec<usize>,
    pub edges: Vec<Edge>,
}

/// Degree grouping on `X`, removal of `Y` vertices that lost most of their edges, then
/// degree grouping on `Y`. Isolated vertices are ignored.
pub fn nice_subgraph(h: &BipartiteGraph, n: usize) -> Result<NiceSubgraph> {
    let m = h.m();
    if m == 0 {
        return Err(Error::Precondition("constraint graph has no edges".into()));
    }
    let ln = log2n(n);
    let deg_x = |x: usize| h.neighbors_a(x).len();
    let deg_y = |y: usize| h.neighbors_b(y).len();

    let mut wx = Vec::new();
    for x in 0..h.na() {
        if deg_x(x) > 0 {
            bump(&mut wx, dyadic(deg_x(x)), deg_x(x));
        }
    }
    let i_star = heaviest(&wx);
    let d1 = 1usize << i_star;
    let keep_x = |x: usize| deg_x(x) > 0 && dyadic(deg_x(x)) == i_star;
    let h1: Vec<Edge> = h.edges().iter().copied().filter(|&(x, _)| keep_x(x)).collect();

    let mut deg1 = vec![0usize; h.nb()];
    for &(_, y) in &h1 {
        deg1[y] += 1;
    }
    let good_y = |y: usize| deg1[y] > 0 && deg1[y] as f64 >= deg_y(y) as f64 / (4.0 * ln);
    let h2: Vec<Edge> = h1.iter().copied().filter(|&(_, y)| good_y(y)).collect();

    let mut wy = Vec::new();
    for y in 0..h.nb() {
        if good_y(y) {
            bump(&mut wy, dyadic(deg1[y]), deg1[y]);
        }
    }
    if wy.is_empty() {
        return Err(Error::Invariant("every Y vertex was discarded".into()));
    }
    let j_star = heaviest(&wy);
    let d2 = 1usize << j_star;
    let edges: Vec<Edge> = h2.into_iter().filter(|&(_, y)| dyadic(deg1[y]) == j_star).collect();

    let mut xs: Vec<usize> = edges.iter().map(|e| e.0).collect();
    let mut ys: Vec<usize> = edges.iter().map(|e| e.1).collect();
    xs.sort_unstable();
    xs.dedup();
    ys.sort_unstable();
    ys.dedup();

    for &x in &xs {
        if !(d1 <= deg_x(x) && deg_x(x) < 2 * d1) {
            return Err(Error::Invariant(format!("x {x} has degree {} outside [{d1}, {})", deg_x(x), 2 * d1)));
        }
    }
    for &y in &ys {
        let dy = deg_y(y);
        if !(d2 <= dy && (dy as f64) < 8.0 * d2 as f64 * ln && d2 <= deg1[y] && deg1[y] < 2 * d2) {
            return Err(Error::Invariant(format!("y {y} violates the nice degree window")));
        }
    }
    let e = edges.len() as f64;
    if e < d1 as f64 / (4.0 * ln) * xs.len() as f64 {
        return Err(Error::Invariant("nice subgraph too sparse on the X side".into()));
    }
    if e < m as f64 / (8.0 * ln * ln) {
        return Err(Error::Invariant(format!("nice subgraph kept {} of {m} edges", edges.len())));
    }
    Ok(NiceSubgraph { d1, d2, xs, ys, edges })
}

/// The assignment graph: a cloud of `A` vertices per variable touched by the listed
/// constraints, and an edge per satisfying pair. Vertex `i·A + a` of side A is
/// `(xs[i], a)`; side B is laid out the same way over `ys`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssignmentGraph {
    pub graph: BipartiteGraph,
    pub alphabet: usize,
    pub xs: Vec<usize>,
    pub ys: Vec<usize>,
    pub constraints: Vec<usize>,
}

impl AssignmentGraph {
    pub fn label_a(&self, u: usize) -> (usize, usize) {
        (self.xs[u / self.alphabet], u % self.alphabet)
    }

    pub fn label_b(&self, v: usize) -> (usize, usize) {
        (self.ys[v / self.alphabet], v % self.alphabet)
    }
}

pub fn assignment_graph(inst: &Csp2Instance, ids: &[usize]) -> Result<AssignmentGraph> {
    inst.check_ids(ids)?;
    let mut ids = ids.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let a = inst.alphabet();
    let mut xs: Vec<usize> = ids.iter().map(|&i| inst.constraints[i].x).collect();
    let mut ys: Vec<usize> = ids.iter().map(|&i| inst.constraints[i].y).collect();
    xs.sort_unstable();
    xs.dedup();
    ys.sort_unstable();
    ys.dedup();
    let px: HashMap<usize, usize> = xs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let py: HashMap<usize, usize> = ys.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut edges = Vec::new();
    for &i in &ids {
        let c = &inst.constraints[i];
        let (bx, by) = (px[&c.x] * a, py[&c.y] * a);
        edges.extend(c.pairs.iter().map(|&(va, vb)| (bx + va, by + vb)));
    }
    let graph = BipartiteGraph::new(xs.len() * a, ys.len() * a, edges)?;
    Ok(AssignmentGraph { graph, alphabet: a, xs, ys, constraints: ids })
}

/// Surviving values per starred variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clouds {
    pub x: Vec<(usize, Vec<usize>)>,
    pub y: Vec<(usize, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizationReport {
    pub d1: usize,
    pub d2: usize,
    pub q: u32,
    pub q_prime: u32,
    pub r: u32,
    pub x_star: Vec<usize>,
    pub y_star: Vec<usize>,
    pub c_star: Vec<usize>,
    /// `|C̃|/(2^{r+6}·α·log³n)`, the lower bound the grouping promises for `|C*|`.
    pub c_star_floor: f64,
    pub kept_edges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regularized {
    pub report: RegularizationReport,
    pub clouds: Clouds,
    /// Edges of the regularized assignment subgraph.
    pub edges: Vec<Edge>,
}

/// Three dyadic groupings of the oracle's answer: cloud sizes on `X`, cloud sizes on
/// `Y`, then surviving edges per constraint. Each keeps its heaviest group.
pub fn regularize_solution(
    inst: &Csp2Instance,
    ag: &AssignmentGraph,
    s: &SidedSet,
    nice: &NiceSubgraph,
    d: usize,
    alpha: f64,
    n: usize,
) -> Result<Regularized> {
    ag.graph.check(s)?;
    let a = ag.alphabet;
    let mut in_a = vec![false; ag.graph.na()];
    let mut in_b = vec![false; ag.graph.nb()];
    s.a.iter().for_each(|&u| in_a[u] = true);
    s.b.iter().for_each(|&v| in_b[v] = true);
    let e0: Vec<Edge> = ag.graph.edges().iter().copied().filter(|&(u, v)| in_a[u] && in_b[v]).collect();
    if e0.is_empty() {
        return Err(Error::Precondition("solution spans no edges".into()));
    }
    let mut cx = vec![0usize; ag.xs.len()];
    let mut cy = vec![0usize; ag.ys.len()];
    s.a.iter().for_each(|&u| cx[u / a] += 1);
    s.b.iter().for_each(|&v| cy[v / a] += 1);

    let mut w = Vec::new();
    for &(u, _) in &e0 {
        bump(&mut w, dyadic(cx[u / a]), 1);
    }
    let q = heaviest(&w);
    let star_x = |i: usize| cx[i] > 0 && dyadic(cx[i]) == q;
    let e1: Vec<Edge> = e0.into_iter().filter(|&(u, _)| star_x(u / a)).collect();

    let mut w = Vec::new();
    for &(_, v) in &e1 {
        bump(&mut w, dyadic(cy[v / a]), 1);
    }
    let qp = heaviest(&w);
    let star_y = |i: usize| cy[i] > 0 && dyadic(cy[i]) == qp;
    let e2: Vec<Edge> = e1.into_iter().filter(|&(_, v)| star_y(v / a)).collect();

    let mut per: HashMap<(usize, usize), usize> = HashMap::new();
    for &(u, v) in &e2 {
        *per.entry((u / a, v / a)).or_default() += 1;
    }
    let mut w = Vec::new();
    for &count in per.values() {
        bump(&mut w, dyadic(count), count);
    }
    let r = heaviest(&w);
    let e3: Vec<Edge> = e2.into_iter().filter(|&(u, v)| dyadic(per[&(u / a, v / a)]) == r).collect();

    let mut c_star: Vec<usize> = per
        .iter()
        .filter(|&(_, &count)| dyadic(count) == r)
        .map(|(&(i, j), _)| inst.constraint_at(ag.xs[i], ag.ys[j]).expect("assignment edges come from constraints"))
        .collect();
    c_star.sort_unstable();

    if (1usize << r) > 2 * d * (1usize << q) || (1usize << r) > 2 * d * (1usize << qp) {
        return Err(Error::Invariant(format!("2^r/(2d) exceeds 2^q or 2^q' (q {q}, q' {qp}, r {r}, d {d})")));
    }

    let cloud = |side: &[bool], i: usize| -> Vec<usize> { (0..a).filter(|&v| side[i * a + v]).collect() };
    let clouds = Clouds {
        x: (0..ag.xs.len()).filter(|&i| star_x(i)).map(|i| (ag.xs[i], cloud(&in_a, i))).collect(),
        y: (0..ag.ys.len()).filter(|&i| star_y(i)).map(|i| (ag.ys[i], cloud(&in_b, i))).collect(),
    };
    let ln = log2n(n);
    let report = RegularizationReport {
        d1: nice.d1,
        d2: nice.d2,
        q: q as u32,
        q_prime: qp as u32,
        r: r as u32,
        x_star: clouds.x.iter().map(|c| c.0).collect(),
        y_star: clouds.y.iter().map(|c| c.0).collect(),
        c_star,
        c_star_floor: ag.constraints.len() as f64 / (2f64.powi(r as i32 + 6) * alpha * ln.powi(3)),
        kept_edges: e3.len(),
    };
    Ok(Regularized { report, clouds, edges: e3 })
}

/// Independent uniform values from each starred cloud; every other variable gets the
/// first value. Returns the assignment and how many of `c_star` it satisfies.
pub fn sample_assignment<R: Rng + ?Sized>(
    inst: &Csp2Instance,
    clouds: &Clouds,
    c_star: &[usize],
    rng: &mut R,
) -> (Assignment, usize) {
    let mut asg = Assignment::zeros(inst);
    for (x, values) in &clouds.x {
        if let Some(&v) = values.choose(rng) {
            asg.x[*x] = v;
        }
    }
    for (y, values) in &clouds.y {
        if let Some(&v) = values.choose(rng) {
            asg.y[*y] = v;
        }
    }
    let count = inst.count_satisfied(c_star, &asg);
    (asg, count)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CspProfile {
    Desk,
    Paper,
}

/// Parameters of the decomposition engine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CspConfig {
    pub profile: CspProfile,
    /// The size bound `n` all logarithms refer to.
    pub n: usize,
    /// Degree bound of the d-to-d promise.
    pub d: usize,
    /// Bad sets satisfy at most `|C'|/γ` constraints.
    pub gamma: f64,
    pub beta: f64,
    /// Smallest admissible `β` under this profile.
    pub beta_floor: f64,
    /// Round budget `⌈β·log n⌉`.
    pub rounds: u64,
    pub eta: f64,
    /// Approximation factor of the BDkS solver.
    pub alpha: f64,
    /// Step 0 certifies goodness directly when `|E(H)|` is at most this.
    pub step0_threshold: f64,
    /// Step-4 draws.
    pub samples: usize,
    pub epsilon: f64,
    /// Soundness `s(n)` of the hardness conjecture. Informational only.
    pub soundness: f64,
    /// Instances below this size are decided by exhaustive search.
    pub exhaustive_size: usize,
}

impl CspConfig {
    pub fn new(profile: CspProfile, inst: &Csp2Instance, alpha: f64) -> Self {
        match profile {
            CspProfile::Desk => Self::desk(inst, alpha),
            CspProfile::Paper => Self::paper(inst, alpha),
        }
    }

    /// `β = 2d+1`, Step 0 only for single edges, no exhaustive shortcut.
    pub fn desk(inst: &Csp2Instance, alpha: f64) -> Self {
        let n = inst.size().max(2);
        let d = inst.max_degree().max(1);
        let beta = (2 * d + 1) as f64;
        Self::assemble(CspProfile::Desk, n, d, alpha, beta, (2 * d) as f64, 1.0, 0)
    }

    /// `β = 2^{8(log n)^{1/2+ε}}` with `ε = 1/2`, raised to the inner floor
    /// `2^23·γ³·α³·log¹²n` when smaller.
    pub fn paper(inst: &Csp2Instance, alpha: f64) -> Self {
        let n = inst.size().max(2);
        let d = inst.max_degree().max(1);
        let epsilon = 0.5;
        let ln = log2n(n);
        let floor = 2f64.powi(23) * 64.0 * alpha.powi(3) * ln.powi(12);
        let beta = 2f64.powf(8.0 * ln.powf(0.5 + epsilon)).max(floor);
        Self::assemble(CspProfile::Paper, n, d, alpha, beta, floor, beta.powi(3), 16)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        profile: CspProfile,
        n: usize,
        d: usize,
        alpha: f64,
        beta: f64,
        beta_floor: f64,
        step0_threshold: f64,
        exhaustive_size: usize,
    ) -> Self {
        let gamma = 4.0;
        let epsilon = 0.5;
        let ln = log2n(n);
        let rounds = (beta * ln).ceil();
        let samples = (20.0 * beta.powi(3)).max(200.0).min(SAMPLE_CAP as f64) as usize;
        CspConfig {
            profile,
            n,
            d,
            gamma,
            beta,
            beta_floor,
            rounds: if rounds >= u64::MAX as f64 { u64::MAX } else { rounds as u64 },
            eta: 256.0 * d as f64 * gamma * alpha * ln.powi(4),
            alpha,
            step0_threshold,
            samples,
            epsilon,
            soundness: 2f64.powf(-64.0 * ln.powf(0.5 + epsilon)),
            exhaustive_size,
        }
    }

    /// Largest level a subgraph may reach: `log n / log(β/2d)`.
    pub fn level_cap(&self) -> f64 {
        log2n(self.n) / (self.beta / (2.0 * self.d as f64)).log2()
    }

    pub fn validate(&self, inst: &Csp2Instance) -> Result<()> {
        if inst.max_degree() > self.d {
            return Err(Error::Precondition(format!(
                "instance is {}-to-{} but the configuration promises d = {}",
                inst.max_degree(),
                inst.max_degree(),
                self.d
            )));
        }
        if inst.size() > self.n {
            return Err(Error::Precondition(format!("instance size {} exceeds n = {}", inst.size(), self.n)));
        }
        if !(self.beta > 2.0 * self.d as f64) || self.beta < self.beta_floor {
            return Err(Error::ProfileInequality(format!(
                "beta {} must exceed 2d = {} and the floor {}",
                self.beta,
                2 * self.d,
                self.beta_floor
            )));
        }
        if !(self.gamma >= 1.0) || self.alpha.is_nan() || self.alpha < 1.0 {
            return Err(Error::InvalidParameter("gamma and alpha must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodCertificate {
    pub assignment: Assignment,
    pub satisfied: usize,
    pub edges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgraphOutcome {
    pub xs: Vec<usize>,
    pub ys: Vec<usize>,
    /// Constraints of `C*`.
    pub edges: Vec<usize>,
    /// Total degree of `xs ∪ ys` in the graph the routine was given.
    pub volume: usize,
    pub report: RegularizationReport,
}

impl SubgraphOutcome {
    /// `vol / |E'|`, the quantity the inner bound controls.
    pub fn volume_ratio(&self) -> f64 {
        self.volume as f64 / self.edges.len().max(1) as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecompositionOutcome {
    BadSet { constraints: Vec<usize> },
    GoodCertificate(GoodCertificate),
    Subgraph(SubgraphOutcome),
}

fn sorted_unique(ids: &[usize]) -> Vec<usize> {
    let mut v = ids.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// One pass of the inner routine on the constraints `active`: a bad set, a certificate
/// that `active` is β³-good, or a small subgraph with many internal edges.
pub fn partition_or_subgraph<R: Rng + ?Sized>(
    inst: &Csp2Instance,
    active: &[usize],
    oracle: &dyn BdksOracle,
    cfg: &CspConfig,
    rng: &mut R,
) -> Result<DecompositionOutcome> {
    inst.check_ids(active)?;
    let active = sorted_unique(active);
    let m = active.len();
    if m == 0 {
        return Ok(DecompositionOutcome::GoodCertificate(GoodCertificate {
            assignment: Assignment::zeros(inst),
            satisfied: 0,
            edges: 0,
        }));
    }
    if m as f64 <= cfg.step0_threshold {
        let witness = active.iter().find_map(|&i| {
            let c = &inst.constraints[i];
            c.pairs.first().map(|&(a, b)| (c, a, b))
        });
        return Ok(match witness {
            Some((c, a, b)) => {
                let mut asg = Assignment::zeros(inst);
                asg.x[c.x] = a;
                asg.y[c.y] = b;
                let satisfied = inst.count_satisfied(&active, &asg);
                DecompositionOutcome::GoodCertificate(GoodCertificate { assignment: asg, satisfied, edges: m })
            }
            None => DecompositionOutcome::BadSet { constraints: active },
        });
    }

    let h = sub_graph(inst, &active);
    let nice = nice_subgraph(&h, cfg.n)?;
    let c_tilde = constraints_of(inst, &nice.edges)?;
    let ag = assignment_graph(inst, &c_tilde)?;
    if ag.graph.m() == 0 {
        return Ok(DecompositionOutcome::BadSet { constraints: c_tilde });
    }
    let (k1, k2) = (ag.xs.len(), ag.ys.len());
    let mut s = oracle.solve(&ag.graph, k1, k2)?;
    ag.graph.check(&s)?;
    if s.a.len() > k1 || s.b.len() > k2 {
        return Err(Error::Oracle(format!("answer exceeds quotas ({k1}, {k2})")));
    }
    let mut value = ag.graph.edge_count(&s);
    if value == 0 {
        let (u, v) = ag.graph.edges()[0];
        s = SidedSet::new(vec![u], vec![v]);
        value = 1;
    }
    if (value as f64) < c_tilde.len() as f64 / (cfg.gamma * cfg.alpha) {
        return Ok(DecompositionOutcome::BadSet { constraints: c_tilde });
    }

    let reg = regularize_solution(inst, &ag, &s, &nice, cfg.d, cfg.alpha, cfg.n)?;
    if 2f64.powi(reg.report.r as i32) <= cfg.beta {
        let need = good_quota(m, cfg.beta);
        let mut best: Option<(Assignment, usize)> = None;
        for _ in 0..cfg.samples.max(1) {
            let (asg, _) = sample_assignment(inst, &reg.clouds, &reg.report.c_star, rng);
            let count = inst.count_satisfied(&active, &asg);
            if best.as_ref().is_none_or(|b| count > b.1) {
                best = Some((asg, count));
            }
            if count >= need {
                break;
            }
        }
        let (assignment, satisfied) = best.expect("at least one draw");
        if satisfied < need {
            return Err(Error::CertificateShortfall { best: satisfied, needed: need });
        }
        return Ok(DecompositionOutcome::GoodCertificate(GoodCertificate { assignment, satisfied, edges: m }));
    }

    let nx_all = h.edges().iter().map(|e| e.0).collect::<std::collections::BTreeSet<_>>().len();
    let ny_all = h.edges().iter().map(|e| e.1).collect::<std::collections::BTreeSet<_>>().len();
    let xs = reg.report.x_star.clone();
    let ys = reg.report.y_star.clone();
    let cap = 2.0 * cfg.d as f64 / cfg.beta;
    if xs.len() as f64 > cap * nx_all as f64 || ys.len() as f64 > cap * ny_all as f64 {
        return Err(Error::Invariant(format!(
            "subgraph sides ({}, {}) exceed 2d/β of ({nx_all}, {ny_all})",
            xs.len(),
            ys.len()
        )));
    }
    let volume = xs.iter().map(|&x| h.neighbors_a(x).len()).sum::<usize>()
        + ys.iter().map(|&y| h.neighbors_b(y).len()).sum::<usize>();
    let edges = reg.report.c_star.clone();
    Ok(DecompositionOutcome::Subgraph(SubgraphOutcome { xs, ys, edges, volume, report: reg.report }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StripOutcome {
    Good(GoodCertificate),
    Subgraph {
        sub: SubgraphOutcome,
        /// Every remaining constraint with both variables in the subgraph.
        core: Vec<usize>,
        /// Remaining constraints with exactly one variable in the subgraph.
        boundary: Vec<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    /// Union of the bad sets found, itself bad.
    pub bad: Vec<usize>,
    pub rest: Vec<usize>,
    pub outcome: StripOutcome,
    pub iterations: usize,
}

/// Repeats the inner routine, moving each bad set aside, until it certifies the rest
/// or returns a subgraph inside it.
pub fn strip_bad_edges<R: Rng + ?Sized>(
    inst: &Csp2Instance,
    active: &[usize],
    oracle: &dyn BdksOracle,
    cfg: &CspConfig,
    rng: &mut R,
) -> Result<Strip> {
    inst.check_ids(active)?;
    let mut rest = sorted_unique(active);
    let mut bad = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        match partition_or_subgraph(inst, &rest, oracle, cfg, rng)? {
            DecompositionOutcome::BadSet { constraints } => {
                if constraints.is_empty() {
                    return Err(Error::Invariant("empty bad set".into()));
                }
                rest.retain(|i| constraints.binary_search(i).is_err());
                bad.extend(constraints);
            }
            DecompositionOutcome::GoodCertificate(cert) => {
                bad.sort_unstable();
                return Ok(Strip { bad, rest, outcome: StripOutcome::Good(cert), iterations });
            }
            DecompositionOutcome::Subgraph(sub) => {
                let (mut core, mut boundary) = (Vec::new(), Vec::new());
                for &i in &rest {
                    let c = &inst.constraints[i];
                    let inside = usize::from(sub.xs.binary_search(&c.x).is_ok())
                        + usize::from(sub.ys.binary_search(&c.y).is_ok());
                    match inside {
                        2 => core.push(i),
                        1 => boundary.push(i),
                        _ => {}
                    }
                }
                bad.sort_unstable();
                return Ok(Strip { bad, rest, outcome: StripOutcome::Subgraph { sub, core, boundary }, iterations });
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OuterDecomposition {
    pub good: Vec<usize>,
    pub bad: Vec<usize>,
    pub deleted: Vec<usize>,
    /// One assignment certifying `good`, merged from the per-subgraph witnesses.
    pub witness: Assignment,
    pub max_level: u32,
    pub iterations: usize,
    /// Largest `|E*₂|/|E''|` seen when a subgraph was split off.
    pub worst_boundary_ratio: f64,
}

/// Processes a family of vertex-disjoint subgraphs with levels and per-edge budgets until
/// every edge is good, bad or deleted.
pub fn outer_decompose<R: Rng + ?Sized>(
    inst: &Csp2Instance,
    active: &[usize],
    oracle: &dyn BdksOracle,
    cfg: &CspConfig,
    rng: &mut R,
) -> Result<OuterDecomposition> {
    inst.check_ids(active)?;
    let active = sorted_unique(active);
    let total = active.len() as f64;
    let cap = cfg.level_cap();
    let mut budget = vec![0.0f64; inst.m()];
    active.iter().for_each(|&i| budget[i] = 1.0);
    let mut family: VecDeque<(Vec<usize>, u32)> = VecDeque::new();
    if !active.is_empty() {
        family.push_back((active.clone(), 0));
    }
    let mut out = OuterDecomposition {
        good: Vec::new(),
        bad: Vec::new(),
        deleted: Vec::new(),
        witness: Assignment::zeros(inst),
        max_level: 0,
        iterations: 0,
        worst_boundary_ratio: 0.0,
    };
    while let Some((edges, level)) = family.pop_front() {
        out.iterations += 1;
        let strip = strip_bad_edges(inst, &edges, oracle, cfg, rng)?;
        out.bad.extend(&strip.bad);
        match strip.outcome {
            StripOutcome::Good(cert) => {
                for &i in &strip.rest {
                    let c = &inst.constraints[i];
                    out.witness.x[c.x] = cert.assignment.x[c.x];
                    out.witness.y[c.y] = cert.assignment.y[c.y];
                }
                out.good.extend(&strip.rest);
            }
            StripOutcome::Subgraph { core, boundary, .. } => {
                let next = level + 1;
                if next as f64 > cap {
                    return Err(Error::ProfileInequality(format!("level {next} exceeds the cap {cap:.3}")));
                }
                let charge: f64 = core.iter().chain(&boundary).map(|&i| budget[i]).sum();
                let fresh = cfg.eta.powi(next as i32);
                if charge > fresh * core.len() as f64 * (1.0 + 1e-9) {
                    return Err(Error::ProfileInequality(format!(
                        "boundary of {} edges outweighs {} core edges at eta {}",
                        boundary.len(),
                        core.len(),
                        cfg.eta
                    )));
                }
                out.worst_boundary_ratio = out.worst_boundary_ratio.max(boundary.len() as f64 / core.len() as f64);
                core.iter().for_each(|&i| budget[i] = fresh);
                out.max_level = out.max_level.max(next);
                let mut star = strip.rest.clone();
                star.retain(|i| core.binary_search(i).is_err() && boundary.binary_search(i).is_err());
                out.deleted.extend(boundary);
                family.push_back((core, next));
                if !star.is_empty() {
                    family.push_back((star, level));
                }
            }
        }
        for (edges, level) in &family {
            let limit = cfg.eta.powi(*level as i32) * (1.0 + 1e-9);
            if edges.iter().any(|&i| budget[i] > limit) {
                return Err(Error::Invariant(format!("an edge at level {level} carries more than eta^{level}")));
            }
        }
        let held: f64 =
            out.good.iter().chain(&out.bad).chain(family.iter().flat_map(|f| f.0.iter())).map(|&i| budget[i]).sum();
        if held < total * (1.0 - 1e-9) {
            return Err(Error::Invariant(format!("budget fell to {held} below {total}")));
        }
    }
    out.good.sort_unstable();
    out.bad.sort_unstable();
    out.deleted.sort_unstable();
    if !verify_good_witness(inst, &out.good, &out.witness, cfg.beta) {
        return Err(Error::Invariant("merged witness does not certify the good edges".into()));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub good: Vec<usize>,
    pub witness: Assignment,
}

/// `(E^b, E_1, …)`: rounds past the last nonempty one are omitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MainDecomposition {
    pub bad: Vec<usize>,
    pub rounds: Vec<Round>,
    /// The nominal round budget `⌈β·log n⌉`.
    pub round_cap: u64,
    /// Whether more rounds than the budget were needed.
    pub overrun: bool,
}

/// Runs the outer decomposition on the edges the previous round deleted, until none remain.
pub fn main_decompose<R: Rng + ?Sized>(
    inst: &Csp2Instance,
    oracle: &dyn BdksOracle,
    cfg: &CspConfig,
    rng: &mut R,
) -> Result<MainDecomposition> {
    cfg.validate(inst)?;
    let mut leftover = inst.all_ids();
    let mut bad = Vec::new();
    let mut rounds = Vec::new();
    while !leftover.is_empty() {
        let outer = outer_decompose(inst, &leftover, oracle, cfg, rng)?;
        if outer.good.is_empty() && outer.bad.is_empty() {
            return Err(Error::Invariant("a round made no progress".into()));
        }
        bad.extend(outer.bad);
        rounds.push(Round { good: outer.good, witness: outer.witness });
        leftover = outer.deleted;
    }
    bad.sort_unstable();
    let mut all: Vec<usize> = bad.iter().chain(rounds.iter().flat_map(|r| r.good.iter())).copied().collect();
    all.sort_unstable();
    if all != inst.all_ids() {
        return Err(Error::Invariant("rounds and bad edges do not partition the constraints".into()));
    }
    let overrun = rounds.len() as u64 > cfg.rounds;
    Ok(MainDecomposition { bad, rounds, round_cap: cfg.rounds, overrun })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Answer {
    Yes,
    No,
}

impl std::fmt::Display for Answer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Answer::Yes => "YES",
            Answer::No => "NO",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub answer: Answer,
    pub constraints: usize,
    pub bad: usize,
    pub round_sizes: Vec<usize>,
    pub exhaustive: bool,
    pub decomposition: Option<MainDecomposition>,
}

/// NO exactly when the bad part holds more than two thirds of the constraints.
pub fn decide_yes_no<R: Rng + ?Sized>(
    inst: &Csp2Instance,
    oracle: &dyn BdksOracle,
    cfg: &CspConfig,
    rng: &mut R,
) -> Result<Decision> {
    let m = inst.m();
    if inst.size() < cfg.exhaustive_size {
        let (best, _) = max_satisfied(inst, &inst.all_ids(), DEFAULT_CSP_CEILING)?;
        let answer = if 2 * best >= m { Answer::Yes } else { Answer::No };
        return Ok(Decision {
            answer,
            constraints: m,
            bad: 0,
            round_sizes: Vec::new(),
            exhaustive: true,
            decomposition: None,
        });
    }
    let dec = main_decompose(inst, oracle, cfg, rng)?;
    let bad = dec.bad.len();
    let answer = if 3 * bad > 2 * m { Answer::No } else { Answer::Yes };
    Ok(Decision {
        answer,
        constraints: m,
        bad,
        round_sizes: dec.rounds.iter().map(|r| r.good.len()).collect(),
        exhaustive: false,
        decomposition: Some(dec),
    })
}

fn table<R: Rng + ?Sized>(a: usize, d: usize, forced: Option<(usize, usize)>, rng: &mut R) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(a * d);
    for k in 0..d {
        let mut perm: Vec<usize> = (0..a).collect();
        perm.shuffle(rng);
        if let (0, Some((sx, sy))) = (k, forced) {
            let at = perm.iter().position(|&v| v == sy).expect("permutation covers the alphabet");
            perm.swap(sx, at);
        }
        pairs.extend(perm.into_iter().enumerate());
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

fn random_pairs<R: Rng + ?Sized>(nx: usize, ny: usize, m: usize, rng: &mut R) -> Result<Vec<(usize, usize)>> {
    if m > nx * ny {
        return Err(Error::InvalidParameter(format!("{m} constraints do not fit on {nx}×{ny} variable pairs")));
    }
    let mut picks: Vec<usize> = index::sample(rng, nx * ny, m).into_vec();
    picks.sort_unstable();
    Ok(picks.into_iter().map(|p| (p / ny, p % ny)).collect())
}

/// Random d-to-d instance with a hidden assignment satisfying every constraint. Each
/// table is a union of `d` random matchings, the first one through the hidden pair.
pub fn planted_csp<R: Rng + ?Sized>(
    nx: usize,
    ny: usize,
    a: usize,
    m: usize,
    d: usize,
    rng: &mut R,
) -> Result<(Csp2Instance, Assignment)> {
    if a == 0 || d == 0 || d > a {
        return Err(Error::InvalidParameter(format!("need 1 ≤ d ≤ A, got d = {d}, A = {a}")));
    }
    let pairs = random_pairs(nx, ny, m, rng)?;
    let hidden = Assignment {
        x: (0..nx).map(|_| rng.gen_range(0..a)).collect(),
        y: (0..ny).map(|_| rng.gen_range(0..a)).collect(),
    };
    let constraints = pairs
        .into_iter()
        .map(|(x, y)| Constraint { x, y, pairs: table(a, d, Some((hidden.x[x], hidden.y[y])), rng) })
        .collect();
    Ok((Csp2Instance::new(nx, ny, a, constraints)?, hidden))
}

/// Random d-to-d instance with no planted solution.
pub fn random_csp<R: Rng + ?Sized>(
    nx: usize,
    ny: usize,
    a: usize,
    m: usize,
    d: usize,
    rng: &mut R,
) -> Result<Csp2Instance> {
    if a == 0 || d > a {
        return Err(Error::InvalidParameter(format!("need d ≤ A, got d = {d}, A = {a}")));
    }
    let pairs = random_pairs(nx, ny, m, rng)?;
    let constraints = pairs.into_iter().map(|(x, y)| Constraint { x, y, pairs: table(a, d, None, rng) }).collect();
    Csp2Instance::new(nx, ny, a, constraints)
}
