//! Cutting-plane machinery for the covering duals: a floating-point ellipsoid loop, the
//! budget scan that turns feasibility into an approximate optimum, and a dense simplex
//! for the restricted primal.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Subgraph, VertexSet};

/// `a·x ≤ b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace {
    pub a: Vec<f64>,
    pub b: f64,
}

/// One primal variable: a vertex set (DkC) or a bounded-edge subgraph (GP), with the
/// edges it is credited for.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Column {
    vertices: VertexSet,
    edges: Vec<Edge>,
}

impl Column {
    /// The set `s` credited with every edge it induces.
    pub fn induced(g: &Graph, s: &VertexSet) -> Result<Self> {
        Ok(Column { vertices: s.clone(), edges: g.induced_edges(s)? })
    }

    pub fn from_subgraph(h: &Subgraph) -> Self {
        Column { vertices: h.vertices().clone(), edges: h.edges().to_vec() }
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn weight(&self) -> usize {
        self.edges.len()
    }

    pub fn to_subgraph(&self) -> Subgraph {
        Subgraph::from_parts_unchecked(self.vertices.clone(), self.edges.clone())
    }

    /// `z + Σ_{v∈S} y_v`.
    pub fn cover(&self, p: &DualPoint) -> f64 {
        p.z + self.vertices.iter().map(|v| p.y[v]).sum::<f64>()
    }

    /// Strictly violated in exact arithmetic on the given point.
    pub fn violated_by(&self, p: &DualPoint) -> bool {
        self.cover(p) < self.weight() as f64
    }
}

/// Distinct columns in discovery order.
#[derive(Clone, Debug, Default)]
pub struct ColumnSet {
    columns: Vec<Column>,
    seen: HashSet<Column>,
}

impl ColumnSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false when the column was already present.
    pub fn insert(&mut self, c: Column) -> bool {
        if self.seen.contains(&c) {
            return false;
        }
        self.seen.insert(c.clone());
        self.columns.push(c);
        true
    }

    pub fn extend(&mut self, other: &ColumnSet) {
        for c in &other.columns {
            self.insert(c.clone());
        }
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn as_slice(&self) -> &[Column] {
        &self.columns
    }

    pub fn iter(&self) -> impl Iterator<Item = &Column> {
        self.columns.iter()
    }
}

impl FromIterator<Column> for ColumnSet {
    fn from_iter<I: IntoIterator<Item = Column>>(iter: I) -> Self {
        let mut out = ColumnSet::new();
        for c in iter {
            out.insert(c);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualPoint {
    pub z: f64,
    pub y: Vec<f64>,
}

impl DualPoint {
    pub fn zero(n: usize) -> Self {
        DualPoint { z: 0.0, y: vec![0.0; n] }
    }

    fn from_coords(x: &[f64]) -> Self {
        DualPoint { z: x[0], y: x[1..].to_vec() }
    }
}

/// The shape shared by both covering duals: minimize `coef·z + Σ y` subject to
/// `z + y(S) ≥ m(S)` for every column and `0 ≤ z, y ≤ cap`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualLp {
    pub n: usize,
    /// `N/k` for DkC, `r` for GP.
    pub coef: f64,
    pub cap: f64,
    /// Largest possible objective, used to bound the budget scan.
    pub edges: usize,
}

impl DualLp {
    pub fn dkc(g: &Graph, k: usize) -> Result<Self> {
        if k == 0 || !g.n().is_multiple_of(k) {
            return Err(Error::InvalidParameter(format!("k = {k} must divide n = {}", g.n())));
        }
        Ok(DualLp { n: g.n(), coef: (g.n() / k) as f64, cap: g.m() as f64, edges: g.m() })
    }

    pub fn gp(g: &Graph, r: usize, h: usize) -> Result<Self> {
        if r == 0 || h == 0 {
            return Err(Error::InvalidParameter("r and h must be positive".into()));
        }
        Ok(DualLp { n: g.n(), coef: r as f64, cap: h.min(g.m()) as f64, edges: g.m() })
    }

    pub fn dimension(&self) -> usize {
        self.n + 1
    }

    pub fn objective(&self, p: &DualPoint) -> f64 {
        self.coef * p.z + p.y.iter().sum::<f64>()
    }

    /// Exponent of the smallest power of two above `2·N·|E|`.
    pub fn scan_limit(&self) -> u32 {
        let bound = 2 * self.n as u128 * self.edges as u128;
        let mut c = 0u32;
        while (1u128 << c) <= bound {
            c += 1;
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidConfig {
    /// Relative slack on the budget, box and pooled-column checks.
    pub tolerance: f64,
    /// `log2` of the volume below which the region is declared empty; `None` means
    /// `-64·dim`.
    pub volume_floor_log2: Option<f64>,
    /// `None` means `50·(dim+1)²·log2(box/floor)`.
    pub iteration_cap: Option<usize>,
    /// Number of oracle calls that must all accept; `None` means `N`.
    pub repetitions: Option<usize>,
    /// Stop early once the collected columns alone make the budget infeasible,
    /// decided by the restricted primal.
    pub lp_certificate: bool,
}

impl Default for EllipsoidConfig {
    fn default() -> Self {
        EllipsoidConfig {
            tolerance: 1e-7,
            volume_floor_log2: None,
            iteration_cap: None,
            repetitions: None,
            lp_certificate: true,
        }
    }
}

/// What the ellipsoid loop concluded.
#[derive(Clone, Debug, PartialEq)]
pub enum EllipsoidOutcome {
    Feasible { point: Vec<f64>, iterations: usize },
    Infeasible { iterations: usize },
}

/// A point either passes every constraint the oracle knows about or yields one it violates.
pub trait CutOracle {
    fn separate(&mut self, x: &[f64]) -> Result<Option<Halfspace>>;

    /// Called after every cut; returning true ends the run as infeasible.
    fn certify_empty(&mut self) -> Result<bool> {
        Ok(false)
    }
}

/// Deep-cut ellipsoid method from the ball of the given radius around `center`.
pub fn run_ellipsoid(
    center: Vec<f64>,
    radius: f64,
    oracle: &mut dyn CutOracle,
    floor_log2: f64,
    iteration_cap: usize,
) -> Result<EllipsoidOutcome> {
    let d = center.len();
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius {radius}")));
    }
    if d == 1 {
        return run_interval(center[0], radius, oracle, iteration_cap);
    }
    let df = d as f64;
    let mut c = center;
    let mut p = vec![0.0; d * d];
    for i in 0..d {
        p[i * d + i] = radius * radius;
    }
    // log2 of sqrt(det P), i.e. volume up to the unit-ball constant.
    let mut log_vol = df * radius.log2();
    let mut pa = vec![0.0; d];
    for iter in 0..iteration_cap {
        let cut = match oracle.separate(&c)? {
            None => return Ok(EllipsoidOutcome::Feasible { point: c, iterations: iter }),
            Some(h) => h,
        };
        if cut.a.len() != d {
            return Err(Error::Numeric(format!("cut of length {} in dimension {d}", cut.a.len())));
        }
        for i in 0..d {
            pa[i] = (0..d).map(|j| p[i * d + j] * cut.a[j]).sum();
        }
        let apa: f64 = (0..d).map(|i| cut.a[i] * pa[i]).sum();
        if !(apa > 0.0 && apa.is_finite()) {
            return Err(Error::Numeric(format!("shape matrix lost definiteness (aPa = {apa})")));
        }
        let s = apa.sqrt();
        let ac: f64 = (0..d).map(|i| cut.a[i] * c[i]).sum();
        let alpha = (ac - cut.b) / s;
        if alpha >= 1.0 {
            return Ok(EllipsoidOutcome::Infeasible { iterations: iter + 1 });
        }
        let alpha = alpha.max(-1.0 / df + 1e-12);
        let tau = (1.0 + df * alpha) / (df + 1.0);
        let sigma = 2.0 * (1.0 + df * alpha) / ((df + 1.0) * (1.0 + alpha));
        let delta = df * df * (1.0 - alpha * alpha) / (df * df - 1.0);
        for i in 0..d {
            c[i] -= tau * pa[i] / s;
        }
        for i in 0..d {
            for j in i..d {
                let v = delta * (p[i * d + j] - sigma * pa[i] * pa[j] / apa);
                p[i * d + j] = v;
                p[j * d + i] = v;
            }
        }
        log_vol += 0.5 * (df * delta.log2() + (1.0 - sigma).log2());
        if log_vol < floor_log2 || oracle.certify_empty()? {
            return Ok(EllipsoidOutcome::Infeasible { iterations: iter + 1 });
        }
    }
    Err(Error::Numeric(format!("ellipsoid hit its iteration cap of {iteration_cap}")))
}

fn run_interval(
    center: f64,
    radius: f64,
    oracle: &mut dyn CutOracle,
    iteration_cap: usize,
) -> Result<EllipsoidOutcome> {
    let (mut lo, mut hi) = (center - radius, center + radius);
    let mut x = center;
    for iter in 0..iteration_cap {
        let cut = match oracle.separate(&[x])? {
            None => return Ok(EllipsoidOutcome::Feasible { point: vec![x], iterations: iter }),
            Some(h) => h,
        };
        let a = cut.a.first().copied().unwrap_or(0.0);
        if a > 0.0 {
            hi = hi.min(cut.b / a);
        } else if a < 0.0 {
            lo = lo.max(cut.b / a);
        } else if cut.b < 0.0 {
            return Ok(EllipsoidOutcome::Infeasible { iterations: iter + 1 });
        }
        if lo > hi || oracle.certify_empty()? {
            return Ok(EllipsoidOutcome::Infeasible { iterations: iter + 1 });
        }
        x = 0.5 * (lo + hi);
    }
    Err(Error::Numeric(format!("interval search hit its iteration cap of {iteration_cap}")))
}

/// Result of one fixed-budget feasibility test.
#[derive(Clone, Debug)]
pub struct Feasibility {
    pub point: Option<DualPoint>,
    pub columns: ColumnSet,
    pub iterations: usize,
}

/// Decides whether `coef·z + Σy ≤ 2^c` is compatible with every column the oracle can
/// produce. The oracle sees the current point and may return a violated column.
pub fn ellipsoid_feasibility(
    lp: &DualLp,
    budget_c: u32,
    oracle: &mut dyn FnMut(&DualPoint) -> Result<Option<Column>>,
    cfg: &EllipsoidConfig,
) -> Result<Feasibility> {
    let budget = 2f64.powi(budget_c as i32);
    ellipsoid_feasibility_at(lp, budget, oracle, cfg)
}

pub(crate) fn ellipsoid_feasibility_at(
    lp: &DualLp,
    budget: f64,
    oracle: &mut dyn FnMut(&DualPoint) -> Result<Option<Column>>,
    cfg: &EllipsoidConfig,
) -> Result<Feasibility> {
    let dim = lp.dimension();
    if !(lp.cap > 0.0) {
        return Err(Error::InvalidParameter("box bound must be positive".into()));
    }
    let radius = lp.cap * (dim as f64).sqrt() * (1.0 + 1e-9);
    let floor = cfg.volume_floor_log2.unwrap_or(-64.0 * dim as f64);
    let cap = cfg.iteration_cap.unwrap_or_else(|| {
        let span = (radius.log2() - floor / dim as f64).max(1.0);
        50 * (dim + 1) * (dim + 1) * span.ceil() as usize
    });
    let mut sep = DualSeparator {
        lp,
        budget,
        oracle,
        tol: cfg.tolerance,
        repetitions: cfg.repetitions.unwrap_or(lp.n).max(1),
        lp_certificate: cfg.lp_certificate,
        pool: ColumnSet::new(),
        pool_grew: false,
    };
    let outcome = run_ellipsoid(vec![0.0; dim], radius, &mut sep, floor, cap)?;
    let columns = sep.pool;
    Ok(match outcome {
        EllipsoidOutcome::Feasible { point, iterations } => {
            Feasibility { point: Some(DualPoint::from_coords(&point)), columns, iterations }
        }
        EllipsoidOutcome::Infeasible { iterations } => Feasibility { point: None, columns, iterations },
    })
}

struct DualSeparator<'a> {
    lp: &'a DualLp,
    budget: f64,
    oracle: &'a mut dyn FnMut(&DualPoint) -> Result<Option<Column>>,
    tol: f64,
    repetitions: usize,
    lp_certificate: bool,
    pool: ColumnSet,
    pool_grew: bool,
}

impl DualSeparator<'_> {
    fn column_cut(&self, c: &Column) -> Halfspace {
        let mut a = vec![0.0; self.lp.dimension()];
        a[0] = -1.0;
        for v in c.vertices().iter() {
            a[v + 1] = -1.0;
        }
        Halfspace { a, b: -(c.weight() as f64) }
    }
}

impl CutOracle for DualSeparator<'_> {
    fn separate(&mut self, x: &[f64]) -> Result<Option<Halfspace>> {
        let dim = x.len();
        let obj = self.lp.coef * x[0] + x[1..].iter().sum::<f64>();
        if obj > self.budget * (1.0 + self.tol) {
            let mut a = vec![1.0; dim];
            a[0] = self.lp.coef;
            return Ok(Some(Halfspace { a, b: self.budget }));
        }
        let hi = self.lp.cap * (1.0 + self.tol);
        for (i, &xi) in x.iter().enumerate() {
            if xi < -self.tol {
                let mut a = vec![0.0; dim];
                a[i] = -1.0;
                return Ok(Some(Halfspace { a, b: 0.0 }));
            }
            if xi > hi {
                let mut a = vec![0.0; dim];
                a[i] = 1.0;
                return Ok(Some(Halfspace { a, b: self.lp.cap }));
            }
        }
        let p = DualPoint::from_coords(x);
        for c in self.pool.iter() {
            let m = c.weight() as f64;
            if c.cover(&p) < m - self.tol * m.max(1.0) {
                return Ok(Some(self.column_cut(c)));
            }
        }
        for _ in 0..self.repetitions {
            if let Some(c) = (self.oracle)(&p)? {
                if !c.violated_by(&p) {
                    return Err(Error::OracleBug);
                }
                let cut = self.column_cut(&c);
                self.pool_grew |= self.pool.insert(c);
                return Ok(Some(cut));
            }
        }
        Ok(None)
    }

    fn certify_empty(&mut self) -> Result<bool> {
        if !self.lp_certificate || !std::mem::take(&mut self.pool_grew) {
            return Ok(false);
        }
        let primal = solve_restricted_primal(self.pool.as_slice(), self.lp.n, self.lp.coef)?;
        Ok(primal.value > self.budget * (1.0 + self.tol) + self.tol)
    }
}

/// Outcome of the budget scan.
#[derive(Clone, Debug)]
pub struct LpSolve {
    /// `2^{C*}` for the smallest feasible budget exponent, or 0 on an edgeless graph.
    pub value: f64,
    pub budget_exponent: Option<u32>,
    /// Accepted point lifted by the approximation factor and clipped to the box.
    pub point: DualPoint,
    pub columns: ColumnSet,
    pub iterations: usize,
    /// True when the accepted point sits within tolerance of the budget.
    pub borderline: bool,
}

/// Scans budgets `2^0, 2^1, …` up to the smallest power of two above `2N|E|` and stops
/// at the first one the ellipsoid accepts. Columns from every attempted budget are kept.
pub fn maximize_via_binary_search(
    lp: &DualLp,
    beta: f64,
    oracle: &mut dyn FnMut(&DualPoint) -> Result<Option<Column>>,
    cfg: &EllipsoidConfig,
) -> Result<LpSolve> {
    if lp.edges == 0 {
        return Ok(LpSolve {
            value: 0.0,
            budget_exponent: None,
            point: DualPoint::zero(lp.n),
            columns: ColumnSet::new(),
            iterations: 0,
            borderline: false,
        });
    }
    let mut columns = ColumnSet::new();
    let mut iterations = 0;
    for c in 0..=lp.scan_limit() {
        let run = ellipsoid_feasibility(lp, c, oracle, cfg)?;
        columns.extend(&run.columns);
        iterations += run.iterations;
        if let Some(p) = run.point {
            let budget = 2f64.powi(c as i32);
            let borderline = lp.objective(&p) > budget * (1.0 - 1e-6);
            let lift = |v: f64| if v > 0.0 { (v * beta).min(lp.cap) } else { 0.0 };
            let point = DualPoint { z: lift(p.z), y: p.y.iter().map(|&v| lift(v)).collect() };
            return Ok(LpSolve { value: budget, budget_exponent: Some(c), point, columns, iterations, borderline });
        }
    }
    Err(Error::Degenerate)
}

/// Fractional solution over a column list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestrictedPrimal {
    pub x: Vec<f64>,
    pub value: f64,
}

/// Maximizes `Σ m(S)·x_S` subject to `Σ_{S∋v} x_S ≤ 1`, `Σ x_S ≤ coef`, `x ≥ 0`.
/// The returned point is checked against every constraint and scaled back if rounding
/// pushed it outside.
pub fn solve_restricted_primal(columns: &[Column], n: usize, coef: f64) -> Result<RestrictedPrimal> {
    let cols: Vec<usize> = (0..columns.len()).filter(|&i| columns[i].weight() > 0).collect();
    if cols.is_empty() || coef <= 0.0 {
        return Ok(RestrictedPrimal { x: vec![0.0; columns.len()], value: 0.0 });
    }
    let mut a = vec![vec![0.0; cols.len()]; n + 1];
    for (j, &i) in cols.iter().enumerate() {
        for v in columns[i].vertices().iter() {
            a[v][j] = 1.0;
        }
        a[n][j] = 1.0;
    }
    let mut b = vec![1.0; n + 1];
    b[n] = coef;
    let c: Vec<f64> = cols.iter().map(|&i| columns[i].weight() as f64).collect();
    let (sol, _) = simplex_max(&a, &b, &c)?;
    let mut x = vec![0.0; columns.len()];
    for (j, &i) in cols.iter().enumerate() {
        x[i] = sol[j].max(0.0);
    }
    let mut worst: f64 = 1.0;
    let mut load = vec![0.0; n];
    let mut total = 0.0;
    for (i, col) in columns.iter().enumerate() {
        for v in col.vertices().iter() {
            load[v] += x[i];
        }
        total += x[i];
    }
    for &l in &load {
        worst = worst.max(l);
    }
    worst = worst.max(total / coef);
    if worst > 1.0 {
        for xi in &mut x {
            *xi /= worst;
        }
    }
    let value = columns.iter().zip(&x).map(|(col, &xi)| col.weight() as f64 * xi).sum();
    Ok(RestrictedPrimal { x, value })
}

const PIVOT_EPS: f64 = 1e-9;

/// Dense tableau simplex for `max c·x` subject to `A x ≤ b`, `x ≥ 0` with `b ≥ 0`, so the
/// slack basis is feasible from the start. Bland's rule rules out cycling.
pub fn simplex_max(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<(Vec<f64>, f64)> {
    let rows = a.len();
    let vars = c.len();
    if b.len() != rows || a.iter().any(|r| r.len() != vars) {
        return Err(Error::InvalidParameter("simplex dimensions disagree".into()));
    }
    if b.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidParameter("simplex needs a nonnegative right-hand side".into()));
    }
    let width = vars + rows + 1;
    let mut t = vec![0.0; (rows + 1) * width];
    for i in 0..rows {
        t[i * width..i * width + vars].copy_from_slice(&a[i]);
        t[i * width + vars + i] = 1.0;
        t[i * width + width - 1] = b[i];
    }
    let obj = rows * width;
    for j in 0..vars {
        t[obj + j] = -c[j];
    }
    let mut basis: Vec<usize> = (vars..vars + rows).collect();
    let max_pivots = 50 * (rows + vars + 10) * (rows + vars + 10);
    for _ in 0..max_pivots {
        let Some(enter) = (0..vars + rows).find(|&j| t[obj + j] < -PIVOT_EPS) else {
            let mut x = vec![0.0; vars];
            for (i, &bv) in basis.iter().enumerate() {
                if bv < vars {
                    x[bv] = t[i * width + width - 1];
                }
            }
            return Ok((x, t[obj + width - 1]));
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..rows {
            let coef = t[i * width + enter];
            if coef > PIVOT_EPS {
                let ratio = t[i * width + width - 1] / coef;
                let better = match leave {
                    None => true,
                    Some((l, r)) => ratio < r - PIVOT_EPS || (ratio <= r + PIVOT_EPS && basis[i] < basis[l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leave else {
            return Err(Error::Numeric("restricted primal is unbounded".into()));
        };
        let piv = t[row * width + enter];
        for j in 0..width {
            t[row * width + j] /= piv;
        }
        for i in 0..=rows {
            if i == row {
                continue;
            }
            let f = t[i * width + enter];
            if f != 0.0 {
                for j in 0..width {
                    t[i * width + j] -= f * t[row * width + j];
                }
            }
        }
        basis[row] = enter;
    }
    Err(Error::Numeric("simplex pivot limit reached".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Stub(Vec<Halfspace>);

    impl CutOracle for Stub {
        fn separate(&mut self, x: &[f64]) -> Result<Option<Halfspace>> {
            Ok(self.0.iter().find(|h| h.a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() > h.b).cloned())
        }
    }

    #[test]
    fn interval_infeasible() {
        let mut o = Stub(vec![Halfspace { a: vec![1.0], b: 2.0 }, Halfspace { a: vec![-1.0], b: -3.0 }]);
        let out = run_ellipsoid(vec![0.0], 10.0, &mut o, -64.0, 1000).unwrap();
        assert!(matches!(out, EllipsoidOutcome::Infeasible { .. }));
    }

    #[test]
    fn always_accept_keeps_center() {
        let lp = DualLp { n: 0, coef: 1.0, cap: 1.0, edges: 1 };
        let mut accept = |_: &DualPoint| Ok(None);
        let run = ellipsoid_feasibility(&lp, 0, &mut accept, &EllipsoidConfig::default()).unwrap();
        assert_eq!(run.point, Some(DualPoint::zero(0)));
        assert_eq!(run.iterations, 0);
    }

    #[test]
    fn two_dim_region_found() {
        let mut o = Stub(vec![
            Halfspace { a: vec![-1.0, 0.0], b: -3.0 },
            Halfspace { a: vec![0.0, -1.0], b: -3.0 },
            Halfspace { a: vec![1.0, 1.0], b: 7.0 },
        ]);
        match run_ellipsoid(vec![0.0, 0.0], 20.0, &mut o, -128.0, 10_000).unwrap() {
            EllipsoidOutcome::Feasible { point, .. } => {
                assert!(point[0] >= 3.0 && point[1] >= 3.0 && point[0] + point[1] <= 7.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn two_dim_empty_region() {
        let mut o = Stub(vec![
            Halfspace { a: vec![-1.0, 0.0], b: -3.0 },
            Halfspace { a: vec![0.0, -1.0], b: -3.0 },
            Halfspace { a: vec![1.0, 1.0], b: 5.0 },
        ]);
        let out = run_ellipsoid(vec![0.0, 0.0], 20.0, &mut o, -128.0, 100_000).unwrap();
        assert!(matches!(out, EllipsoidOutcome::Infeasible { .. }));
    }

    #[test]
    fn simplex_small() {
        // max 3x + 2y, x + y ≤ 4, x + 3y ≤ 6, x ≤ 3
        let a = vec![vec![1.0, 1.0], vec![1.0, 3.0], vec![1.0, 0.0]];
        let (x, v) = simplex_max(&a, &[4.0, 6.0, 3.0], &[3.0, 2.0]).unwrap();
        assert!((v - 11.0).abs() < 1e-9);
        assert!((x[0] - 3.0).abs() < 1e-9 && (x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn restricted_single_column() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let col = Column::induced(&g, &VertexSet::full(2)).unwrap();
        let sol = solve_restricted_primal(&[col], 2, 1.0).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-9);
        assert!((sol.value - 1.0).abs() < 1e-9);
        assert_eq!(solve_restricted_primal(&[], 2, 1.0).unwrap().value, 0.0);
    }

    #[test]
    fn restricted_prefers_heavier() {
        let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (1, 3)]).unwrap();
        let light = Column::induced(&g, &VertexSet::new(vec![0, 1])).unwrap();
        let heavy = Column::induced(&g, &VertexSet::new(vec![1, 2, 3])).unwrap();
        let sol = solve_restricted_primal(&[light, heavy], 4, 1.0).unwrap();
        assert!((sol.value - 3.0).abs() < 1e-9);
        assert!(sol.x[0].abs() < 1e-9);
    }

    #[test]
    fn scan_limit_is_power_above() {
        let lp = DualLp { n: 2, coef: 1.0, cap: 1.0, edges: 1 };
        assert_eq!(lp.scan_limit(), 3);
    }
}
