//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero if any
//! criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use densekit::csp::{self, Answer, Constraint, Csp2Instance, CspConfig, DecompositionOutcome};
use densekit::dkc_gp::{
    approx_dkc, approx_gp, beta_of, separation_oracle_dkc, separation_oracle_gp, LpConfig, Separation,
};
use densekit::dks::{bdks_via_dks, solve_dks_exact, ExactBdks, ExactDks, GreedyBdks};
use densekit::gp_mbcs::{
    crossing_upper_bound, decompose_bounded_crossing, gp_via_mbcs, mbcs_via_gp, regroup_equal_size, CutProfile,
    ExactMbcs, GoodGpSolution,
};
use densekit::graph::pairwise_disjoint;
use densekit::inflate::{build_inflated_graph, has_bad_ensemble, log_k, planted_copies, InflationConfig};
use densekit::lp::{ellipsoid_feasibility, Column, DualLp, DualPoint, EllipsoidConfig};
use densekit::oracle::BdksOracle;
use densekit::shrink::{peel_to_edge_budget, peel_to_size, size_target};
use densekit::solvers::ExactGp;
use densekit::{Graph, Subgraph, VertexSet};
use densekit_cli::run;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeds (of 50) on which `approx_dkc` must reach 6 on two disjoint triangles.
const DKC_TRIANGLES_MIN: usize = 40;
/// Seeds (of 100) on which the planted copies must carry at least `0.1·r·OPT` edges.
const PLANTED_MASS_MIN: usize = 70;

type Criterion = (u32, &'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn subsets(n: usize) -> impl Iterator<Item = VertexSet> {
    (0u64..1 << n).map(|m| VertexSet::new(mask_to_vec(m)))
}

fn within(start: Instant, limit: Duration) -> bool {
    start.elapsed() < limit
}

fn peeling_bound() -> Verdict {
    let start = Instant::now();
    let grid: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
    let (mut checks, mut bad) = (0usize, 0usize);
    let mut check = |g: &Graph, s: &VertexSet| {
        let k = s.len();
        if k < 2 {
            return;
        }
        let e = g.induced_edge_count(s).unwrap();
        for &beta in grid.iter().filter(|&&b| b * k as f64 >= 2.0 - 1e-9) {
            let out = peel_to_size(g, s, beta).unwrap();
            let t = size_target(beta, k);
            let e2 = g.induced_edge_count(&out).unwrap();
            checks += 1;
            if out.len() != t || !out.iter().all(|v| s.contains(v)) || e2 * k * (k - 1) < t * (t - 1) * e {
                bad += 1;
            }
        }
    };
    for n in 2..=5 {
        for g in all_graphs(n) {
            for s in subsets(n) {
                check(&g, &s);
            }
        }
    }
    let mut r = rng(1);
    for n in 6..=20 {
        for _ in 0..3 {
            let g = gnp(n, r.gen_range(0.2..0.8), &mut r);
            if n <= 11 {
                for s in subsets(n) {
                    check(&g, &s);
                }
            } else {
                for _ in 0..400 {
                    let s: VertexSet = (0..n).filter(|_| r.gen_bool(0.6)).collect();
                    check(&g, &s);
                }
            }
        }
    }
    let fast = within(start, Duration::from_secs(5));
    verdict(
        bad == 0 && fast,
        format!("{checks} (graph, S, beta) checks, {bad} violations, {:.2}s", start.elapsed().as_secs_f64()),
    )
}

fn edge_budget_shrink() -> Verdict {
    let start = Instant::now();
    let (mut checks, mut bad) = (0usize, 0usize);
    let mut check = |g: &Graph, s: &VertexSet| {
        let e = g.induced_edge_count(s).unwrap();
        for h in 1..=e {
            let out = peel_to_edge_budget(g, s, h).unwrap();
            let got = g.induced_edge_count(&out).unwrap();
            checks += 1;
            if 3 * got < h || got > h {
                bad += 1;
            }
        }
    };
    for n in 1..=5 {
        for g in all_graphs(n) {
            for s in subsets(n) {
                check(&g, &s);
            }
        }
    }
    let mut r = rng(2);
    for n in 6..=10 {
        for _ in 0..3 {
            let g = gnp(n, r.gen_range(0.2..0.9), &mut r);
            for s in subsets(n) {
                check(&g, &s);
            }
        }
    }
    let fast = within(start, Duration::from_secs(5));
    verdict(
        bad == 0 && fast,
        format!("{checks} (graph, S, h) checks, {bad} outside [ceil(h/3), h], {:.2}s", start.elapsed().as_secs_f64()),
    )
}

fn bdks_bridge() -> Verdict {
    let mut bad = 0;
    for seed in 0..200 {
        let mut r = rng(seed);
        let (na, nb) = (r.gen_range(1..=5), r.gen_range(1..=5));
        let g = bipartite_gnp(na, nb, r.gen_range(0.2..0.9), &mut r);
        let (k1, k2) = (r.gen_range(1..=na), r.gen_range(1..=nb));
        let b = bdks_via_dks(&g, k1, k2, &ExactDks::default()).unwrap();
        let feasible = g.check(&b.solution).is_ok() && b.solution.a.len() <= k1 && b.solution.b.len() <= k2;
        if !feasible || 4 * g.edge_count(&b.solution) < brute_bdks(&g, k1, k2) {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("200 instances, {bad} below OPT/4"))
}

/// Re-checks every answer of the DkC separation oracle before passing it on.
struct Audited<'a> {
    g: &'a Graph,
    k: usize,
    oracle: &'a dyn BdksOracle,
    rng: ChaCha8Rng,
    violated: usize,
    wrong: usize,
}

impl Audited<'_> {
    fn call(&mut self, p: &DualPoint) -> Option<Column> {
        let z = p.z.max(0.0);
        let y: Vec<f64> = p.y.iter().map(|v| v.max(0.0)).collect();
        match separation_oracle_dkc(z, &y, self.g, self.k, self.oracle, &mut self.rng).unwrap() {
            Separation::Accept => None,
            Separation::Violated(s) => {
                self.violated += 1;
                let m = self.g.induced_edge_count(&s).unwrap() as f64;
                let cover = z + s.iter().map(|v| y[v]).sum::<f64>();
                if s.len() > self.k || s.is_empty() || cover >= m {
                    self.wrong += 1;
                }
                Some(Column::induced(self.g, &s).unwrap())
            }
        }
    }
}

fn separation_soundness() -> Verdict {
    let (mut violated, mut wrong) = (0usize, 0usize);
    // Violations at a larger scale, with random duals.
    for seed in 0..40 {
        let mut r = rng(1000 + seed);
        let n = r.gen_range(10..=30);
        let g = gnp(n, 0.3, &mut r);
        let (k, h) = (r.gen_range(2..=6), r.gen_range(1..=6));
        let z = r.gen_range(0.0..2.0);
        let y: Vec<f64> = (0..n).map(|_| if r.gen_bool(0.5) { 0.0 } else { r.gen_range(0.0..1.5) }).collect();
        let oracle: &dyn BdksOracle = if seed % 2 == 0 { &GreedyBdks } else { &ExactBdks::default() };
        if let Separation::Violated(s) = separation_oracle_dkc(z, &y, &g, k, oracle, &mut r).unwrap() {
            violated += 1;
            let m = g.induced_edge_count(&s).unwrap() as f64;
            if s.len() > k || z + s.iter().map(|v| y[v]).sum::<f64>() >= m {
                wrong += 1;
            }
        }
        if let Separation::Violated(piece) = separation_oracle_gp(z, &y, &g, h, oracle, &mut r).unwrap() {
            violated += 1;
            let ok = piece.validate(&g).is_ok()
                && piece.edge_count() <= h
                && z + piece.vertices().iter().map(|v| y[v]).sum::<f64>() < piece.edge_count() as f64;
            if !ok {
                wrong += 1;
            }
        }
    }
    // Acceptance: first accepted point of the budget scan, N-fold repetition inside.
    let mut sound = 0;
    let exact = ExactBdks::default();
    let cfg = EllipsoidConfig::default();
    for seed in 0..100u64 {
        let mut r = rng(seed);
        let n = r.gen_range(5..=10);
        let k = r.gen_range(2..=4).min(n);
        let g = gnp(n, r.gen_range(0.3..0.8), &mut r);
        let g = g.with_isolated((k - n % k) % k);
        let n = g.n();
        if g.m() == 0 {
            sound += 1;
            continue;
        }
        let lp = DualLp::dkc(&g, k).unwrap();
        let beta = beta_of(n, exact.descriptor().alpha, LpConfig::default().beta_constant);
        let mut audit = Audited { g: &g, k, oracle: &exact, rng: rng(seed + 7), violated: 0, wrong: 0 };
        let mut accepted = None;
        for c in 0..=lp.scan_limit() {
            let mut sep = |p: &DualPoint| Ok(audit.call(p));
            let run = ellipsoid_feasibility(&lp, c, &mut sep, &cfg).unwrap();
            if let Some(p) = run.point {
                accepted = Some(p);
                break;
            }
        }
        violated += audit.violated;
        wrong += audit.wrong;
        let Some(p) = accepted else { continue };
        let (z, y) = (p.z.max(0.0), p.y.iter().map(|v| v.max(0.0)).collect::<Vec<f64>>());
        let adj = adjacency(&g);
        let holds = (0u64..1 << n).filter(|m| (1..=k).contains(&(m.count_ones() as usize))).all(|m| {
            let cover = z + mask_to_vec(m).iter().map(|&v| y[v]).sum::<f64>();
            cover * (1.0 + 1e-9) >= edges_in(&adj, m) as f64 / beta
        });
        if holds {
            sound += 1;
        }
    }
    verdict(
        wrong == 0 && sound >= 95,
        format!("{violated} violated answers, {wrong} failed re-check; accepted points sound in {sound}/100 trials"),
    )
}

fn lp_pipelines() -> Verdict {
    let cfg = LpConfig::default();
    let mut broken = Vec::new();
    for seed in 0..50u64 {
        let mut r = rng(seed);
        let n = r.gen_range(4..=12);
        let g = gnp(n, r.gen_range(0.2..0.6), &mut r);
        let k = r.gen_range(2..=4);
        let (r_, h) = (r.gen_range(1..=3), r.gen_range(1..=4));
        let (dkc, report) = approx_dkc(&g, k, &ExactBdks::default(), &cfg, &mut r).unwrap();
        if dkc.validate(&g.with_isolated(report.padding), k).is_err() {
            broken.push(format!("dkc seed {seed}"));
        }
        let (gp, _) = approx_gp(&g, r_, h, &ExactBdks::default(), &cfg, &mut r).unwrap();
        if gp.validate(&g, r_, h).is_err() {
            broken.push(format!("gp seed {seed}"));
        }
    }
    let tri = two_triangles();
    let opt = brute_dkc(&tri, 3);
    let hits = (0..50u64)
        .filter(|&seed| approx_dkc(&tri, 3, &ExactBdks::default(), &cfg, &mut rng(seed)).unwrap().0.value == opt)
        .count();
    verdict(
        broken.is_empty() && opt == 6 && hits >= DKC_TRIANGLES_MIN,
        format!(
            "100 runs, {} invariant failures{}; two triangles reach {opt} on {hits}/50 seeds (need {DKC_TRIANGLES_MIN})",
            broken.len(),
            if broken.is_empty() { String::new() } else { format!(" ({})", broken.join(", ")) }
        ),
    )
}

fn inflation_structure() -> Verdict {
    let cfg = InflationConfig::desk();
    let wide = InflationConfig { c_exp: 3, ..InflationConfig::desk() };
    let (mut clean, mut ambiguous, mut piece_faults, mut heavy) = (0, 0, 0, 0);
    for seed in 0..100u64 {
        let mut r = rng(seed);
        let n = r.gen_range(3..=6);
        let mut g = gnp(n, r.gen_range(0.4..0.9), &mut r);
        while g.m() == 0 {
            g = gnp(n, 0.7, &mut r);
        }
        let k = r.gen_range(2..=n);
        for c in [&cfg, &wide].into_iter().filter(|c| n <= 5 || c.c_exp == 1) {
            let host = build_inflated_graph(&g, c, &mut r).unwrap();
            if has_bad_ensemble(host.embedding(), host.modulus(), c.q_for(n), c.ensemble_ceiling).unwrap().is_none() {
                clean += 1;
                if !host.origins_unique() {
                    ambiguous += 1;
                }
            }
        }
        let host = build_inflated_graph(&g, &cfg, &mut r).unwrap();
        let s_opt = solve_dks_exact(&g, k, 1e9).unwrap();
        let opt = g.induced_edge_count(&s_opt).unwrap();
        let copies = planted_copies(&g, k, &s_opt, &host, &mut r).unwrap();
        if !pairwise_disjoint(&copies)
            || copies.iter().any(|c| c.vertex_count() > k || c.validate(host.host()).is_err())
        {
            piece_faults += 1;
        }
        let total: usize = copies.iter().map(Subgraph::edge_count).sum();
        let copies_drawn = (host.modulus() as f64 / (k as f64 * log_k(k))).floor();
        if total as f64 >= 0.1 * copies_drawn * opt as f64 {
            heavy += 1;
        }
    }
    verdict(
        ambiguous == 0 && clean > 0 && piece_faults == 0 && heavy >= PLANTED_MASS_MIN,
        format!(
            "{clean} embeddings without a bad ensemble, {ambiguous} with ambiguous origins; {piece_faults} piece faults; \
             planted mass >= 0.1 r OPT on {heavy}/100 (need {PLANTED_MASS_MIN})"
        ),
    )
}

fn good_ok(good: &GoodGpSolution, g: &Graph) -> bool {
    let h = good.h();
    pairwise_disjoint(good.pieces())
        && good.pieces().len() <= good.r()
        && good.pieces().iter().all(|p| p.validate(g).is_ok() && 2 * p.edge_count() >= h && p.edge_count() <= h)
}

fn gp_mbcs_invariants() -> Verdict {
    let profile = CutProfile::desk();
    let (mut goods, mut good_faults, mut splits, mut split_faults, mut inequality) = (0, 0, 0, 0, 0);
    let (mut mbcs_runs, mut mbcs_faults) = (0, 0);
    for seed in 0..60u64 {
        let mut r = rng(seed);
        let n = r.gen_range(4..=10);
        let g = gnp(n, r.gen_range(0.3..0.9), &mut r);
        let whole = g.induced_subgraph(&VertexSet::full(n)).unwrap();
        if let Ok(good) = regroup_equal_size(&whole.components()) {
            goods += 1;
            if !good_ok(&good, &g) {
                good_faults += 1;
            }
        }
        if g.m() >= n {
            match decompose_bounded_crossing(&g, crossing_upper_bound(&whole), &whole, &profile, &mut r) {
                Ok(d) => {
                    splits += 1;
                    goods += 1;
                    if 2 * d.split.retained < d.split.original || d.split.original != whole.edge_count() {
                        split_faults += 1;
                    }
                    if !good_ok(&d.good, &g) {
                        good_faults += 1;
                    }
                }
                Err(densekit::Error::ProfileInequality(_)) => inequality += 1,
                Err(e) => {
                    split_faults += 1;
                    eprintln!("decompose seed {seed}: {e}");
                }
            }
        }
        if n <= 8 {
            for budget in [0u64, 4, 16, 100] {
                mbcs_runs += 1;
                let rep = mbcs_via_gp(&g, budget, &ExactGp::default(), &profile).unwrap();
                if rep.subgraph.validate(&g).is_err() || crossing_upper_bound(&rep.subgraph) > budget {
                    mbcs_faults += 1;
                }
            }
        }
    }
    let tri = gp_via_mbcs(&two_triangles(), 2, 3, &ExactMbcs::default(), &profile, &mut rng(0)).unwrap();
    let tri_ok = tri.value == 6 && tri.solution.validate(&two_triangles(), 2, 3).is_ok();
    verdict(
        good_faults == 0 && split_faults == 0 && mbcs_faults == 0 && tri_ok,
        format!(
            "{goods} good solutions, {good_faults} faults; {splits} decompositions ({inequality} stopped by a profile inequality), \
             {split_faults} retention faults; {mbcs_runs} MBCS runs, {mbcs_faults} over budget; two triangles -> {}",
            tri.value
        ),
    )
}

fn csp_engine() -> Verdict {
    let mut faults = Vec::new();
    let mut yes = 0;
    let (mut bad_sets, mut certs) = (0, 0);
    for seed in 0..50u64 {
        let mut r = rng(seed);
        let a = r.gen_range(2..=3);
        let (nx, ny) = (r.gen_range(2..=5), r.gen_range(2..=5));
        let m = r.gen_range(1..=(nx * ny).min(12));
        let d = r.gen_range(1..=2.min(a));
        let (inst, hidden) = csp::planted_csp(nx, ny, a, m, d, &mut r).unwrap();
        if 2 * inst.count_satisfied(&inst.all_ids(), &hidden) < inst.m() {
            faults.push(format!("seed {seed}: planted assignment below half"));
        }
        let cfg = CspConfig::desk(&inst, 1.0);
        match csp::decide_yes_no(&inst, &ExactBdks::default(), &cfg, &mut r) {
            Ok(dec) if dec.answer == Answer::Yes => yes += 1,
            Ok(_) => faults.push(format!("seed {seed}: NO")),
            Err(e) => faults.push(format!("seed {seed}: {e}")),
        }
        match csp::main_decompose(&inst, &ExactBdks::default(), &cfg, &mut r) {
            Ok(dec) => {
                let mut seen = vec![0; inst.m()];
                dec.bad.iter().chain(dec.rounds.iter().flat_map(|x| x.good.iter())).for_each(|&c| seen[c] += 1);
                if seen.iter().any(|&s| s != 1) {
                    faults.push(format!("seed {seed}: not a partition"));
                }
                if !dec.bad.is_empty() {
                    bad_sets += 1;
                    if !csp::verify_bad_set(&inst, &dec.bad, cfg.gamma).unwrap() {
                        faults.push(format!("seed {seed}: bad set fails"));
                    }
                }
                for round in &dec.rounds {
                    certs += 1;
                    if !csp::verify_good_witness(&inst, &round.good, &round.witness, cfg.beta) {
                        faults.push(format!("seed {seed}: round witness fails"));
                    }
                }
            }
            Err(e) => faults.push(format!("seed {seed}: {e}")),
        }
        match csp::partition_or_subgraph(&inst, &inst.all_ids(), &ExactBdks::default(), &cfg, &mut r) {
            Ok(DecompositionOutcome::GoodCertificate(c)) => {
                certs += 1;
                let all = inst.all_ids();
                let counted = inst.count_satisfied(&all, &c.assignment);
                if counted != c.satisfied
                    || c.edges != all.len()
                    || !csp::verify_good_witness(&inst, &all, &c.assignment, cfg.beta.powi(3))
                {
                    faults.push(format!("seed {seed}: certificate fails"));
                }
            }
            Ok(DecompositionOutcome::BadSet { constraints }) => {
                bad_sets += 1;
                if !csp::verify_bad_set(&inst, &constraints, cfg.gamma).unwrap() {
                    faults.push(format!("seed {seed}: bad set fails"));
                }
            }
            Ok(DecompositionOutcome::Subgraph(_)) => {}
            Err(e) => faults.push(format!("seed {seed}: {e}")),
        }
    }
    let mut no = 0;
    for seed in 0..50u64 {
        let mut r = rng(500 + seed);
        let (nx, ny) = (r.gen_range(1..=4), r.gen_range(1..=4));
        let mut cs: Vec<Constraint> =
            (0..nx).flat_map(|x| (0..ny).map(move |y| Constraint { x, y, pairs: Vec::new() })).collect();
        cs.retain(|_| r.gen_bool(0.75));
        if cs.is_empty() {
            cs.push(Constraint { x: 0, y: 0, pairs: Vec::new() });
        }
        let inst = Csp2Instance::new(nx, ny, r.gen_range(2..=3), cs).unwrap();
        let cfg = CspConfig::desk(&inst, 1.0);
        match csp::decide_yes_no(&inst, &ExactBdks::default(), &cfg, &mut r) {
            Ok(d) if d.answer == Answer::No => {
                no += 1;
                bad_sets += 1;
                if !csp::verify_bad_set(&inst, &inst.all_ids(), cfg.gamma).unwrap() {
                    faults.push(format!("empty seed {seed}: bad set fails"));
                }
            }
            Ok(_) => faults.push(format!("empty seed {seed}: YES")),
            Err(e) => faults.push(format!("empty seed {seed}: {e}")),
        }
    }
    verdict(
        faults.is_empty() && yes == 50 && no == 50,
        format!(
            "planted YES {yes}/50, empty-table NO {no}/50, {bad_sets} bad sets and {certs} certificates verified, {} faults{}",
            faults.len(),
            faults.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
        ),
    )
}

fn cli_determinism() -> Verdict {
    let dir = tempfile::TempDir::new().unwrap();
    let call = |args: &[&str]| run(std::iter::once("densekit").chain(args.iter().copied()));
    let save = |name: &str, args: &[&str]| {
        let out = call(args);
        assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
        let p = dir.path().join(name);
        std::fs::write(&p, out.stdout).unwrap();
        p.to_str().unwrap().to_string()
    };
    let mut commands: Vec<Vec<String>> = Vec::new();
    let gens: [(&str, Vec<&str>); 6] = [
        ("g.el", vec!["gen", "gnp", "--n", "8", "--p", "0.5", "--seed", "3"]),
        ("b.el", vec!["gen", "gnp", "--n", "4", "--nb", "4", "--p", "0.5", "--seed", "3"]),
        ("pd.el", vec!["gen", "planted-dense", "--n", "9", "--k", "3", "--p", "0.2", "--seed", "5"]),
        ("tri2.el", vec!["gen", "disjoint-cliques", "--sizes", "3,3"]),
        ("k3.el", vec!["gen", "disjoint-cliques", "--sizes", "3"]),
        ("p.csp", vec!["gen", "planted-csp", "--x", "4", "--y", "4", "--a", "2", "--c", "8", "--seed", "1"]),
    ];
    let mut paths = std::collections::BTreeMap::new();
    for (name, args) in &gens {
        commands.push(args.iter().map(|s| s.to_string()).collect());
        paths.insert(*name, save(name, args));
    }
    let p = |name: &str| paths[name].clone();
    let witness = dir.path().join("w.json");
    std::fs::write(&witness, "{\"x\":[0,0,0,0],\"y\":[0,0,0,0]}").unwrap();
    let mut add = |args: &[&str]| commands.push(args.iter().map(|s| s.to_string()).collect());
    for seed in ["1", "2"] {
        for g in ["g.el", "pd.el"] {
            for oracle in ["exact", "greedy"] {
                add(&["solve", "dks", "--graph", &p(g), "--k", "3", "--oracle", oracle, "--seed", seed]);
                add(&["solve", "gp", "--graph", &p(g), "--r", "2", "--h", "3", "--oracle", oracle, "--seed", seed]);
                add(&["solve", "mbcs", "--graph", &p(g), "--budget", "9", "--oracle", oracle, "--seed", seed]);
            }
            add(&["solve", "dkc", "--graph", &p(g), "--k", "3", "--oracle", "lp:exact", "--seed", seed]);
            add(&[
                "solve",
                "gp",
                "--graph",
                &p(g),
                "--r",
                "2",
                "--h",
                "3",
                "--oracle",
                "lp:greedy-bdks",
                "--seed",
                seed,
            ]);
            add(&["reduce", "dks-from-bdks", "--graph", &p(g), "--k", "3", "--seed", seed]);
            add(&["reduce", "gp-from-mbcs", "--graph", &p(g), "--r", "2", "--h", "3", "--seed", seed]);
            add(&["reduce", "mbcs-from-gp", "--graph", &p(g), "--budget", "4", "--seed", seed]);
        }
        add(&["solve", "bdks", "--graph", &p("b.el"), "--k1", "2", "--k2", "2", "--seed", seed]);
        add(&[
            "solve",
            "gp",
            "--graph",
            &p("tri2.el"),
            "--r",
            "2",
            "--h",
            "3",
            "--oracle",
            "lp:exact-bdks",
            "--seed",
            seed,
        ]);
        add(&["reduce", "bdks-from-dks", "--graph", &p("b.el"), "--k1", "2", "--k2", "3", "--seed", seed]);
        add(&["reduce", "dkc-from-bdks", "--graph", &p("tri2.el"), "--k", "3", "--seed", seed]);
        add(&["reduce", "gp-from-bdks", "--graph", &p("tri2.el"), "--r", "2", "--h", "3", "--seed", seed]);
        add(&["reduce", "dks-from-dkc", "--graph", &p("k3.el"), "--k", "2", "--seed", seed]);
        add(&["reduce", "dks-from-gp", "--graph", &p("k3.el"), "--k", "2", "--seed", seed]);
        add(&["csp", "decide", "--instance", &p("p.csp"), "--seed", seed]);
        add(&["csp", "decompose", "--instance", &p("p.csp"), "--seed", seed, "--oracle", "greedy"]);
    }
    add(&["csp", "verify-bad", "--instance", &p("p.csp")]);
    add(&["csp", "verify-good", "--instance", &p("p.csp"), "--witness", witness.to_str().unwrap()]);
    let (mut differ, mut failed) = (Vec::new(), Vec::new());
    for cmd in &commands {
        let (a, b) = (
            call(&cmd.iter().map(String::as_str).collect::<Vec<_>>()),
            call(&cmd.iter().map(String::as_str).collect::<Vec<_>>()),
        );
        if a.code != 0 {
            failed.push(format!("{} -> {}", cmd.join(" "), a.code));
        }
        if a != b {
            differ.push(cmd.join(" "));
        }
    }
    let bin = Path::new(env!("CARGO_BIN_EXE_densekit"));
    let mut cross = 0;
    for cmd in commands.iter().step_by(4) {
        let outs: Vec<Vec<u8>> = (0..2).map(|_| Command::new(bin).args(cmd).output().unwrap().stdout).collect();
        if outs[0] != outs[1]
            || outs[0] != call(&cmd.iter().map(String::as_str).collect::<Vec<_>>()).stdout.into_bytes()
        {
            differ.push(format!("process: {}", cmd.join(" ")));
        }
        cross += 1;
    }
    verdict(
        differ.is_empty() && failed.is_empty(),
        format!(
            "{} commands run twice in-process and {cross} across processes; {} differ, {} failed{}",
            commands.len(),
            differ.len(),
            failed.len(),
            differ.first().or(failed.first()).map(|f| format!(" (first: {f})")).unwrap_or_default()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "peeling bound", peeling_bound),
        (2, "edge-budget shrink", edge_budget_shrink),
        (3, "BDkS bridge", bdks_bridge),
        (4, "separation soundness", separation_soundness),
        (5, "DkC/GP pipeline feasibility", lp_pipelines),
        (6, "inflation structure", inflation_structure),
        (7, "GP/MBCS invariants", gp_mbcs_invariants),
        (8, "CSP engine", csp_engine),
        (9, "CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            verdict(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {id} {}: {name}: {} [{:.2}s]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
