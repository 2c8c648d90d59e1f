mod common;

use common::*;
use densekit::csp::{self, planted_csp, random_csp, CspConfig};
use densekit::dkc_gp::{approx_dkc, approx_gp, LpConfig};
use densekit::dks::ExactBdks;
use densekit::gp_mbcs::{
    crossing_upper_bound, gp_via_mbcs, mbcs_via_gp, regroup_equal_size, split_family, CutProfile, ExactMbcs,
};
use densekit::shrink::{peel_to_edge_budget, peel_to_size, size_target};
use densekit::solvers::ExactGp;
use densekit::{parse_graph, Graph, Subgraph, VertexSet};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let all = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
            Graph::new(n, all.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e)).unwrap()
        })
    })
}

fn graph_and_subset(max_n: usize) -> impl Strategy<Value = (Graph, VertexSet)> {
    graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), proptest::collection::vec(any::<bool>(), n))
            .prop_map(|(g, keep)| (g, (0..keep.len()).filter(|&v| keep[v]).collect()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn peeling_keeps_the_density_bound((g, s) in graph_and_subset(14), step in 0usize..=8) {
        let k = s.len();
        prop_assume!(k >= 2);
        let lo = 2.0 / k as f64;
        let beta = lo + (1.0 - lo) * step as f64 / 8.0;
        let out = peel_to_size(&g, &s, beta).unwrap();
        let t = size_target(beta, k);
        prop_assert_eq!(out.len(), t);
        prop_assert!(out.iter().all(|v| s.contains(v)));
        let (e, e2) = (g.induced_edge_count(&s).unwrap(), g.induced_edge_count(&out).unwrap());
        prop_assert!(e2 * k * (k - 1) >= t * (t - 1) * e);
    }

    #[test]
    fn edge_budget_lands_in_range((g, s) in graph_and_subset(10), frac in 0.0f64..=1.0) {
        let e = g.induced_edge_count(&s).unwrap();
        prop_assume!(e >= 1);
        let h = 1 + ((e - 1) as f64 * frac) as usize;
        let out = peel_to_edge_budget(&g, &s, h).unwrap();
        let got = g.induced_edge_count(&out).unwrap();
        prop_assert!(3 * got >= h && got <= h, "h {} got {}", h, got);
    }

    #[test]
    fn text_round_trip(g in graph(12)) {
        prop_assert_eq!(parse_graph(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn regrouping_gives_good_solutions(g in graph(12)) {
        let pieces: Vec<Subgraph> = g.induced_subgraph(&VertexSet::full(g.n())).unwrap().components();
        let total: usize = pieces.iter().map(Subgraph::edge_count).sum();
        prop_assume!(total > 0);
        let good = regroup_equal_size(&pieces).unwrap();
        let h = good.h();
        prop_assert!(good.pieces().len() <= good.r());
        for p in good.pieces() {
            p.validate(&g).unwrap();
            prop_assert!(2 * p.edge_count() >= h && p.edge_count() <= h);
        }
        prop_assert!(densekit::graph::pairwise_disjoint(good.pieces()));
        good.to_gp().validate(&g, good.r(), h).unwrap();
    }

    #[test]
    fn splitting_retains_half(g in graph(12), seed in any::<u64>()) {
        let whole = g.induced_subgraph(&VertexSet::full(g.n())).unwrap();
        let split = split_family(&whole, g.n(), &CutProfile::desk(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!(2 * split.retained >= split.original);
        prop_assert!(densekit::graph::pairwise_disjoint(&split.family));
        prop_assert_eq!(split.retained, split.family.iter().map(Subgraph::edge_count).sum::<usize>());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn mbcs_reduction_respects_the_budget(g in graph(7), budget in prop::sample::select(vec![0u64, 1, 9, 16, 64])) {
        let report = mbcs_via_gp(&g, budget, &ExactGp::default(), &CutProfile::desk()).unwrap();
        report.subgraph.validate(&g).unwrap();
        prop_assert!(crossing_upper_bound(&report.subgraph) <= budget);
        prop_assert!(report.subgraph.edge_count() <= brute_mbcs(&g, budget));
    }

    #[test]
    fn gp_reduction_is_feasible(g in graph(7), r in 1usize..=3, h in 1usize..=4, seed in any::<u64>()) {
        let out = gp_via_mbcs(&g, r, h, &ExactMbcs::default(), &CutProfile::desk(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        out.solution.validate(&g, r, h).unwrap();
        prop_assert_eq!(out.value, out.solution.value);
        prop_assert!(out.value <= brute_gp(&g, r, h));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lp_pipelines_stay_feasible(g in graph(8), k in 1usize..=4, r in 1usize..=3, h in 1usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (dkc, report) = approx_dkc(&g, k, &ExactBdks::default(), &LpConfig::default(), &mut rng).unwrap();
        let padded = g.with_isolated(report.padding);
        dkc.validate(&padded, k).unwrap();
        let (gp, _) = approx_gp(&g, r, h, &ExactBdks::default(), &LpConfig::default(), &mut rng).unwrap();
        gp.validate(&g, r, h).unwrap();
        prop_assert!(gp.value <= brute_gp(&g, r, h));
    }

    #[test]
    fn csp_decomposition_is_a_partition(nx in 2usize..=4, ny in 2usize..=4, a in 2usize..=3, fill in 0.3f64..=1.0, planted in any::<bool>(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = ((nx * ny) as f64 * fill).ceil() as usize;
        let inst = if planted {
            planted_csp(nx, ny, a, m, 1, &mut rng).unwrap().0
        } else {
            random_csp(nx, ny, a, m, 1, &mut rng).unwrap()
        };
        let cfg = CspConfig::desk(&inst, 1.0);
        let dec = csp::main_decompose(&inst, &ExactBdks::default(), &cfg, &mut rng).unwrap();
        let mut seen = vec![0; inst.m()];
        for &c in dec.bad.iter().chain(dec.rounds.iter().flat_map(|r| r.good.iter())) {
            seen[c] += 1;
        }
        prop_assert!(seen.iter().all(|&s| s == 1));
        if !dec.bad.is_empty() {
            prop_assert!(csp::verify_bad_set(&inst, &dec.bad, cfg.gamma).unwrap());
        }
        for round in &dec.rounds {
            prop_assert!(csp::verify_good_witness(&inst, &round.good, &round.witness, cfg.beta));
        }
        if planted {
            let d = csp::decide_yes_no(&inst, &ExactBdks::default(), &cfg, &mut rng).unwrap();
            prop_assert_eq!(d.answer, csp::Answer::Yes);
        }
    }
}
