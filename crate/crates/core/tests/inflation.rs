mod common;

use common::*;
use densekit::dks::solve_dks_exact;
use densekit::inflate::{
    build_inflated_graph, dks_via_dkc, dks_via_gp, has_bad_ensemble, planted_copies, InflationConfig,
};
use densekit::solvers::{ExactDkc, ExactGp};
use densekit::{Graph, VertexSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn wide() -> InflationConfig {
    InflationConfig { c_exp: 3, ..InflationConfig::desk() }
}

#[test]
fn no_bad_ensemble_means_unique_origins() {
    let cfg = wide();
    let mut checked = 0;
    for seed in 0..60 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=5);
        let g = gnp(n, 0.6, &mut rng);
        let host = build_inflated_graph(&g, &cfg, &mut rng).unwrap();
        let q = cfg.q.unwrap();
        if has_bad_ensemble(host.embedding(), host.modulus(), q, cfg.ensemble_ceiling).unwrap().is_none() {
            checked += 1;
            assert!(host.origins_unique(), "seed {seed}");
        }
    }
    assert!(checked >= 30, "only {checked} embeddings without a bad ensemble");
}

#[test]
fn planted_copies_are_disjoint_and_small() {
    let cfg = wide();
    for seed in 0..40 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=5);
        let g = gnp(n, 0.6, &mut rng);
        let k = rng.gen_range(2..=n);
        let s: VertexSet = solve_dks_exact(&g, k, 1e9).unwrap();
        let host = build_inflated_graph(&g, &cfg, &mut rng).unwrap();
        let copies = planted_copies(&g, k, &s, &host, &mut rng).unwrap();
        assert!(densekit::graph::pairwise_disjoint(&copies));
        for c in &copies {
            c.validate(host.host()).unwrap();
            assert!(c.vertex_count() <= k);
        }
    }
}

#[test]
fn inflation_drivers_return_k_sets() {
    let k3 = Graph::complete(3);
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, report) = dks_via_gp(&k3, 2, &ExactGp::default(), &InflationConfig::desk(), &mut rng).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(report.value, k3.induced_edge_count(&s).unwrap());
    }
    let g = Graph::complete(4);
    let mut ok = 0;
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match dks_via_dkc(&g, 3, &ExactDkc::default(), &InflationConfig::desk(), &mut rng) {
            Ok((s, report)) => {
                assert_eq!(s.len(), 3);
                assert_eq!(report.value, g.induced_edge_count(&s).unwrap());
                assert!(report.value <= brute_dks(&g, 3));
                ok += 1;
            }
            Err(densekit::Error::BadEvent(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(ok >= 5, "{ok} of 10 runs avoided the bad event");
}
