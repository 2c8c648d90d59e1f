mod common;

use common::*;
use densekit::dks::{bdks_via_dks, dks_via_bdks, ExactBdks, ExactDks, GreedyBdks, GreedyDks};
use densekit::gp_mbcs::{crossing_upper_bound, ExactMbcs, GreedyMbcs};
use densekit::oracle::{BdksOracle, DkcOracle, DksOracle, GpOracle, MbcsOracle};
use densekit::solvers::{ExactDkc, ExactGp, GreedyDkc, GreedyGp};
use densekit::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn exact_dks_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..120 {
        let n = rng.gen_range(1..=10);
        let g = gnp(n, rng.gen_range(0.1..0.9), &mut rng);
        let k = rng.gen_range(1..=n);
        let s = ExactDks::default().solve(&g, k).unwrap();
        assert_eq!(s.len(), k);
        assert_eq!(g.induced_edge_count(&s).unwrap(), brute_dks(&g, k));
        let greedy = GreedyDks.solve(&g, k).unwrap();
        assert_eq!(greedy.len(), k);
        assert!(g.induced_edge_count(&greedy).unwrap() <= brute_dks(&g, k));
    }
}

#[test]
fn exact_bdks_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..150 {
        let (na, nb) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let g = bipartite_gnp(na, nb, rng.gen_range(0.2..0.9), &mut rng);
        let (k1, k2) = (rng.gen_range(0..=na), rng.gen_range(0..=nb));
        let s = ExactBdks::default().solve(&g, k1, k2).unwrap();
        g.check(&s).unwrap();
        assert!(s.a.len() <= k1 && s.b.len() <= k2);
        let opt = brute_bdks(&g, k1, k2);
        assert_eq!(g.edge_count(&s), opt);
        let greedy = GreedyBdks.solve(&g, k1, k2).unwrap();
        assert!(greedy.a.len() <= k1 && greedy.b.len() <= k2);
        assert!(g.edge_count(&greedy) <= opt);
    }
}

#[test]
fn exact_dkc_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..60 {
        let k = rng.gen_range(1..=4);
        let blocks = rng.gen_range(1..=9 / k);
        let n = k * blocks;
        let g = gnp(n, rng.gen_range(0.2..0.8), &mut rng);
        let sol = ExactDkc::default().solve(&g, k).unwrap();
        sol.validate(&g, k).unwrap();
        let opt = brute_dkc(&g, k);
        assert_eq!(sol.value, opt);
        let greedy = GreedyDkc.solve(&g, k).unwrap();
        greedy.validate(&g, k).unwrap();
        assert!(greedy.value <= opt);
    }
}

#[test]
fn exact_gp_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..60 {
        let n = rng.gen_range(2..=8);
        let g = gnp(n, rng.gen_range(0.2..0.8), &mut rng);
        let (r, h) = (rng.gen_range(1..=3), rng.gen_range(1..=5));
        let sol = ExactGp::default().solve(&g, r, h).unwrap();
        sol.validate(&g, r, h).unwrap();
        let opt = brute_gp(&g, r, h);
        assert_eq!(sol.value, opt, "n {n} r {r} h {h} edges {:?}", g.edges());
        let greedy = GreedyGp.solve(&g, r, h).unwrap();
        greedy.validate(&g, r, h).unwrap();
        assert!(greedy.value <= opt);
    }
}

#[test]
fn exact_mbcs_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..60 {
        let n = rng.gen_range(2..=7);
        let mut g = gnp(n, rng.gen_range(0.2..0.7), &mut rng);
        while g.m() > 12 {
            g = gnp(n, 0.4, &mut rng);
        }
        let budget = [0u64, 1, 16, 25, 50, 200][rng.gen_range(0..6)];
        let h = ExactMbcs::default().solve(&g, budget).unwrap();
        h.validate(&g).unwrap();
        assert!(crossing_upper_bound(&h) <= budget);
        assert_eq!(crossing_upper_bound(&h), surrogate_cost(g.n(), h.edges()));
        let opt = brute_mbcs(&g, budget);
        assert_eq!(h.edge_count(), opt);
        let greedy = GreedyMbcs.solve(&g, budget).unwrap();
        greedy.validate(&g).unwrap();
        assert!(crossing_upper_bound(&greedy) <= budget);
        assert!(greedy.edge_count() <= opt);
    }
}

#[test]
fn bridges_keep_their_factors() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..80 {
        let (na, nb) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let g = bipartite_gnp(na, nb, 0.5, &mut rng);
        let (k1, k2) = (rng.gen_range(1..=na), rng.gen_range(1..=nb));
        let b = bdks_via_dks(&g, k1, k2, &ExactDks::default()).unwrap();
        g.check(&b.solution).unwrap();
        assert!(b.solution.a.len() <= k1 && b.solution.b.len() <= k2);
        assert_eq!(b.value, g.edge_count(&b.solution));
        assert!(4 * b.value >= brute_bdks(&g, k1, k2));
    }
    for _ in 0..80 {
        let n = rng.gen_range(2..=8);
        let g = gnp(n, 0.5, &mut rng);
        let k = rng.gen_range(1..=n);
        let b = dks_via_bdks(&g, k, &ExactBdks::default()).unwrap();
        assert_eq!(b.solution.len(), k);
        assert_eq!(b.value, g.induced_edge_count(&b.solution).unwrap());
        assert!(8 * b.value >= brute_dks(&g, k), "n {n} k {k} value {} opt {}", b.value, brute_dks(&g, k));
    }
}

#[test]
fn exact_ceilings_are_enforced() {
    let g = Graph::complete(30);
    let err = ExactDkc { ceiling: 10.0 }.solve(&g, 5).unwrap_err();
    assert!(matches!(err, densekit::Error::CeilingExceeded { .. }), "{err}");
}
