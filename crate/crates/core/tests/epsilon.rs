//! Overlap construction for a commutation graph, end to end.

use sykmix::epsilon_graph::{build_overlap_sets, check_epsilon_freeness, interaction_length_for, Graph};
use sykmix::partitions::Word;
use sykmix::syk::{finite_n_pair_moment, mc_joint_moment};

#[test]
fn edge_overlaps_vanish_and_non_edges_grow() {
    let g = Graph::path(3);
    let mut previous = 0.0;
    for m in [1usize, 10, 100, 1000] {
        let f = build_overlap_sets(&g, m).unwrap();
        assert_eq!(f.lambda_hat(1, 2).unwrap(), 0.0);
        assert_eq!(f.lambda_hat(2, 3).unwrap(), 0.0);
        let grow = f.lambda_hat(1, 3).unwrap();
        assert!(grow > previous, "m={m}: {grow} after {previous}");
        previous = grow;
    }
    assert!(previous > 1.0);
}

#[test]
fn interaction_length_rule() {
    for n in [8usize, 64, 1000, 4000, 123_456] {
        let r = interaction_length_for(n);
        let t = (r / 2) as u128;
        assert_eq!(r % 2, 0);
        assert!(64 * t.pow(3) <= (n as u128).pow(2));
        assert!(64 * (t + 1).pow(3) > (n as u128).pow(2));
    }
}

#[test]
fn dense_scale_monte_carlo_matches_pair_formula() {
    let w = Word::from([1, 2, 1, 2]);
    for g in [Graph::complete(2), Graph::empty(2)] {
        for m in [2usize, 3, 5] {
            let f = build_overlap_sets(&g, m).unwrap();
            let formula = finite_n_pair_moment(&f, &w, 10_000, 5).unwrap().value;
            let est = mc_joint_moment(&f, &w, 2000, 5).unwrap();
            assert!(est.within(formula, 4.0), "m={m}: {est:?} vs {formula}");
        }
    }
}

#[test]
fn non_commuting_moment_decays_with_scale() {
    let w = Word::from([1, 2, 1, 2]);
    let mut previous = f64::INFINITY;
    for m in [10usize, 100, 1000, 10_000] {
        let f = build_overlap_sets(&Graph::empty(2), m).unwrap();
        let v = finite_n_pair_moment(&f, &w, 1000, 5).unwrap();
        assert_eq!(v.stderr, 0.0);
        assert!(v.value < previous, "m={m}: {} after {previous}", v.value);
        previous = v.value;
    }
    assert!(previous.abs() < 0.05, "{previous}");
}

#[test]
fn commuting_moment_is_one() {
    let w = Word::from([1, 2, 1, 2]);
    for m in [1usize, 10, 100, 1000, 10_000] {
        let f = build_overlap_sets(&Graph::complete(2), m).unwrap();
        assert_eq!(finite_n_pair_moment(&f, &w, 1000, 5).unwrap().value, 1.0);
    }
}

#[test]
fn empty_and_complete_graphs_pass() {
    for g in [Graph::empty(3), Graph::complete(3), Graph::path(4)] {
        let report = check_epsilon_freeness(&g, &vec![0.0; g.vertices()], 6).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.commutation_checks > 0, !g.edges().is_empty());
    }
}
