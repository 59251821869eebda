//! The factoring-15 polynomial `g` and its reduction chain down to two variables.
mod common;

use common::*;
use posiqubo::graph::{
    build_conflict_graph, fix_isolated_vertices, merge_twin_vertices, mwis_bruteforce, realize_graph, reduce_fixpoint,
    ConflictGraph,
};
use posiqubo::io;
use posiqubo::qubo::{ising_to_qubo, poly_to_qubo, qubo_to_ising, solve_exact, solve_sa, AnnealSchedule, Quarter};
use posiqubo::{negate_to_posiform, Assignment, Polynomial, Posiform};

fn g() -> Polynomial {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/g.poly")).unwrap();
    io::polynomial_from_json(&text).unwrap()
}

fn g_prime() -> Posiform {
    negate_to_posiform(&g()).unwrap()
}

#[test]
fn fixture_matches_the_coefficients() {
    let want = poly(
        4,
        &[
            (&[], 149),
            (&[1], 58),
            (&[2], 50),
            (&[3], 12),
            (&[4], -80),
            (&[1, 2], 25),
            (&[1, 3], -6),
            (&[1, 4], -64),
            (&[2, 3], 2),
            (&[2, 4], -64),
            (&[3, 4], 16),
        ],
    );
    let g = g();
    assert_eq!(g, want);
    assert_eq!(g.n(), 4);
    assert_eq!(g.nonconstant_terms().count(), 10);
    assert_eq!(g.evaluate(&Assignment::zeros(4)).unwrap(), 149);
    assert_eq!(brute_min(&g), 55);
    let s = g.stats();
    assert_eq!((s.degree, s.min_coeff, s.max_coeff), (2, -80, 149));
}

#[test]
fn minimum_is_unique() {
    // The printed constant leaves an offset of 55 above the ground state.
    let g = g();
    let best: Vec<Vec<bool>> = all_bits(4).filter(|x| eval(&g, x) == 55).collect();
    assert_eq!(best, vec![vec![false, true, false, true]]);
}

#[test]
fn negation_gives_g_prime() {
    let phi = g_prime();
    let want = code_terms(&[
        (&[-1], 58),
        (&[-2], 75),
        (&[-3], 14),
        (&[4], 64),
        (&[-1, 2], 25),
        (&[1, 3], 6),
        (&[1, 4], 64),
        (&[-2, 3], 2),
        (&[2, 4], 64),
        (&[-3, 4], 16),
    ]);
    assert_eq!(posiform_terms(&phi), want);
    for x in all_bits(4) {
        assert_eq!(phi.evaluate(&Assignment::new(x.clone())).unwrap(), -eval(&g(), &x));
    }
    assert_eq!(posiform_max(&phi), -55);
    // -x1 = -1 + x̄1
    let neg = negate_to_posiform(&poly(1, &[(&[1], 1)])).unwrap();
    assert_eq!(neg.constant(), -1);
    assert_eq!(posiform_terms(&neg), code_terms(&[(&[-1], 1)]));
}

fn index_of(phi: &Posiform, codes: &[i64]) -> usize {
    let key = code_terms(&[(codes, 0)]).into_keys().next().unwrap();
    phi.terms()
        .position(|(t, _)| {
            let mut c: Vec<i64> = t.literals().iter().map(|l| l.to_signed()).collect();
            c.sort_by_key(|c| (c.abs(), -c.signum()));
            c == key
        })
        .unwrap_or_else(|| panic!("no term {codes:?}"))
}

#[test]
fn conflict_graph_of_g_prime() {
    let phi = g_prime();
    let graph = build_conflict_graph(&phi);
    assert_eq!(graph.len(), 10);
    let e = |a: &[i64], b: &[i64]| graph.adjacent(index_of(&phi, a), index_of(&phi, b));
    assert!(e(&[-1, 2], &[-2]));
    assert!(e(&[-1, 2], &[1, 4]));
    assert!(e(&[-1, 2], &[1, 3]));
    assert!(e(&[-1, 2], &[-2, 3]));
    assert!(e(&[-2, 3], &[-3, 4]));
    assert!(e(&[-2, 3], &[2, 4]));
    assert!(e(&[-3, 4], &[1, 3]));
    assert!(!e(&[4], &[-3, 4]));
    let isolated: Vec<usize> = (0..graph.len()).filter(|&k| graph.is_isolated(k)).collect();
    assert_eq!(isolated, vec![index_of(&phi, &[4])]);
    let (alpha, _) = mwis_bruteforce(&graph).unwrap();
    assert_eq!(phi.constant() + alpha, -55);
}

#[test]
fn isolated_x4_is_fixed() {
    let (g2, log) = fix_isolated_vertices(&g_prime()).unwrap();
    assert!(!log.is_empty());
    let want = code_terms(&[
        (&[1], 6),
        (&[-2], 11),
        (&[-3], 30),
        (&[-1, 2], 25),
        (&[1, 3], 6),
        (&[-2, 3], 2),
    ]);
    assert_eq!(posiform_terms(&g2), want);
    assert_eq!(posiform_max(&g2), -55);
    // Every maximizer of g' has x4 = 1.
    let phi = g_prime();
    for x in all_bits(4) {
        if phi.evaluate(&Assignment::new(x.clone())).unwrap() == -55 {
            assert!(x[3]);
        }
    }
}

#[test]
fn twins_merge_into_g3() {
    let (g2, _) = fix_isolated_vertices(&g_prime()).unwrap();
    let (g3, log) = merge_twin_vertices(&g2).unwrap();
    assert_eq!(log.len(), 2);
    let want = code_terms(&[(&[1], 17), (&[-1, 2], 25), (&[1, 3], 8), (&[-3], 30)]);
    assert_eq!(posiform_terms(&g3), want);
    assert_eq!(posiform_max(&g3), posiform_max(&g2));
    assert_eq!(g3.live_vars().len(), 3);
}

#[test]
fn fixpoint_reaches_g3() {
    let (g3, log) = reduce_fixpoint(&g_prime()).unwrap();
    let want = code_terms(&[(&[1], 17), (&[-1, 2], 25), (&[1, 3], 8), (&[-3], 30)]);
    assert_eq!(posiform_terms(&g3), want);
    let (again, more) = reduce_fixpoint(&g3).unwrap();
    assert_eq!(again, g3);
    assert!(more.is_empty());
    // Lifting a maximizer of g3 recovers the minimizer of g.
    let best = all_bits(g3.n())
        .map(Assignment::new)
        .max_by_key(|a| g3.evaluate(a).unwrap())
        .unwrap();
    let x = log.lift(&best);
    assert_eq!(g().evaluate(&x).unwrap(), 55);
}

#[test]
fn g3_graph_is_a_path() {
    let (g3, _) = reduce_fixpoint(&g_prime()).unwrap();
    let graph = build_conflict_graph(&g3);
    let a = index_of(&g3, &[1]);
    let b = index_of(&g3, &[-1, 2]);
    let c = index_of(&g3, &[1, 3]);
    let d = index_of(&g3, &[-3]);
    assert_eq!(graph.n_edges(), 3);
    assert!(graph.adjacent(a, b) && graph.adjacent(b, c) && graph.adjacent(c, d));
    let (alpha, set) = mwis_bruteforce(&graph).unwrap();
    assert_eq!(alpha, 55);
    let mut want = vec![b, d];
    want.sort();
    assert_eq!(set, want);
}

#[test]
fn path_realizes_with_two_variables() {
    let graph = ConflictGraph::new(vec![17, 25, 8, 30], [(0, 1), (1, 2), (2, 3)]).unwrap();
    let (g4, sets) = realize_graph(&graph).unwrap();
    assert_eq!(g4.live_vars().len(), 2);
    assert_eq!(build_conflict_graph(&g4).n_edges(), 3);
    for (k, s) in sets.iter().enumerate() {
        assert_eq!(g4.weight(s), graph.weight(k));
    }
    assert_eq!(posiform_max(&g4) - g4.constant(), 55);

    // The printed realization itself.
    let printed = Posiform::from_codes(2, 0, &[(&[1], 17), (&[-1, 2], 25), (&[-2], 8), (&[2], 30)]).unwrap();
    assert_eq!(printed.evaluate(&Assignment::new(vec![false, true])).unwrap(), 55);
    assert_eq!(posiform_max(&printed), 55);
    let best: Vec<Vec<bool>> = all_bits(2)
        .filter(|x| printed.evaluate(&Assignment::new(x.clone())).unwrap() == 55)
        .collect();
    assert_eq!(best, vec![vec![false, true]]);
}

#[test]
fn qubo_of_g() {
    let q = poly_to_qubo(&g()).unwrap();
    assert_eq!(q.diagonal(), &[58, 50, 12, -80]);
    let off: Vec<((usize, usize), i64)> = q.offdiag().iter().map(|(k, v)| (*k, *v)).collect();
    assert_eq!(
        off,
        vec![
            ((1, 2), 25),
            ((1, 3), -6),
            ((1, 4), -64),
            ((2, 3), 2),
            ((2, 4), -64),
            ((3, 4), 16)
        ]
    );
    assert_eq!(q.offset(), 149);

    let exact = solve_exact(&q, 26).unwrap();
    assert_eq!(exact.energy, 55);
    assert_eq!(exact.assignment.bits(), &[false, true, false, true]);
    let sched = AnnealSchedule {
        sweeps: 1000,
        restarts: 4,
        ..AnnealSchedule::default_for(&q, 1)
    };
    assert_eq!(solve_sa(&q, &sched).unwrap().energy, 55);
    let sched = AnnealSchedule::geometric(100.0, 0.1, 1000, 4, 1);
    assert_eq!(solve_sa(&q, &sched).unwrap().energy, 55);

    let m = qubo_to_ising(&q).unwrap();
    assert_eq!(ising_to_qubo(&m).unwrap(), q);
    for x in all_bits(4) {
        let a = Assignment::new(x.clone());
        assert_eq!(
            m.energy_of_bits(&a).unwrap(),
            Quarter::from_int(eval(&g(), &x)).unwrap()
        );
    }
}
