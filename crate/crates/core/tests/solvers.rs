mod common;

use common::*;
use posiqubo::qubo::{qubo_stats, solve_exact, solve_sa, AnnealSchedule, QuboModel, SolverKind, EXACT_CAP};
use posiqubo::Assignment;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn annealing_tracks_the_exact_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut equal = 0;
    for _ in 0..50 {
        let q = random_qubo(&mut rng, 16, 20);
        let exact = solve_exact(&q, EXACT_CAP).unwrap();
        let sa = solve_sa(&q, &AnnealSchedule::default_for(&q, 3)).unwrap();
        assert!(sa.energy >= exact.energy);
        assert_eq!(sa.energy, qubo_energy(&q, sa.assignment.bits()));
        assert_eq!(exact.energy, qubo_energy(&q, exact.assignment.bits()));
        if sa.energy == exact.energy {
            equal += 1;
        }
    }
    assert!(equal >= 45, "{equal} of 50");
}

#[test]
fn annealing_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let q = random_qubo(&mut rng, 30, 20);
    let s = AnnealSchedule::geometric(20.0, 0.1, 300, 24, 99);
    let a = solve_sa(&q, &s).unwrap();
    let b = solve_sa(&q, &s).unwrap();
    assert_eq!(a.energy, b.energy);
    assert_eq!(a.assignment, b.assignment);
    assert_eq!(a.solver, SolverKind::Annealer);
}

#[test]
fn degenerate_models() {
    let empty = QuboModel::zero(0);
    assert_eq!(
        solve_sa(&empty, &AnnealSchedule::default_for(&empty, 0))
            .unwrap()
            .energy,
        0
    );
    assert_eq!(solve_exact(&empty, EXACT_CAP).unwrap().energy, 0);
    let flat = QuboModel::new(3, vec![0, 0, 0], [], 5).unwrap();
    let r = solve_exact(&flat, EXACT_CAP).unwrap();
    assert_eq!((r.energy, r.assignment), (5, Assignment::zeros(3)));
    let s = qubo_stats(&empty);
    assert_eq!((s.live, s.min_coeff, s.max_coeff), (0, 0, 0));
    assert!(solve_exact(&QuboModel::zero(EXACT_CAP + 1), EXACT_CAP).is_err());
}
