use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::QuboModel;
use crate::error::{Error, Result};
use crate::pbf::Assignment;

/// Default variable cap for [`solve_exact`].
pub const EXACT_CAP: usize = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Exact,
    Annealer,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::Annealer => "sa",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub energy: i64,
    pub assignment: Assignment,
    pub solver: SolverKind,
    /// Assignments visited (exact) or sweeps performed (annealer).
    pub work: u64,
}

/// Sparse symmetric view: `neighbors[i]` lists `(j, Q_ij)`, 0-based.
struct Sparse {
    diag: Vec<i64>,
    neighbors: Vec<Vec<(usize, i64)>>,
}

impl Sparse {
    fn new(q: &QuboModel) -> Self {
        let mut neighbors = vec![Vec::new(); q.n()];
        for ((i, j), v) in q.offdiag() {
            neighbors[i - 1].push((j - 1, *v));
            neighbors[j - 1].push((i - 1, *v));
        }
        Sparse {
            diag: q.diagonal().to_vec(),
            neighbors,
        }
    }
}

/// Exhaustive minimisation in Gray-code order with incremental energy.
///
/// Ties go to the lexicographically smallest assignment read as
/// `(x_1, x_2, ...)`.
pub fn solve_exact(q: &QuboModel, cap: usize) -> Result<SolveResult> {
    let n = q.n();
    if n > cap || n > 62 {
        return Err(Error::Cap {
            what: "exact solver variables",
            size: n,
            cap: cap.min(62),
        });
    }
    // Bounds every partial sum, so the loop below cannot overflow.
    q.magnitude()?;
    let sp = Sparse::new(q);
    // Split over the high-index variables; each block enumerates the rest.
    let split = if n > 16 { (n - 16).min(8) } else { 0 };
    let low = n - split;
    let blocks: Vec<u64> = (0..1u64 << split).collect();
    let run = |hi: &u64| enumerate_block(&sp, q.offset(), n, low, *hi);
    #[cfg(feature = "parallel")]
    let results: Vec<(i64, u64)> = {
        use rayon::prelude::*;
        blocks.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(i64, u64)> = blocks.iter().map(run).collect();
    let (energy, code) = results
        .into_iter()
        .min_by_key(|(e, code)| (*e, lex_key(*code, n)))
        .expect("at least one block");
    let assignment = Assignment::from_code(n, code);
    Ok(SolveResult {
        energy,
        assignment,
        solver: SolverKind::Exact,
        work: 1u64 << n,
    })
}

/// Rank of `code` (bit i = x_{i+1}) in the lexicographic order of bit strings.
fn lex_key(code: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        code.reverse_bits() >> (64 - n)
    }
}

/// Minimum over all assignments whose bits `low..n` equal `hi`.
fn enumerate_block(sp: &Sparse, offset: i64, n: usize, low: usize, hi: u64) -> (i64, u64) {
    let mut x = vec![false; n];
    let mut code = hi << low;
    for (k, b) in x.iter_mut().enumerate() {
        *b = code >> k & 1 == 1;
    }
    // field[i] = Q_ii + Σ_j Q_ij x_j
    let mut field: Vec<i64> = sp.diag.clone();
    let mut energy = offset;
    for i in 0..n {
        if x[i] {
            for &(j, v) in &sp.neighbors[i] {
                field[j] += v;
            }
        }
    }
    for i in 0..n {
        if x[i] {
            energy += sp.diag[i];
            for &(j, v) in &sp.neighbors[i] {
                if j > i && x[j] {
                    energy += v;
                }
            }
        }
    }
    let mut best = (energy, code);
    let mut best_key = lex_key(code, n);
    for step in 1u64..(1u64 << low) {
        let i = step.trailing_zeros() as usize;
        let delta = if x[i] { -field[i] } else { field[i] };
        energy += delta;
        let dv = if x[i] { -1 } else { 1 };
        x[i] = !x[i];
        code ^= 1 << i;
        for &(j, v) in &sp.neighbors[i] {
            field[j] += dv * v;
        }
        if energy <= best.0 {
            let key = lex_key(code, n);
            if energy < best.0 || key < best_key {
                best = (energy, code);
                best_key = key;
            }
        }
    }
    best
}

/// Geometric single-flip annealing parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealSchedule {
    pub initial_temperature: f64,
    pub cooling: f64,
    pub sweeps: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Stop as soon as this energy is reached. Restarts after the first one
    /// that reaches it are not counted, so results do not depend on threading.
    pub target: Option<i64>,
}

impl AnnealSchedule {
    /// `T0 = max|Q_ij|`, cooling 0.97, 5000 sweeps, 8 restarts.
    pub fn default_for(q: &QuboModel, seed: u64) -> Self {
        AnnealSchedule {
            initial_temperature: (q.max_abs_entry() as f64).max(1.0),
            cooling: 0.97,
            sweeps: 5000,
            restarts: 8,
            seed,
            target: None,
        }
    }

    /// Cooling chosen so the temperature falls from `t0` to `t_end` over `sweeps`.
    pub fn geometric(t0: f64, t_end: f64, sweeps: usize, restarts: usize, seed: u64) -> Self {
        AnnealSchedule {
            initial_temperature: t0,
            cooling: (t_end / t0).powf(1.0 / sweeps.max(1) as f64),
            sweeps,
            restarts,
            seed,
            target: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.initial_temperature.is_finite()
            && self.initial_temperature > 0.0
            && self.cooling > 0.0
            && self.cooling < 1.0
            && self.sweeps > 0
            && self.restarts > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::arg(format!("invalid anneal schedule {self:?}")))
        }
    }
}

/// Best of `restarts` independent annealing runs; run `r` is seeded with
/// `seed + r`. Ties go to the lowest restart index.
pub fn solve_sa(q: &QuboModel, sched: &AnnealSchedule) -> Result<SolveResult> {
    sched.validate()?;
    q.magnitude()?;
    let sp = Sparse::new(q);
    let batch = if cfg!(feature = "parallel") { 16 } else { 1 };
    let mut best: Option<(i64, Vec<bool>)> = None;
    let mut sweeps_done = 0u64;
    let mut r = 0usize;
    while r < sched.restarts {
        let ids: Vec<usize> = (r..(r + batch).min(sched.restarts)).collect();
        let run = |id: &usize| anneal_once(&sp, q.offset(), sched, sched.seed.wrapping_add(*id as u64));
        #[cfg(feature = "parallel")]
        let outs: Vec<(i64, Vec<bool>, u64)> = {
            use rayon::prelude::*;
            ids.par_iter().map(run).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let outs: Vec<(i64, Vec<bool>, u64)> = ids.iter().map(run).collect();
        let mut hit = false;
        for (e, x, sweeps) in outs {
            sweeps_done += sweeps;
            if best.as_ref().is_none_or(|(b, _)| e < *b) {
                best = Some((e, x));
            }
            if sched.target.is_some_and(|t| e <= t) {
                hit = true;
                break;
            }
        }
        if hit {
            break;
        }
        r += batch;
    }
    let (energy, bits) = best.expect("at least one restart");
    let assignment = Assignment::new(bits);
    debug_assert_eq!(q.energy(&assignment).ok(), Some(energy));
    Ok(SolveResult {
        energy,
        assignment,
        solver: SolverKind::Annealer,
        work: sweeps_done,
    })
}

fn anneal_once(sp: &Sparse, offset: i64, sched: &AnnealSchedule, seed: u64) -> (i64, Vec<bool>, u64) {
    let n = sp.diag.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
    let mut field = sp.diag.clone();
    let mut energy = offset;
    for i in 0..n {
        if x[i] {
            energy += sp.diag[i];
            for &(j, v) in &sp.neighbors[i] {
                field[j] += v;
                if j > i && x[j] {
                    energy += v;
                }
            }
        }
    }
    let mut best = (energy, x.clone());
    if n == 0 || sched.target.is_some_and(|t| energy <= t) {
        return (best.0, best.1, 0);
    }
    let mut t = sched.initial_temperature;
    for sweep in 0..sched.sweeps {
        for i in 0..n {
            let delta = if x[i] { -field[i] } else { field[i] };
            let accept = delta <= 0 || rng.random::<f64>() < (-(delta as f64) / t).exp();
            if !accept {
                continue;
            }
            let dv = if x[i] { -1 } else { 1 };
            x[i] = !x[i];
            energy += delta;
            for &(j, v) in &sp.neighbors[i] {
                field[j] += dv * v;
            }
            if energy < best.0 {
                best.0 = energy;
                best.1.copy_from_slice(&x);
                if sched.target.is_some_and(|t| energy <= t) {
                    return (best.0, best.1, sweep as u64 + 1);
                }
            }
        }
        t *= sched.cooling;
    }
    (best.0, best.1, sched.sweeps as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pbf::all_assignments;

    fn naive(q: &QuboModel) -> (i64, Assignment) {
        let mut best: Option<(i64, Assignment)> = None;
        for a in all_assignments(q.n()) {
            let e = q.energy(&a).unwrap();
            let better = match &best {
                None => true,
                Some((b, ba)) => e < *b || (e == *b && a.bits() < ba.bits()),
            };
            if better {
                best = Some((e, a));
            }
        }
        best.unwrap()
    }

    #[test]
    fn zero_model_picks_all_zeros() {
        let q = QuboModel::zero(3);
        let r = solve_exact(&q, EXACT_CAP).unwrap();
        assert_eq!((r.energy, r.assignment), (0, Assignment::zeros(3)));
    }

    #[test]
    fn exact_matches_naive_with_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [0usize, 1, 5, 18] {
            let diag = (0..n).map(|_| rng.random_range(-3..=3)).collect();
            let mut off = Vec::new();
            for i in 1..=n {
                for j in i + 1..=n {
                    if rng.random_bool(0.4) {
                        off.push(((i, j), rng.random_range(-3..=3)));
                    }
                }
            }
            let q = QuboModel::new(n, diag, off, 1).unwrap();
            let r = solve_exact(&q, EXACT_CAP).unwrap();
            let (e, a) = naive(&q);
            assert_eq!((r.energy, &r.assignment), (e, &a), "n = {n}");
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(solve_exact(&QuboModel::zero(5), 4), Err(Error::Cap { .. })));
    }

    #[test]
    fn sa_is_deterministic_and_sound() {
        let q = QuboModel::new(4, vec![2, -3, 1, -1], [((1, 2), 4), ((2, 3), -2), ((3, 4), 3)], 0).unwrap();
        let s = AnnealSchedule::default_for(&q, 1);
        let a = solve_sa(&q, &s).unwrap();
        let b = solve_sa(&q, &s).unwrap();
        assert_eq!(a, b);
        assert_eq!(q.energy(&a.assignment).unwrap(), a.energy);
        assert_eq!(a.energy, naive(&q).0);
    }

    #[test]
    fn sa_on_empty_model() {
        let q = QuboModel::new(0, vec![], [], 7).unwrap();
        let r = solve_sa(&q, &AnnealSchedule::default_for(&q, 0)).unwrap();
        assert_eq!(r.energy, 7);
    }

    #[test]
    fn bad_schedule_is_rejected() {
        let q = QuboModel::zero(1);
        let mut s = AnnealSchedule::default_for(&q, 0);
        s.cooling = 1.5;
        assert!(solve_sa(&q, &s).is_err());
    }
}
