//! Integer factoring as QUBO: multiplication-table block equations with
//! carries, compiled by pairwise substitution into a quadratic model.

use serde::{Deserialize, Serialize};

use crate::error::{checked, Error, Result};
use crate::graph::{reduce_fixpoint, GraphReductionLog};
use crate::pbf::{negate_to_posiform, Assignment, Monomial, Polynomial, VariableId};
use crate::quadratize::{reduce_alg3, EquationSystem, ReductionTrace};
use crate::qubo::{poly_to_qubo, qubo_stats, solve_exact, solve_sa, AnnealSchedule, QuboModel, SolveResult, EXACT_CAP};

/// `N = p·q` with `p` of `n` bits and `q` of `m` bits. Both factors are odd
/// with their top bit set, so `p = 1 + Σ_{i=1}^{n−2} 2^i p_i + 2^{n−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorInstance {
    pub number: u64,
    pub n: usize,
    pub m: usize,
}

impl FactorInstance {
    pub fn new(number: u64, n: usize, m: usize) -> Result<Self> {
        if number < 9 || number.is_multiple_of(2) {
            return Err(Error::arg(format!("N = {number} must be odd and at least 9")));
        }
        if n < 2 || m < 2 || n + m > 62 {
            return Err(Error::arg(format!("bit lengths ({n}, {m}) out of range")));
        }
        Ok(FactorInstance { number, n, m })
    }

    pub fn free_p_bits(&self) -> usize {
        self.n - 2
    }

    pub fn free_q_bits(&self) -> usize {
        self.m - 2
    }

    /// Variable id of free bit `p_i`, `1 ≤ i ≤ n−2`.
    pub fn p_var(&self, i: usize) -> VariableId {
        VariableId::from_index(i)
    }

    pub fn q_var(&self, k: usize) -> VariableId {
        VariableId::from_index(self.free_p_bits() + k)
    }

    /// Decodes `(p, q)` from an assignment whose first variables are the
    /// free factor bits.
    pub fn decode(&self, a: &Assignment) -> (u64, u64) {
        let mut p = 1u64 | 1 << (self.n - 1);
        for i in 1..=self.free_p_bits() {
            if a.get(self.p_var(i)) {
                p |= 1 << i;
            }
        }
        let mut q = 1u64 | 1 << (self.m - 1);
        for k in 1..=self.free_q_bits() {
            if a.get(self.q_var(k)) {
                q |= 1 << k;
            }
        }
        (p, q)
    }

    /// Free-bit values of `p` and `q`, or `None` if they do not have the
    /// declared bit lengths.
    fn bits_of(&self, p: u64, q: u64) -> Option<Vec<bool>> {
        let fits = |x: u64, len: usize| x & 1 == 1 && x >> (len - 1) == 1;
        if !fits(p, self.n) || !fits(q, self.m) {
            return None;
        }
        let mut bits: Vec<bool> = (1..=self.free_p_bits()).map(|i| p >> i & 1 == 1).collect();
        bits.extend((1..=self.free_q_bits()).map(|k| q >> k & 1 == 1));
        Some(bits)
    }
}

/// One bit of the factor `p` at position `i`: a constant 1 or a variable.
fn factor_bit(i: usize, len: usize, var: impl Fn(usize) -> VariableId) -> Option<VariableId> {
    if i == 0 || i == len - 1 {
        None
    } else {
        Some(var(i))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Carry {
    pub var: VariableId,
    /// Column the carry bit lands in.
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub first_column: usize,
    /// Last table column in this block; the final block also absorbs every
    /// higher bit of `N`.
    pub last_column: usize,
    pub incoming: Vec<Carry>,
    pub outgoing: Vec<Carry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockEquationSet {
    pub instance: FactorInstance,
    pub width: usize,
    pub system: EquationSystem,
    pub blocks: Vec<Block>,
    pub names: Vec<String>,
}

impl BlockEquationSet {
    pub fn n_carries(&self) -> usize {
        self.blocks.iter().map(|b| b.outgoing.len()).sum()
    }

    /// Name of variable `v`, such as `p3`, `q1` or `c2`.
    pub fn name(&self, v: VariableId) -> &str {
        &self.names[v.slot()]
    }

    /// Block equation `b` with named variables.
    pub fn render(&self, b: usize) -> String {
        self.system.polys()[b].render(|v| self.name(v).to_string())
    }

    /// The true assignment for factors `(p, q)`: bits plus the carries of
    /// schoolbook addition. `None` if `p·q ≠ N` or a carry overflows its
    /// budget.
    pub fn witness(&self, p: u64, q: u64) -> Option<Assignment> {
        let inst = &self.instance;
        if p.checked_mul(q) != Some(inst.number) {
            return None;
        }
        let mut bits = inst.bits_of(p, q)?;
        bits.resize(self.system.n(), false);
        let mut a = Assignment::new(bits);
        for (b, block) in self.blocks.iter().enumerate() {
            let f = &self.system.polys()[b];
            // The residual is linear in this block's outgoing carries; solve for them.
            let mut without = a.clone();
            for c in &block.outgoing {
                without.set(c.var, false);
            }
            let r = f.evaluate(&without).ok()?;
            let unit = 1i64 << self.width;
            if r < 0 || r % unit != 0 {
                return None;
            }
            let value = r / unit;
            if value >> block.outgoing.len() != 0 {
                return None;
            }
            for (t, c) in block.outgoing.iter().enumerate() {
                a.set(c.var, value >> t & 1 == 1);
            }
        }
        self.system.is_satisfied(&a).ok()?.then_some(a)
    }
}

/// Groups the multiplication table's columns `1..=n+m−2` into blocks of
/// `width` columns and writes one equation per block:
///
/// `Σ_{j} 2^{j−a} (column_j + carries into j) − (N's bits in the block) − Σ_t 2^{w+t} c_t = 0`
///
/// where `a` is the block's first column. Each block gets the fewest
/// outgoing carries that can hold its largest possible overflow; the
/// final block has none and subtracts `N >> a`.
pub fn build_block_equations(inst: &FactorInstance, width: usize) -> Result<BlockEquationSet> {
    if width < 1 {
        return Err(Error::arg("block width must be at least 1"));
    }
    if width > 30 {
        return Err(Error::arg("block width above 30 is not supported"));
    }
    let (n, m) = (inst.n, inst.m);
    let last_col = n + m - 2;
    let mut names: Vec<String> = (1..=inst.free_p_bits()).map(|i| format!("p{i}")).collect();
    names.extend((1..=inst.free_q_bits()).map(|k| format!("q{k}")));
    let mut next_var = names.len();

    // Column j as a list of (monomial) terms, each of value 0 or 1.
    let column = |j: usize| -> Vec<Monomial> {
        let mut terms = Vec::new();
        for i in 0..n {
            if j < i || j - i >= m {
                continue;
            }
            let k = j - i;
            let pv = factor_bit(i, n, |i| inst.p_var(i));
            let qv = factor_bit(k, m, |k| inst.q_var(k));
            terms.push(Monomial::new(pv.into_iter().chain(qv)));
        }
        terms
    };

    let mut starts = Vec::new();
    let mut a = 1;
    while a <= last_col {
        starts.push(a);
        a += width;
    }

    let mut blocks: Vec<Block> = starts
        .iter()
        .map(|&a| Block {
            first_column: a,
            last_column: (a + width - 1).min(last_col),
            incoming: Vec::new(),
            outgoing: Vec::new(),
        })
        .collect();
    let n_blocks = blocks.len();
    let block_of = |col: usize| -> usize { ((col - 1) / width).min(n_blocks - 1) };

    let mut raw: Vec<Vec<(Monomial, i64)>> = Vec::with_capacity(n_blocks);
    for b in 0..n_blocks {
        let a = blocks[b].first_column;
        let is_last = b + 1 == n_blocks;
        let mut terms: Vec<(Monomial, i64)> = Vec::new();
        let mut max_value: i64 = 0;
        for j in a..=blocks[b].last_column {
            let w = 1i64 << (j - a);
            for t in column(j) {
                terms.push((t, w));
                max_value = checked::add(max_value, w, "block bound")?;
            }
        }
        for c in &blocks[b].incoming {
            let w = 1i64
                .checked_shl((c.column - a) as u32)
                .filter(|w| *w > 0)
                .ok_or(Error::Overflow("carry weight"))?;
            terms.push((Monomial::new([c.var]), w));
            max_value = checked::add(max_value, w, "block bound")?;
        }
        let target = if is_last {
            (inst.number >> a) as i64
        } else {
            ((inst.number >> a) & ((1u64 << width) - 1)) as i64
        };
        terms.push((Monomial::one(), -target));
        if !is_last {
            let excess = (max_value - target).max(0) >> width;
            let mut t = 0;
            while (1i64 << t) - 1 < excess {
                t += 1;
            }
            for s in 0..t {
                next_var += 1;
                names.push(format!("c{}", next_var - inst.free_p_bits() - inst.free_q_bits()));
                let carry = Carry {
                    var: VariableId::from_index(next_var),
                    column: a + width + s,
                };
                terms.push((Monomial::new([carry.var]), -(1i64 << (width + s))));
                blocks[b].outgoing.push(carry.clone());
                let dest = block_of(carry.column).max(b + 1);
                blocks[dest].incoming.push(carry);
            }
        }
        raw.push(terms);
    }

    let total = next_var;
    let polys = raw
        .into_iter()
        .map(|terms| Polynomial::from_terms(total, terms))
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockEquationSet {
        instance: *inst,
        width,
        system: EquationSystem::new(total, polys)?,
        blocks,
        names,
    })
}

/// `(N − p·q)²` over the free factor bits; quartic, and only a baseline for
/// coefficient ranges.
pub fn direct_square_method(inst: &FactorInstance) -> Result<Polynomial> {
    let nv = inst.free_p_bits() + inst.free_q_bits();
    let factor = |len: usize, var: &dyn Fn(usize) -> VariableId| -> Result<Polynomial> {
        let mut terms = vec![(Monomial::one(), 1 + (1i64 << (len - 1)))];
        for i in 1..len - 1 {
            terms.push((Monomial::new([var(i)]), 1i64 << i));
        }
        Polynomial::from_terms(nv, terms)
    };
    let p = factor(inst.n, &|i| inst.p_var(i))?;
    let q = factor(inst.m, &|k| inst.q_var(k))?;
    let n_val = i64::try_from(inst.number).map_err(|_| Error::Overflow("N"))?;
    let r = Polynomial::constant(nv, n_val).sub(&p.mul(&q)?)?;
    r.square()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    /// Exact when the model fits the cap, annealing otherwise.
    #[default]
    Auto,
    Exact,
    Sa,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorConfig {
    /// `(n, m)`; searched when absent.
    pub bits: Option<(usize, usize)>,
    pub block_width: usize,
    pub graph_opt: bool,
    pub solver: SolverChoice,
    pub cap: usize,
    pub seed: u64,
    /// Annealing overrides; `None` keeps the factoring schedule.
    pub sweeps: Option<usize>,
    pub restarts: Option<usize>,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            bits: None,
            block_width: 4,
            graph_opt: true,
            solver: SolverChoice::Auto,
            cap: EXACT_CAP,
            seed: 0,
            sweeps: None,
            restarts: None,
        }
    }
}

/// Annealing schedule used for factoring models: energy 0 is known to be
/// optimal, so runs stop there, and many short restarts beat a few long ones.
pub fn factor_schedule(q: &QuboModel, config: &FactorConfig) -> AnnealSchedule {
    let t0 = (q.max_abs_entry() as f64).max(1.0);
    let sweeps = config.sweeps.unwrap_or(FACTOR_SWEEPS);
    let mut s = AnnealSchedule::geometric(
        t0,
        FACTOR_T_END,
        sweeps,
        config.restarts.unwrap_or(FACTOR_RESTARTS),
        config.seed,
    );
    s.target = Some(0);
    s
}

pub const FACTOR_SWEEPS: usize = 2000;
pub const FACTOR_RESTARTS: usize = 16384;
pub const FACTOR_T_END: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorReport {
    pub number: u64,
    pub bits: (usize, usize),
    pub n_equations: usize,
    pub n_carries: usize,
    /// Variables after substitution, before graph reduction.
    pub n_vars_pre: usize,
    /// Live variables of the model handed to the solver.
    pub n_vars_post: usize,
    /// Coefficient range of the model before graph reduction.
    pub coeff_min: i64,
    pub coeff_max: i64,
    pub coeff_min_post: i64,
    pub coeff_max_post: i64,
    pub energy: i64,
    pub p: Option<u64>,
    pub q: Option<u64>,
    pub solver: String,
    pub consistent: bool,
    pub config: FactorConfig,
}

impl FactorReport {
    pub fn factored(&self) -> bool {
        self.p.is_some()
    }
}

/// Everything one `(n, m)` run produced.
#[derive(Debug, Clone)]
pub struct FactorRun {
    pub equations: BlockEquationSet,
    /// Model before graph reduction, over all variables.
    pub full_qubo: QuboModel,
    /// Model handed to the solver, restricted to its live variables.
    pub qubo: QuboModel,
    /// Original index of each variable of `qubo`.
    pub live: Vec<VariableId>,
    pub trace: ReductionTrace,
    pub log: GraphReductionLog,
    pub solve: SolveResult,
    pub report: FactorReport,
}

/// Candidate `(n, m)` with `n ≥ m ≥ 2` and `n + m ∈ {L, L + 1}`, most
/// balanced first.
pub fn bit_length_candidates(number: u64) -> Vec<(usize, usize)> {
    let l = 64 - number.leading_zeros() as usize;
    let mut c = Vec::new();
    for total in [l, l + 1] {
        for m in 2..=total / 2 {
            c.push((total - m, m));
        }
    }
    c.sort_by_key(|(n, m)| (n - m, n + m));
    c
}

/// Compiles, reduces, solves and decodes one `(n, m)` candidate.
pub fn factor_once(inst: &FactorInstance, config: &FactorConfig) -> Result<FactorRun> {
    let equations = build_block_equations(inst, config.block_width)?;
    let (g, trace) = reduce_alg3(&equations.system)?;
    let full_qubo = poly_to_qubo(&g)?;
    let pre = qubo_stats(&full_qubo);

    let (reduced_poly, log) = if config.graph_opt {
        let phi = negate_to_posiform(&g)?;
        let (phi, log) = reduce_fixpoint(&phi)?;
        (phi.to_polynomial()?.scale(-1)?, log)
    } else {
        (g.clone(), GraphReductionLog::default())
    };
    let reduced = poly_to_qubo(&reduced_poly)?;
    let post = qubo_stats(&reduced);
    let (qubo, live) = reduced.compact();

    let use_exact = match config.solver {
        SolverChoice::Exact => true,
        SolverChoice::Sa => false,
        SolverChoice::Auto => qubo.n() <= config.cap,
    };
    let solve = if use_exact {
        solve_exact(&qubo, config.cap)?
    } else {
        solve_sa(&qubo, &factor_schedule(&qubo, config))?
    };

    let mut full = Assignment::zeros(trace.total_n());
    for (k, v) in live.iter().enumerate() {
        full.set(*v, solve.assignment.bits()[k]);
    }
    let full = log.lift(&full);
    let (orig, consistent) = trace.lift(&full)?;
    let (p, q) = inst.decode(&orig);
    let ok = solve.energy == 0 && p.checked_mul(q) == Some(inst.number);

    let report = FactorReport {
        number: inst.number,
        bits: (inst.n, inst.m),
        n_equations: equations.system.len(),
        n_carries: equations.n_carries(),
        n_vars_pre: pre.live,
        n_vars_post: post.live,
        coeff_min: pre.min_coeff,
        coeff_max: pre.max_coeff,
        coeff_min_post: post.min_coeff,
        coeff_max_post: post.max_coeff,
        energy: solve.energy,
        p: ok.then_some(p.max(q)),
        q: ok.then_some(p.min(q)),
        solver: solve.solver.as_str().to_string(),
        consistent,
        config: FactorConfig {
            bits: Some((inst.n, inst.m)),
            ..config.clone()
        },
    };
    Ok(FactorRun {
        equations,
        full_qubo,
        qubo,
        live,
        trace,
        log,
        solve,
        report,
    })
}

/// Runs candidates until one yields factors. The returned run is the
/// successful one, or the last one tried.
pub fn factor_pipeline(number: u64, config: &FactorConfig) -> Result<FactorRun> {
    if number < 9 || number.is_multiple_of(2) {
        return Err(Error::arg(format!("N = {number} must be odd and at least 9")));
    }
    let candidates = match config.bits {
        Some(b) => vec![b],
        None => bit_length_candidates(number),
    };
    let mut last = None;
    for (n, m) in candidates {
        let run = factor_once(&FactorInstance::new(number, n, m)?, config)?;
        if run.report.factored() {
            return Ok(run);
        }
        last = Some(run);
    }
    last.ok_or_else(|| Error::arg(format!("no bit-length candidates for {number}")))
}
