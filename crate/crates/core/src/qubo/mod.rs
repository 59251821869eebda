//! Upper-triangular QUBO models, their Ising counterparts, and solvers.

mod ising;
mod solve;
mod text;

pub use ising::{ising_to_qubo, qubo_to_ising, IsingModel, Quarter};
pub use solve::{solve_exact, solve_sa, AnnealSchedule, SolveResult, SolverKind, EXACT_CAP};

use std::collections::BTreeMap;

use crate::error::{checked, Error, Result};
use crate::pbf::{Assignment, Monomial, Polynomial, VariableId};

/// `offset + Σ_i Q_ii x_i + Σ_{i<j} Q_ij x_i x_j` over `x ∈ {0,1}^n`.
/// Indices are 1-based; stored off-diagonal values are nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QuboModel {
    n: usize,
    diagonal: Vec<i64>,
    offdiag: BTreeMap<(usize, usize), i64>,
    offset: i64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuboStats {
    pub n: usize,
    pub live: usize,
    pub min_coeff: i64,
    pub max_coeff: i64,
    pub density: f64,
}

impl QuboModel {
    pub fn zero(n: usize) -> Self {
        QuboModel {
            n,
            diagonal: vec![0; n],
            offdiag: BTreeMap::new(),
            offset: 0,
        }
    }

    pub fn new(
        n: usize,
        diagonal: Vec<i64>,
        offdiag: impl IntoIterator<Item = ((usize, usize), i64)>,
        offset: i64,
    ) -> Result<Self> {
        if diagonal.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: diagonal.len(),
            });
        }
        let mut q = QuboModel {
            n,
            diagonal,
            offdiag: BTreeMap::new(),
            offset,
        };
        for ((i, j), v) in offdiag {
            q.add_pair(i, j, v)?;
        }
        Ok(q)
    }

    fn add_pair(&mut self, i: usize, j: usize, v: i64) -> Result<()> {
        if !(1 <= i && i < j && j <= self.n) {
            return Err(Error::arg(format!(
                "off-diagonal key ({i}, {j}) invalid for n = {}",
                self.n
            )));
        }
        if v == 0 {
            return Ok(());
        }
        let e = self.offdiag.entry((i, j)).or_insert(0);
        *e = checked::add(*e, v, "qubo entry")?;
        if *e == 0 {
            self.offdiag.remove(&(i, j));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `Q_ii` for 1-based `i`.
    pub fn diag(&self, i: usize) -> i64 {
        self.diagonal[i - 1]
    }

    pub fn diagonal(&self) -> &[i64] {
        &self.diagonal
    }

    pub fn offdiag(&self) -> &BTreeMap<(usize, usize), i64> {
        &self.offdiag
    }

    pub fn pair(&self, i: usize, j: usize) -> i64 {
        self.offdiag.get(&(i.min(j), i.max(j))).copied().unwrap_or(0)
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn energy(&self, a: &Assignment) -> Result<i64> {
        a.check_len(self.n)?;
        let b = a.bits();
        let mut e = self.offset;
        for (i, q) in self.diagonal.iter().enumerate() {
            if b[i] {
                e = checked::add(e, *q, "qubo energy")?;
            }
        }
        for ((i, j), q) in &self.offdiag {
            if b[i - 1] && b[j - 1] {
                e = checked::add(e, *q, "qubo energy")?;
            }
        }
        Ok(e)
    }

    /// Inverse of [`poly_to_qubo`].
    pub fn to_polynomial(&self) -> Result<Polynomial> {
        let mut terms = vec![(Monomial::one(), self.offset)];
        for (i, q) in self.diagonal.iter().enumerate() {
            terms.push((Monomial::new([VariableId::from_index(i + 1)]), *q));
        }
        for ((i, j), q) in &self.offdiag {
            terms.push((
                Monomial::new([VariableId::from_index(*i), VariableId::from_index(*j)]),
                *q,
            ));
        }
        Polynomial::from_terms(self.n, terms)
    }

    /// Variables with a nonzero diagonal or off-diagonal entry, ascending.
    pub fn live_vars(&self) -> Vec<VariableId> {
        let mut live = vec![false; self.n];
        for (i, q) in self.diagonal.iter().enumerate() {
            live[i] |= *q != 0;
        }
        for (i, j) in self.offdiag.keys() {
            live[i - 1] = true;
            live[j - 1] = true;
        }
        (0..self.n)
            .filter(|i| live[*i])
            .map(|i| VariableId::from_index(i + 1))
            .collect()
    }

    /// The model restricted to its live variables, renumbered `1..`, with
    /// the map from new index (position) to original variable.
    pub fn compact(&self) -> (QuboModel, Vec<VariableId>) {
        let live = self.live_vars();
        let mut pos = vec![0usize; self.n + 1];
        for (k, v) in live.iter().enumerate() {
            pos[v.index()] = k + 1;
        }
        let diagonal = live.iter().map(|v| self.diag(v.index())).collect();
        let offdiag = self
            .offdiag
            .iter()
            .map(|((i, j), q)| ((pos[*i], pos[*j]), *q))
            .collect();
        (
            QuboModel {
                n: live.len(),
                diagonal,
                offdiag,
                offset: self.offset,
            },
            live,
        )
    }

    /// Upper bound on `|energy|`, with overflow checked.
    pub(crate) fn magnitude(&self) -> Result<i64> {
        let mut s = self.offset.checked_abs().ok_or(Error::Overflow("qubo magnitude"))?;
        for q in self.diagonal.iter().chain(self.offdiag.values()) {
            s = checked::add(
                s,
                q.checked_abs().ok_or(Error::Overflow("qubo magnitude"))?,
                "qubo magnitude",
            )?;
        }
        Ok(s)
    }

    /// Largest `|Q_ij|` over stored entries, offset excluded.
    pub fn max_abs_entry(&self) -> i64 {
        self.diagonal
            .iter()
            .chain(self.offdiag.values())
            .map(|q| q.saturating_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn stats(&self) -> QuboStats {
        qubo_stats(self)
    }
}

/// Linear coefficients to the diagonal, pairs to the upper triangle, the
/// constant to the offset.
pub fn poly_to_qubo(p: &Polynomial) -> Result<QuboModel> {
    if p.degree() > 2 {
        return Err(Error::Degree {
            max: 2,
            found: p.degree(),
        });
    }
    let mut q = QuboModel::zero(p.n());
    for (m, c) in p.terms() {
        match m.vars() {
            [] => q.offset = c,
            [i] => q.diagonal[i.slot()] = c,
            [i, j] => q.add_pair(i.index(), j.index(), c)?,
            _ => unreachable!("degree checked"),
        }
    }
    Ok(q)
}

/// Coefficient range over nonzero diagonal, off-diagonal and offset values;
/// `[0, 0]` when there are none. Density is `|offdiag| / C(n, 2)`.
pub fn qubo_stats(q: &QuboModel) -> QuboStats {
    let values: Vec<i64> = q
        .diagonal
        .iter()
        .chain(q.offdiag.values())
        .chain(std::iter::once(&q.offset))
        .copied()
        .filter(|v| *v != 0)
        .collect();
    let pairs = q.n * q.n.saturating_sub(1) / 2;
    QuboStats {
        n: q.n,
        live: q.live_vars().len(),
        min_coeff: values.iter().copied().min().unwrap_or(0),
        max_coeff: values.iter().copied().max().unwrap_or(0),
        density: if pairs == 0 {
            0.0
        } else {
            q.offdiag.len() as f64 / pairs as f64
        },
    }
}
