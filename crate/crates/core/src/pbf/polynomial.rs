use std::collections::BTreeMap;
use std::fmt;

use super::{Assignment, Monomial, VariableId};
use crate::error::{checked, Error, Result};

/// Multilinear polynomial over `x_1..x_n` with exact integer coefficients.
///
/// The constant term is stored under the empty monomial. Zero coefficients are
/// never stored, and iteration follows the canonical monomial order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Monomial, i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolyStats {
    pub degree: usize,
    pub min_coeff: i64,
    pub max_coeff: i64,
    pub n_vars: usize,
    /// Nonconstant terms only.
    pub n_terms: usize,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: i64) -> Self {
        let mut p = Polynomial::zero(n);
        if c != 0 {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn var(n: usize, v: VariableId) -> Result<Self> {
        Polynomial::from_terms(n, [(Monomial::new([v]), 1)])
    }

    /// Builds a polynomial, summing repeated monomials and dropping zeros.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Monomial, i64)>) -> Result<Self> {
        let mut p = Polynomial::zero(n);
        for (m, c) in terms {
            p.add_term(m, c)?;
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: i64) -> Result<()> {
        if let Some(v) = m.max_var() {
            if v.index() > self.n {
                return Err(Error::Dimension {
                    expected: self.n,
                    found: v.index(),
                });
            }
        }
        if c == 0 {
            return Ok(());
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = checked::add(*e.get(), c, "polynomial addition")?;
                if s == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Same polynomial viewed over a larger variable range.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        if n < self.max_var_index() {
            return Err(Error::Dimension {
                expected: n,
                found: self.max_var_index(),
            });
        }
        Ok(Polynomial {
            n,
            terms: self.terms.clone(),
        })
    }

    pub fn max_var_index(&self) -> usize {
        self.terms
            .keys()
            .filter_map(|m| m.max_var())
            .map(|v| v.index())
            .max()
            .unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> + '_ {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn nonconstant_terms(&self) -> impl Iterator<Item = (&Monomial, i64)> + '_ {
        self.terms().filter(|(m, _)| !m.is_one())
    }

    pub fn coeff(&self, m: &Monomial) -> i64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> i64 {
        self.coeff(&Monomial::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<i64> {
        a.check_len(self.n)?;
        let mut acc = 0i64;
        for (m, c) in &self.terms {
            if m.value(a) {
                acc = checked::add(acc, *c, "polynomial evaluation")?;
            }
        }
        Ok(acc)
    }

    fn check_same_n(&self, other: &Polynomial) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same_n(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.scale(-1)?)
    }

    pub fn scale(&self, k: i64) -> Result<Polynomial> {
        if k == 0 {
            return Ok(Polynomial::zero(self.n));
        }
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            terms.insert(m.clone(), checked::mul(*c, k, "polynomial scaling")?);
        }
        Ok(Polynomial { n: self.n, terms })
    }

    /// Distributed product with x·x = x.
    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same_n(other)?;
        let mut out = Polynomial::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.union(mb), checked::mul(*ca, *cb, "polynomial product")?)?;
            }
        }
        Ok(out)
    }

    pub fn square(&self) -> Result<Polynomial> {
        self.mul(self)
    }

    /// Replaces every occurrence of `pair ⊆ S` (for monomials with at least
    /// `min_degree` variables) by `S ∖ pair ∪ {aux}`.
    pub(crate) fn substitute_subset(
        &self,
        subset: &Monomial,
        aux: VariableId,
        min_degree: usize,
    ) -> Result<Polynomial> {
        let n = self.n.max(aux.index());
        let mut out = Polynomial::zero(n);
        for (m, c) in &self.terms {
            let nm = if m.degree() >= min_degree && m.is_superset_of(subset) {
                m.substitute(subset, aux)
            } else {
                m.clone()
            };
            out.add_term(nm, *c)?;
        }
        Ok(out)
    }

    /// Fixes a variable to a constant; the variable count is unchanged.
    pub fn fix(&self, v: VariableId, value: bool) -> Result<Polynomial> {
        let mut out = Polynomial::zero(self.n);
        for (m, c) in &self.terms {
            if m.contains(v) {
                if value {
                    out.add_term(Monomial::new(m.vars().iter().copied().filter(|u| *u != v)), *c)?;
                }
            } else {
                out.add_term(m.clone(), *c)?;
            }
        }
        Ok(out)
    }

    /// Sum of absolute values of all coefficients, constant included.
    pub fn abs_coeff_sum(&self) -> Result<i64> {
        let mut s = 0i64;
        for c in self.terms.values() {
            s = checked::add(s, c.checked_abs().ok_or(Error::Overflow("abs"))?, "coefficient sum")?;
        }
        Ok(s)
    }

    pub fn stats(&self) -> PolyStats {
        let (min_coeff, max_coeff) = if self.terms.is_empty() {
            (0, 0)
        } else {
            (*self.terms.values().min().unwrap(), *self.terms.values().max().unwrap())
        };
        PolyStats {
            degree: self.degree(),
            min_coeff,
            max_coeff,
            n_vars: self.n,
            n_terms: self.nonconstant_terms().count(),
        }
    }
}

impl Polynomial {
    /// Like `Display`, with variables named by `name`.
    pub fn render(&self, name: impl Fn(VariableId) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let mag = c.unsigned_abs();
            if k == 0 {
                if *c < 0 {
                    s.push('-');
                }
            } else {
                s.push_str(if *c < 0 { " - " } else { " + " });
            }
            let vars: Vec<String> = m.vars().iter().map(|v| name(*v)).collect();
            if m.is_one() {
                s.push_str(&mag.to_string());
            } else if mag == 1 {
                s.push_str(&vars.join("*"));
            } else {
                s.push_str(&format!("{mag}*{}", vars.join("*")));
            }
        }
        s
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|v| v.to_string()))
    }
}
