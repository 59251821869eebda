//! Pseudo-Boolean functions: multilinear polynomials with exact integer
//! coefficients, posiforms over literals, and the negation transform that
//! turns a quadratic minimisation into a posiform maximisation.

mod polynomial;
mod posiform;

pub use polynomial::{PolyStats, Polynomial};
pub use posiform::{negate_to_posiform, LiteralSet, Posiform};

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// 1-based variable index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VariableId(u32);

impl VariableId {
    pub fn new(index: u32) -> Result<Self> {
        if index == 0 {
            return Err(Error::arg("variable indices are 1-based"));
        }
        Ok(VariableId(index))
    }

    /// Panics on zero; for indices the caller has already validated.
    pub(crate) fn from_index(index: usize) -> Self {
        assert!(index >= 1, "variable indices are 1-based");
        VariableId(u32::try_from(index).expect("variable index fits in u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Zero-based slot in an [`Assignment`].
    pub fn slot(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A variable or its complement. Ordered by (variable, polarity) with the
/// positive literal first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: VariableId,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: VariableId) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: VariableId) -> Self {
        Literal { var, negated: true }
    }

    pub fn complement(self) -> Self {
        Literal {
            var: self.var,
            negated: !self.negated,
        }
    }

    pub fn value(self, a: &Assignment) -> bool {
        a.get(self.var) != self.negated
    }

    /// Signed encoding used by the JSON posiform format: `+i` / `-i`.
    pub fn to_signed(self) -> i64 {
        let i = self.var.index() as i64;
        if self.negated {
            -i
        } else {
            i
        }
    }

    pub fn from_signed(code: i64) -> Result<Self> {
        if code == 0 {
            return Err(Error::arg("literal code 0 is not a variable"));
        }
        let idx =
            u32::try_from(code.unsigned_abs()).map_err(|_| Error::arg(format!("literal code {code} out of range")))?;
        let var = VariableId::new(idx)?;
        Ok(Literal { var, negated: code < 0 })
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "~{}", self.var)
        } else {
            write!(f, "{}", self.var)
        }
    }
}

/// A set of variables standing for their product. Empty means the constant 1.
///
/// Ordered by size first, then lexicographically by variable index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<VariableId>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    /// Builds a monomial; repeated variables collapse since x·x = x.
    pub fn new(vars: impl IntoIterator<Item = VariableId>) -> Self {
        let mut v: Vec<VariableId> = vars.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Monomial(v)
    }

    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut vars = Vec::with_capacity(indices.len());
        for &i in indices {
            vars.push(VariableId::new(
                u32::try_from(i).map_err(|_| Error::arg("variable index too large"))?,
            )?);
        }
        let m = Monomial::new(vars);
        if m.0.len() != indices.len() {
            return Err(Error::arg(format!("repeated variable in monomial {indices:?}")));
        }
        Ok(m)
    }

    pub fn vars(&self) -> &[VariableId] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VariableId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_superset_of(&self, other: &Monomial) -> bool {
        other.0.iter().all(|v| self.contains(*v))
    }

    /// Idempotent product: the union of the variable sets.
    pub fn union(&self, other: &Monomial) -> Monomial {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => {
                    v.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    v.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    v.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        v.extend_from_slice(&self.0[i..]);
        v.extend_from_slice(&other.0[j..]);
        Monomial(v)
    }

    /// `self ∖ removed ∪ {added}`.
    pub fn substitute(&self, removed: &Monomial, added: VariableId) -> Monomial {
        Monomial::new(
            self.0
                .iter()
                .copied()
                .filter(|v| !removed.contains(*v))
                .chain(std::iter::once(added)),
        )
    }

    pub fn max_var(&self) -> Option<VariableId> {
        self.0.last().copied()
    }

    pub fn value(&self, a: &Assignment) -> bool {
        self.0.iter().all(|v| a.get(*v))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A 0/1 assignment to variables `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Assignment(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Assignment(vec![false; n])
    }

    /// Bits of `code` with variable 1 as the least significant bit.
    pub fn from_code(n: usize, code: u64) -> Self {
        Assignment((0..n).map(|i| (code >> i) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: VariableId) -> bool {
        self.0[v.slot()]
    }

    pub fn set(&mut self, v: VariableId, value: bool) {
        self.0[v.slot()] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.0.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: self.0.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{}", u8::from(*b))?;
        }
        Ok(())
    }
}

/// Iterates every assignment of `n` variables in code order.
pub fn all_assignments(n: usize) -> impl Iterator<Item = Assignment> {
    assert!(n < 63, "exhaustive enumeration over {n} variables");
    (0..(1u64 << n)).map(move |c| Assignment::from_code(n, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> VariableId {
        VariableId::new(i).unwrap()
    }

    #[test]
    fn monomial_order_is_size_then_lex() {
        let mut ms = vec![
            Monomial::new([v(1), v(2)]),
            Monomial::new([v(3)]),
            Monomial::one(),
            Monomial::new([v(1), v(3)]),
            Monomial::new([v(1)]),
        ];
        ms.sort();
        let shown: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
        assert_eq!(shown, ["1", "x1", "x3", "x1*x2", "x1*x3"]);
    }

    #[test]
    fn monomial_collapses_repeats() {
        assert_eq!(Monomial::new([v(2), v(2), v(1)]).vars(), &[v(1), v(2)]);
        assert!(Monomial::from_indices(&[1, 1]).is_err());
        assert!(Monomial::from_indices(&[0]).is_err());
    }

    #[test]
    fn literal_codes() {
        let l = Literal::from_signed(-3).unwrap();
        assert_eq!(l, Literal::neg(v(3)));
        assert_eq!(l.to_signed(), -3);
        assert!(Literal::from_signed(0).is_err());
        assert!(Literal::pos(v(2)) < Literal::neg(v(2)));
        assert!(Literal::neg(v(1)) < Literal::pos(v(2)));
    }

    #[test]
    fn union_and_substitute() {
        let a = Monomial::new([v(1), v(3)]);
        let b = Monomial::new([v(2), v(3)]);
        assert_eq!(a.union(&b), Monomial::new([v(1), v(2), v(3)]));
        let s = Monomial::new([v(1), v(2), v(3)]).substitute(&Monomial::new([v(1), v(2)]), v(4));
        assert_eq!(s, Monomial::new([v(3), v(4)]));
    }
}
