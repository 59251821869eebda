use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::{Assignment, Literal, Monomial, Polynomial, VariableId};
use crate::error::{checked, Error, Result};

/// Nonempty set of literals with no complementary pair, sorted by
/// (variable, polarity). Sets order by size, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LiteralSet(Vec<Literal>);

impl LiteralSet {
    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Result<Self> {
        let mut v: Vec<Literal> = lits.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() {
            return Err(Error::arg("posiform term needs at least one literal"));
        }
        if v.windows(2).any(|w| w[0].var == w[1].var) {
            return Err(Error::arg("posiform term contains a literal and its complement"));
        }
        Ok(LiteralSet(v))
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, l: Literal) -> bool {
        self.0.binary_search(&l).is_ok()
    }

    pub fn value(&self, a: &Assignment) -> bool {
        self.0.iter().all(|l| l.value(a))
    }

    /// True when some literal here is complemented in `other`.
    pub fn conflicts_with(&self, other: &LiteralSet) -> bool {
        self.0.iter().any(|l| other.contains(l.complement()))
    }

    fn max_var(&self) -> VariableId {
        self.0.iter().map(|l| l.var).max().expect("nonempty")
    }

    /// The set with `l` removed; `None` when nothing would remain.
    pub(crate) fn without(&self, l: Literal) -> Option<LiteralSet> {
        let v: Vec<Literal> = self.0.iter().copied().filter(|x| *x != l).collect();
        if v.is_empty() {
            None
        } else {
            Some(LiteralSet(v))
        }
    }

    fn replaced(&self, from: Literal, to: Literal) -> LiteralSet {
        let mut v: Vec<Literal> = self.0.iter().map(|x| if *x == from { to } else { *x }).collect();
        v.sort_unstable();
        LiteralSet(v)
    }
}

impl Ord for LiteralSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for LiteralSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LiteralSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// `constant + Σ_T a_T ∏_{u∈T} u` with every `a_T > 0`.
///
/// The constant may be negative; transforms carry it along exactly so that
/// optima can be reconciled with the source polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Posiform {
    n: usize,
    constant: i64,
    terms: BTreeMap<LiteralSet, i64>,
}

impl Posiform {
    pub fn new(n: usize, constant: i64, terms: impl IntoIterator<Item = (LiteralSet, i64)>) -> Result<Self> {
        let mut p = Posiform {
            n,
            constant,
            terms: BTreeMap::new(),
        };
        for (t, w) in terms {
            if w < 0 {
                return Err(Error::arg(format!("posiform weight {w} on {t} is negative")));
            }
            p.add_term(t, w)?;
        }
        Ok(p)
    }

    /// Convenience constructor from signed literal codes.
    pub fn from_codes(n: usize, constant: i64, terms: &[(&[i64], i64)]) -> Result<Self> {
        let mut v = Vec::with_capacity(terms.len());
        for (codes, w) in terms {
            let lits = codes
                .iter()
                .map(|c| Literal::from_signed(*c))
                .collect::<Result<Vec<_>>>()?;
            v.push((LiteralSet::new(lits)?, *w));
        }
        Posiform::new(n, constant, v)
    }

    pub(crate) fn add_term(&mut self, t: LiteralSet, w: i64) -> Result<()> {
        if t.max_var().index() > self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: t.max_var().index(),
            });
        }
        if w == 0 {
            return Ok(());
        }
        let e = self.terms.entry(t).or_insert(0);
        *e = checked::add(*e, w, "posiform weight")?;
        Ok(())
    }

    pub(crate) fn add_constant(&mut self, c: i64) -> Result<()> {
        self.constant = checked::add(self.constant, c, "posiform constant")?;
        Ok(())
    }

    pub(crate) fn remove_term(&mut self, t: &LiteralSet) -> Option<i64> {
        self.terms.remove(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constant(&self) -> i64 {
        self.constant
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LiteralSet, i64)> + '_ {
        self.terms.iter().map(|(t, w)| (t, *w))
    }

    pub fn weight(&self, t: &LiteralSet) -> i64 {
        self.terms.get(t).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(LiteralSet::len).max().unwrap_or(0)
    }

    /// Variables that occur in at least one term, ascending.
    pub fn live_vars(&self) -> Vec<VariableId> {
        let mut v: Vec<VariableId> = self
            .terms
            .keys()
            .flat_map(|t| t.literals().iter().map(|l| l.var))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<i64> {
        a.check_len(self.n)?;
        let mut acc = self.constant;
        for (t, w) in &self.terms {
            if t.value(a) {
                acc = checked::add(acc, *w, "posiform evaluation")?;
            }
        }
        Ok(acc)
    }

    /// Expands complemented literals via `x̄ = 1 − x`.
    pub fn to_polynomial(&self) -> Result<Polynomial> {
        let mut p = Polynomial::constant(self.n, self.constant);
        for (t, w) in &self.terms {
            // ∏ over literals: expand the negated ones as (1 - x).
            let mut expansion: Vec<(Monomial, i64)> = vec![(Monomial::one(), *w)];
            for l in t.literals() {
                let single = Monomial::new([l.var]);
                let mut next = Vec::with_capacity(expansion.len() * 2);
                for (m, c) in expansion {
                    if l.negated {
                        next.push((m.clone(), c));
                        next.push((m.union(&single), checked::neg(c, "posiform expansion")?));
                    } else {
                        next.push((m.union(&single), c));
                    }
                }
                expansion = next;
            }
            for (m, c) in expansion {
                p.add_term(m, c)?;
            }
        }
        Ok(p)
    }

    /// Merges sibling terms `a·T·u + b·T·ū` into `min(a,b)·T + |a−b|·T·(u or ū)`
    /// until none remain. The represented function is unchanged.
    pub fn normalized(&self) -> Result<Posiform> {
        let mut p = self.clone();
        loop {
            let mut found = None;
            'scan: for t in p.terms.keys() {
                for l in t.literals() {
                    if !l.negated {
                        let sib = t.replaced(*l, l.complement());
                        if p.terms.contains_key(&sib) {
                            found = Some((t.clone(), sib, *l));
                            break 'scan;
                        }
                    }
                }
            }
            let Some((tp, tn, l)) = found else {
                return Ok(p);
            };
            let a = p.terms.remove(&tp).expect("present");
            let b = p.terms.remove(&tn).expect("present");
            let common = a.min(b);
            match tp.without(l) {
                Some(rest) => p.add_term(rest, common)?,
                None => p.add_constant(common)?,
            }
            match a.cmp(&b) {
                Ordering::Greater => p.add_term(tp, a - b)?,
                Ordering::Less => p.add_term(tn, b - a)?,
                Ordering::Equal => {}
            }
        }
    }
}

impl fmt::Display for Posiform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        for (t, w) in &self.terms {
            write!(f, " + {w}*{t}")?;
        }
        Ok(())
    }
}

/// Rewrites `−p` (for quadratic `p`) as a posiform using
/// `−x_i = −1 + x̄_i` and `−x_i x_j = −1 + x̄_j + x̄_i x_j` (i < j).
///
/// `φ(a) = −p(a)` for every assignment, so maximising `φ` minimises `p`.
pub fn negate_to_posiform(p: &Polynomial) -> Result<Posiform> {
    if p.degree() > 2 {
        return Err(Error::Degree {
            max: 2,
            found: p.degree(),
        });
    }
    let mut out = Posiform::new(p.n(), 0, [])?;
    for (m, c) in p.terms() {
        let d = checked::neg(c, "negation")?;
        let vars = m.vars();
        match vars.len() {
            0 => out.add_constant(d)?,
            1 => {
                if d > 0 {
                    out.add_term(LiteralSet::new([Literal::pos(vars[0])])?, d)?;
                } else {
                    out.add_constant(d)?;
                    out.add_term(LiteralSet::new([Literal::neg(vars[0])])?, -d)?;
                }
            }
            _ => {
                let (i, j) = (vars[0], vars[1]);
                if d > 0 {
                    out.add_term(LiteralSet::new([Literal::pos(i), Literal::pos(j)])?, d)?;
                } else {
                    out.add_constant(d)?;
                    out.add_term(LiteralSet::new([Literal::neg(j)])?, -d)?;
                    out.add_term(LiteralSet::new([Literal::neg(i), Literal::pos(j)])?, -d)?;
                }
            }
        }
    }
    out.normalized()
}
