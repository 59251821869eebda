//! Degree reduction by product substitution.
//!
//! Each substitution replaces a set of variables `S′` by a fresh variable `z`
//! and adds a penalty that vanishes exactly when `z = ∏_{s∈S′} x_s`.

use std::collections::HashMap;

use crate::error::{checked, Error, Result};
use crate::pbf::{Assignment, Monomial, Polynomial, VariableId};

/// A fresh variable standing for the product of `replaced`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstitutionRecord {
    pub aux: VariableId,
    pub replaced: Monomial,
}

/// Substitutions in the order they were made. Aux variables are numbered
/// `original_n + 1, original_n + 2, ...`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReductionTrace {
    pub original_n: usize,
    pub records: Vec<SubstitutionRecord>,
}

impl ReductionTrace {
    pub fn new(original_n: usize) -> Self {
        ReductionTrace {
            original_n,
            records: Vec::new(),
        }
    }

    /// Validating constructor for traces read from files.
    pub fn from_records(original_n: usize, records: Vec<SubstitutionRecord>) -> Result<Self> {
        let mut t = ReductionTrace::new(original_n);
        for r in records {
            if r.aux.index() != t.total_n() + 1 {
                return Err(Error::arg(format!(
                    "aux {} out of sequence, expected x{}",
                    r.aux,
                    t.total_n() + 1
                )));
            }
            t.push(r.replaced)?;
        }
        Ok(t)
    }

    /// Variable count of the reduced space.
    pub fn total_n(&self) -> usize {
        self.original_n + self.records.len()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    fn push(&mut self, replaced: Monomial) -> Result<VariableId> {
        let aux = VariableId::from_index(self.total_n() + 1);
        if replaced.degree() < 2 {
            return Err(Error::arg("a substitution must replace at least two variables"));
        }
        if replaced.max_var().is_some_and(|v| v >= aux) {
            return Err(Error::arg(format!("substitution for {aux} refers to a later variable")));
        }
        self.records.push(SubstitutionRecord { aux, replaced });
        Ok(aux)
    }

    /// Restricts `a` to the original variables. The flag is true iff every
    /// aux variable equals the product it stands for.
    pub fn lift(&self, a: &Assignment) -> Result<(Assignment, bool)> {
        a.check_len(self.total_n())?;
        let consistent = self.records.iter().all(|r| a.get(r.aux) == r.replaced.value(a));
        Ok((Assignment::new(a.bits()[..self.original_n].to_vec()), consistent))
    }

    /// Extends an original-space assignment with consistent aux values.
    pub fn extend(&self, a: &Assignment) -> Result<Assignment> {
        a.check_len(self.original_n)?;
        let mut bits = a.bits().to_vec();
        bits.reserve(self.records.len());
        for r in &self.records {
            let v = r.replaced.vars().iter().all(|v| bits[v.slot()]);
            bits.push(v);
        }
        Ok(Assignment::new(bits))
    }
}

/// See [`ReductionTrace::lift`].
pub fn lift_assignment(trace: &ReductionTrace, a: &Assignment) -> Result<(Assignment, bool)> {
    trace.lift(a)
}

/// Residual polynomials `f_i`, each read as the equation `f_i = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EquationSystem {
    n: usize,
    polys: Vec<Polynomial>,
}

impl EquationSystem {
    pub fn new(n: usize, polys: Vec<Polynomial>) -> Result<Self> {
        if let Some(p) = polys.iter().find(|p| p.n() != n) {
            return Err(Error::Dimension {
                expected: n,
                found: p.n(),
            });
        }
        Ok(EquationSystem { n, polys })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn is_satisfied(&self, a: &Assignment) -> Result<bool> {
        for p in &self.polys {
            if p.evaluate(a)? != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `Σ f_i²`, the unreduced objective.
    pub fn sum_of_squares(&self) -> Result<Polynomial> {
        let mut acc = Polynomial::zero(self.n);
        for p in &self.polys {
            acc = acc.add(&p.square()?)?;
        }
        Ok(acc)
    }
}

/// `∏_{i∈S} x_i − 2 Σ_{i∈S} x_i z + (2|S| − 1) z`: zero iff `z = ∏ x_i`,
/// at least 1 otherwise.
pub fn penalty_product_equals(s: &Monomial, z: VariableId) -> Result<Polynomial> {
    if s.degree() < 2 {
        return Err(Error::arg("penalty needs at least two variables"));
    }
    if s.contains(z) {
        return Err(Error::arg(format!("{z} appears in the product it replaces")));
    }
    let n = s.max_var().expect("nonempty").index().max(z.index());
    let zm = Monomial::new([z]);
    let k = s.degree() as i64;
    let mut terms = vec![(s.clone(), 1), (zm.clone(), 2 * k - 1)];
    for v in s.vars() {
        terms.push((Monomial::new([*v, z]), -2));
    }
    Polynomial::from_terms(n, terms)
}

fn penalty_weight(f: &Polynomial) -> Result<i64> {
    checked::add(
        1,
        checked::mul(2, f.abs_coeff_sum()?, "penalty weight")?,
        "penalty weight",
    )
}

/// Pair occurring in the most monomials of degree ≥ `min_degree`;
/// ties go to the lexicographically smallest pair.
fn most_frequent_pair<'a>(monomials: impl Iterator<Item = &'a Monomial>, min_degree: usize) -> Option<Monomial> {
    let mut counts: HashMap<(VariableId, VariableId), usize> = HashMap::new();
    for m in monomials.filter(|m| m.degree() >= min_degree) {
        let v = m.vars();
        for a in 0..v.len() {
            for b in a + 1..v.len() {
                *counts.entry((v[a], v[b])).or_insert(0) += 1;
            }
        }
    }
    counts
        .into_iter()
        .max_by(|x, y| x.1.cmp(&y.1).then_with(|| y.0.cmp(&x.0)))
        .map(|((a, b), _)| Monomial::new([a, b]))
}

/// Pairwise substitution with a penalty weight `M = 1 + 2Σ|c_S|`, until
/// every monomial has degree ≤ 2.
pub fn reduce_alg1(f: &Polynomial) -> Result<(Polynomial, ReductionTrace)> {
    reduce_alg1_to_degree(f, 2)
}

/// [`reduce_alg1`] stopping at an arbitrary target degree.
pub fn reduce_alg1_to_degree(f: &Polynomial, target: usize) -> Result<(Polynomial, ReductionTrace)> {
    if target < 2 {
        return Err(Error::arg("target degree must be at least 2"));
    }
    let m_weight = penalty_weight(f)?;
    let mut trace = ReductionTrace::new(f.n());
    let mut g = f.clone();
    while g.degree() > target {
        let pair = most_frequent_pair(g.terms().map(|(m, _)| m), target + 1).expect("high-degree term");
        let aux = trace.push(pair.clone())?;
        g = g.substitute_subset(&pair, aux, target + 1)?;
        g = g.add(
            &penalty_product_equals(&pair, aux)?
                .with_n(aux.index())?
                .scale(m_weight)?,
        )?;
    }
    Ok((g, trace))
}

/// Half-subset substitution: take the highest-degree monomial `S*` (first in
/// canonical order), replace its lexicographically smallest `⌈|S*|/2⌉`-subset
/// by a fresh variable, and repeat until the degree is at most `target`.
///
/// The penalty weight is `1 + 2Σ|c_S|` of the polynomial at the moment the
/// substitution is made, so later passes that split an earlier penalty's
/// own product term are still dominated.
pub fn reduce_alg2(f: &Polynomial, target: usize) -> Result<(Polynomial, ReductionTrace)> {
    reduce_alg2_with(f, target, false)
}

pub(crate) fn reduce_alg2_with(
    f: &Polynomial,
    target: usize,
    fixed_weight: bool,
) -> Result<(Polynomial, ReductionTrace)> {
    if target < 2 {
        return Err(Error::arg("target degree must be at least 2"));
    }
    let mut trace = ReductionTrace::new(f.n());
    let mut g = f.clone();
    while g.degree() > target {
        let d = g.degree();
        let star = g
            .terms()
            .map(|(m, _)| m)
            .find(|m| m.degree() == d)
            .expect("max-degree term")
            .clone();
        let half = d.div_ceil(2);
        let sub = Monomial::new(star.vars()[..half].iter().copied());
        let m_weight = if fixed_weight {
            penalty_weight(f)?
        } else {
            penalty_weight(&g)?
        };
        let aux = trace.push(sub.clone())?;
        g = g.substitute_subset(&sub, aux, target + 1)?;
        g = g.add(
            &penalty_product_equals(&sub, aux)?
                .with_n(aux.index())?
                .scale(m_weight)?,
        )?;
    }
    Ok((g, trace))
}

/// Replaces every pair occurring in any equation (degree-2 monomials
/// included) by a shared fresh variable, then returns
/// `Σ f_i² + Σ (unit penalties)`.
///
/// For a consistent system the minimum is 0 and every zero restricts to a
/// solution; an inconsistent system gives a positive minimum.
pub fn reduce_alg3(sys: &EquationSystem) -> Result<(Polynomial, ReductionTrace)> {
    let (sys, trace, penalty) = linearize_system(sys)?;
    let mut g = penalty;
    for f in sys.polys() {
        g = g.add(&f.square()?)?;
    }
    Ok((g, trace))
}

/// The substitution half of [`reduce_alg3`]: the rewritten (linear)
/// equations, the trace, and the accumulated penalty polynomial.
pub fn linearize_system(sys: &EquationSystem) -> Result<(EquationSystem, ReductionTrace, Polynomial)> {
    let mut trace = ReductionTrace::new(sys.n());
    let mut polys = sys.polys().to_vec();
    let mut n = sys.n();
    let mut penalty = Polynomial::zero(n);
    loop {
        let pair = most_frequent_pair(polys.iter().flat_map(|p| p.terms().map(|(m, _)| m)), 2);
        let Some(pair) = pair else { break };
        let aux = trace.push(pair.clone())?;
        n = aux.index();
        for p in polys.iter_mut() {
            *p = p.substitute_subset(&pair, aux, 2)?;
        }
        penalty = penalty.with_n(n)?.add(&penalty_product_equals(&pair, aux)?)?;
    }
    let polys = polys.into_iter().map(|p| p.with_n(n)).collect::<Result<Vec<_>>>()?;
    let penalty = penalty.with_n(n)?;
    Ok((EquationSystem::new(n, polys)?, trace, penalty))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pbf::all_assignments;

    fn m(ix: &[usize]) -> Monomial {
        Monomial::from_indices(ix).unwrap()
    }

    fn v(i: u32) -> VariableId {
        VariableId::new(i).unwrap()
    }

    #[test]
    fn penalty_rejects_bad_input() {
        assert!(penalty_product_equals(&m(&[1, 2]), v(2)).is_err());
        assert!(penalty_product_equals(&m(&[1]), v(2)).is_err());
    }

    #[test]
    fn alg1_single_cubic() {
        let f = Polynomial::from_terms(3, [(m(&[1, 2, 3]), 1)]).unwrap();
        let (g, trace) = reduce_alg1(&f).unwrap();
        let want = Polynomial::from_terms(
            4,
            [
                (m(&[1, 2]), 3),
                (m(&[1, 4]), -6),
                (m(&[2, 4]), -6),
                (m(&[4]), 9),
                (m(&[3, 4]), 1),
            ],
        )
        .unwrap();
        assert_eq!(g, want);
        assert_eq!(
            trace.records,
            vec![SubstitutionRecord {
                aux: v(4),
                replaced: m(&[1, 2])
            }]
        );
    }

    #[test]
    fn quadratic_input_is_untouched() {
        let f = Polynomial::from_terms(2, [(m(&[1, 2]), -4), (m(&[2]), 3)]).unwrap();
        let (g, trace) = reduce_alg1(&f).unwrap();
        assert_eq!(g, f);
        assert!(trace.is_empty());
    }

    #[test]
    fn lift_flags_inconsistency() {
        let trace = ReductionTrace::from_records(
            3,
            vec![SubstitutionRecord {
                aux: v(4),
                replaced: m(&[1, 2]),
            }],
        )
        .unwrap();
        let a = Assignment::new(vec![true, true, false, true]);
        assert_eq!(
            trace.lift(&a).unwrap(),
            (Assignment::new(vec![true, true, false]), true)
        );
        let b = Assignment::new(vec![true, false, false, true]);
        assert_eq!(
            trace.lift(&b).unwrap(),
            (Assignment::new(vec![true, false, false]), false)
        );
        assert!(trace.lift(&Assignment::zeros(3)).is_err());
    }

    #[test]
    fn trace_rejects_out_of_order_aux() {
        let r = ReductionTrace::from_records(
            3,
            vec![SubstitutionRecord {
                aux: v(5),
                replaced: m(&[1, 2]),
            }],
        );
        assert!(r.is_err());
    }

    #[test]
    fn alg3_single_product() {
        let f = Polynomial::from_terms(2, [(m(&[1, 2]), 1), (m(&[]), -1)]).unwrap();
        let sys = EquationSystem::new(2, vec![f]).unwrap();
        let (g, trace) = reduce_alg3(&sys).unwrap();
        assert_eq!(trace.len(), 1);
        // (x3 - 1)^2 + x1x2 - 2x1x3 - 2x2x3 + 3x3
        let want = Polynomial::from_terms(
            3,
            [
                (m(&[]), 1),
                (m(&[3]), -1 + 3),
                (m(&[1, 2]), 1),
                (m(&[1, 3]), -2),
                (m(&[2, 3]), -2),
            ],
        )
        .unwrap();
        assert_eq!(g, want);
        let zeros: Vec<_> = all_assignments(3).filter(|a| g.evaluate(a).unwrap() == 0).collect();
        assert_eq!(zeros, vec![Assignment::new(vec![true, true, true])]);
    }

    #[test]
    fn fixed_weight_alg2_loses_the_minimum() {
        // 4*x2x3x4x5 - x1x2x3x4x5 has minimum 0. Splitting the first
        // penalty's own product term with the input-derived M lets the
        // second aux cheat.
        let f = Polynomial::from_terms(5, [(m(&[2, 3, 4, 5]), 4), (m(&[1, 2, 3, 4, 5]), -1)]).unwrap();
        let min = |p: &Polynomial| all_assignments(p.n()).map(|a| p.evaluate(&a).unwrap()).min().unwrap();
        let (fixed, _) = reduce_alg2_with(&f, 2, true).unwrap();
        let (adaptive, _) = reduce_alg2(&f, 2).unwrap();
        assert_eq!(min(&f), 0);
        assert!(min(&fixed) < 0);
        assert_eq!(min(&adaptive), 0);
    }

    #[test]
    fn alg3_empty_system() {
        let sys = EquationSystem::new(2, vec![Polynomial::zero(2)]).unwrap();
        let (g, trace) = reduce_alg3(&sys).unwrap();
        assert!(g.is_zero());
        assert!(trace.is_empty());
    }
}
