use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::QuboModel;
use crate::error::{checked, Error, Result};
use crate::pbf::Assignment;

/// Exact rational with denominator 4, stored as its numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Quarter(pub i64);

impl Quarter {
    pub const ZERO: Quarter = Quarter(0);

    pub fn from_int(v: i64) -> Result<Self> {
        Ok(Quarter(checked::mul(v, 4, "quarter scaling")?))
    }

    /// The value times 4.
    pub fn numerator(self) -> i64 {
        self.0
    }

    pub fn to_int(self) -> Option<i64> {
        (self.0 % 4 == 0).then_some(self.0 / 4)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 4.0
    }
}

impl fmt::Display for Quarter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.rem_euclid(4) {
            0 => write!(f, "{}", self.0 / 4),
            2 => write!(f, "{}/2", self.0 / 2),
            _ => write!(f, "{}/4", self.0),
        }
    }
}

impl Add for Quarter {
    type Output = Quarter;
    fn add(self, o: Quarter) -> Quarter {
        Quarter(self.0 + o.0)
    }
}

impl Sub for Quarter {
    type Output = Quarter;
    fn sub(self, o: Quarter) -> Quarter {
        Quarter(self.0 - o.0)
    }
}

impl Neg for Quarter {
    type Output = Quarter;
    fn neg(self) -> Quarter {
        Quarter(-self.0)
    }
}

impl Mul<i64> for Quarter {
    type Output = Quarter;
    fn mul(self, k: i64) -> Quarter {
        Quarter(self.0 * k)
    }
}

/// `offset + Σ h_i s_i + Σ_{i<j} J_ij s_i s_j` over `s ∈ {−1, 1}^n`, with
/// `x = (1 − s)/2`, so `x = 0 ↔ s = +1`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IsingModel {
    pub n: usize,
    pub h: Vec<Quarter>,
    pub j: BTreeMap<(usize, usize), Quarter>,
    pub offset: Quarter,
}

impl IsingModel {
    pub fn new(n: usize, h: Vec<Quarter>, j: BTreeMap<(usize, usize), Quarter>, offset: Quarter) -> Result<Self> {
        if h.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: h.len(),
            });
        }
        if let Some(((a, b), _)) = j.iter().find(|((a, b), v)| !(1 <= *a && a < b && *b <= n) || v.0 == 0) {
            return Err(Error::arg(format!(
                "coupling key ({a}, {b}) invalid or zero for n = {n}"
            )));
        }
        Ok(IsingModel { n, h, j, offset })
    }

    /// Energy at spins `s` (each ±1).
    pub fn energy(&self, s: &[i8]) -> Result<Quarter> {
        if s.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: s.len(),
            });
        }
        let mut e = self.offset.0;
        for (i, h) in self.h.iter().enumerate() {
            e = checked::add(e, h.0 * s[i] as i64, "ising energy")?;
        }
        for ((a, b), v) in &self.j {
            e = checked::add(e, v.0 * (s[a - 1] * s[b - 1]) as i64, "ising energy")?;
        }
        Ok(Quarter(e))
    }

    /// Energy at the spins corresponding to a 0/1 assignment.
    pub fn energy_of_bits(&self, a: &Assignment) -> Result<Quarter> {
        let s: Vec<i8> = a.bits().iter().map(|b| if *b { -1 } else { 1 }).collect();
        self.energy(&s)
    }
}

pub fn qubo_to_ising(q: &QuboModel) -> Result<IsingModel> {
    let n = q.n();
    let ctx = "ising conversion";
    // Everything in quarters.
    let mut h: Vec<i64> = Vec::with_capacity(n);
    for qi in q.diagonal() {
        h.push(checked::mul(*qi, -2, ctx)?);
    }
    let mut offset = checked::mul(q.offset(), 4, ctx)?;
    for qi in q.diagonal() {
        offset = checked::add(offset, checked::mul(*qi, 2, ctx)?, ctx)?;
    }
    let mut j = BTreeMap::new();
    for ((a, b), v) in q.offdiag() {
        h[a - 1] = checked::add(h[a - 1], -v, ctx)?;
        h[b - 1] = checked::add(h[b - 1], -v, ctx)?;
        offset = checked::add(offset, *v, ctx)?;
        j.insert((*a, *b), Quarter(*v));
    }
    IsingModel::new(n, h.into_iter().map(Quarter).collect(), j, Quarter(offset))
}

pub fn ising_to_qubo(m: &IsingModel) -> Result<QuboModel> {
    let ctx = "qubo conversion";
    let bad = |what: &str| Error::Representation(what.to_string());
    // 2·Q_ii = −(h_i + Σ_j J_ij) in quarters.
    let mut twice_diag: Vec<i64> = m.h.iter().map(|h| -h.0).collect();
    let mut offset = m.offset.0;
    for h in &m.h {
        offset = checked::add(offset, h.0, ctx)?;
    }
    let mut off = Vec::with_capacity(m.j.len());
    for ((a, b), v) in &m.j {
        twice_diag[a - 1] = checked::add(twice_diag[a - 1], -v.0, ctx)?;
        twice_diag[b - 1] = checked::add(twice_diag[b - 1], -v.0, ctx)?;
        offset = checked::add(offset, v.0, ctx)?;
        off.push(((*a, *b), v.0));
    }
    let mut diag = Vec::with_capacity(m.n);
    for (i, t) in twice_diag.into_iter().enumerate() {
        if t % 2 != 0 {
            return Err(bad(&format!("Q_{{{0},{0}}} = {1}/2", i + 1, t)));
        }
        diag.push(t / 2);
    }
    if offset % 4 != 0 {
        return Err(bad(&format!("offset {}", Quarter(offset))));
    }
    QuboModel::new(m.n, diag, off, offset / 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pbf::all_assignments;

    #[test]
    fn single_variable() {
        let q = QuboModel::new(1, vec![1], [], 0).unwrap();
        let m = qubo_to_ising(&q).unwrap();
        assert_eq!(m.h, vec![Quarter(-2)]);
        assert_eq!(m.offset, Quarter(2));
        assert_eq!(m.energy(&[1]).unwrap(), Quarter(0));
        assert_eq!(m.energy(&[-1]).unwrap(), Quarter(4));
        assert_eq!(m.h[0].to_string(), "-1/2");
    }

    #[test]
    fn energies_agree_and_round_trip() {
        let q = QuboModel::new(3, vec![3, -1, 0], [((1, 2), 5), ((1, 3), -3), ((2, 3), 1)], 2).unwrap();
        let m = qubo_to_ising(&q).unwrap();
        for a in all_assignments(3) {
            assert_eq!(
                Quarter::from_int(q.energy(&a).unwrap()).unwrap(),
                m.energy_of_bits(&a).unwrap()
            );
        }
        assert_eq!(ising_to_qubo(&m).unwrap(), q);
    }

    #[test]
    fn non_integral_is_rejected() {
        let m = IsingModel::new(1, vec![Quarter(1)], BTreeMap::new(), Quarter(0)).unwrap();
        assert!(matches!(ising_to_qubo(&m), Err(Error::Representation(_))));
    }

    #[test]
    fn display_reduces() {
        assert_eq!(Quarter(8).to_string(), "2");
        assert_eq!(Quarter(-6).to_string(), "-3/2");
        assert_eq!(Quarter(3).to_string(), "3/4");
    }
}
