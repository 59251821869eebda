//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use posiqubo::qubo::{poly_to_qubo, solve_exact, QuboModel};
use posiqubo::{all_assignments, Assignment, Monomial, Polynomial, Posiform, VariableId};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn v(i: usize) -> VariableId {
    VariableId::new(i as u32).unwrap()
}

pub fn mono(ix: &[usize]) -> Monomial {
    Monomial::from_indices(ix).unwrap()
}

pub fn poly(n: usize, terms: &[(&[usize], i64)]) -> Polynomial {
    Polynomial::from_terms(n, terms.iter().map(|(m, c)| (mono(m), *c))).unwrap()
}

/// Evaluate a polynomial term by term over a bit vector.
pub fn eval(p: &Polynomial, bits: &[bool]) -> i64 {
    p.terms()
        .map(|(m, c)| {
            if m.vars().iter().all(|v| bits[v.index() - 1]) {
                c
            } else {
                0
            }
        })
        .sum()
}

pub fn bits_of(code: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| code >> i & 1 == 1).collect()
}

/// Minimum and number of minimizers by enumeration.
pub fn brute_min(p: &Polynomial) -> i64 {
    (0..1u64 << p.n()).map(|c| eval(p, &bits_of(c, p.n()))).min().unwrap()
}

/// Exact minimum of a quadratic polynomial over its live variables.
pub fn quadratic_min(p: &Polynomial) -> i64 {
    let (q, _) = poly_to_qubo(p).unwrap().compact();
    solve_exact(&q, 26).unwrap().energy
}

/// Minimum of `p` with the first `x.len()` variables fixed to `x`.
pub fn min_with_prefix(p: &Polynomial, x: &[bool]) -> i64 {
    let mut r = p.clone();
    for (i, b) in x.iter().enumerate() {
        r = r.fix(v(i + 1), *b).unwrap();
    }
    if r.degree() <= 2 {
        quadratic_min(&r)
    } else {
        brute_min(&r)
    }
}

pub fn random_poly(rng: &mut ChaCha8Rng, max_n: usize, max_deg: usize, max_terms: usize, max_c: i64) -> Polynomial {
    let n = rng.random_range(1..=max_n);
    let k = rng.random_range(0..=max_terms);
    let mut terms = vec![(Monomial::one(), rng.random_range(-max_c..=max_c))];
    for _ in 0..k {
        let d = rng.random_range(1..=max_deg.min(n));
        let mut ix: Vec<usize> = (1..=n).collect();
        for i in 0..d {
            let j = rng.random_range(i..n);
            ix.swap(i, j);
        }
        let mut c = 0;
        while c == 0 {
            c = rng.random_range(-max_c..=max_c);
        }
        terms.push((mono(&ix[..d]), c));
    }
    Polynomial::from_terms(n, terms).unwrap()
}

/// Brute-force maximum of a posiform.
pub fn posiform_max(phi: &Posiform) -> i64 {
    let n = phi.n();
    (0..1u64 << n)
        .map(|c| phi.evaluate(&Assignment::new(bits_of(c, n))).unwrap())
        .max()
        .unwrap()
}

/// Maximum weight independent set of the graph where two terms conflict iff
/// one holds a literal whose complement is in the other.
pub fn conflict_mwis(phi: &Posiform) -> i64 {
    let terms: Vec<(Vec<i64>, i64)> = phi
        .terms()
        .map(|(t, w)| (t.literals().iter().map(|l| l.to_signed()).collect(), w))
        .collect();
    let k = terms.len();
    let clash = |a: &[i64], b: &[i64]| a.iter().any(|x| b.contains(&-x));
    let mut best = 0;
    for s in 0..1u64 << k {
        let chosen: Vec<usize> = (0..k).filter(|i| s >> i & 1 == 1).collect();
        let ok = chosen
            .iter()
            .all(|&i| chosen.iter().all(|&j| i >= j || !clash(&terms[i].0, &terms[j].0)));
        if ok {
            best = best.max(chosen.iter().map(|&i| terms[i].1).sum());
        }
    }
    best
}

/// Terms of a posiform as `signed literal codes -> weight`.
pub fn posiform_terms(phi: &Posiform) -> BTreeMap<Vec<i64>, i64> {
    phi.terms()
        .map(|(t, w)| {
            let mut codes: Vec<i64> = t.literals().iter().map(|l| l.to_signed()).collect();
            codes.sort_by_key(|c| (c.abs(), -c.signum()));
            (codes, w)
        })
        .collect()
}

pub fn code_terms(terms: &[(&[i64], i64)]) -> BTreeMap<Vec<i64>, i64> {
    terms
        .iter()
        .map(|(c, w)| {
            let mut codes = c.to_vec();
            codes.sort_by_key(|c| (c.abs(), -c.signum()));
            (codes, *w)
        })
        .collect()
}

pub fn random_qubo(rng: &mut ChaCha8Rng, max_n: usize, max_c: i64) -> QuboModel {
    let n = rng.random_range(1..=max_n);
    let diag = (0..n).map(|_| rng.random_range(-max_c..=max_c)).collect();
    let mut off = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if rng.random_bool(0.5) {
                off.push(((i, j), rng.random_range(-max_c..=max_c)));
            }
        }
    }
    QuboModel::new(n, diag, off, rng.random_range(-max_c..=max_c)).unwrap()
}

/// Naive QUBO energy over a bit vector.
pub fn qubo_energy(q: &QuboModel, x: &[bool]) -> i64 {
    let mut e = q.offset();
    for i in 1..=q.n() {
        if x[i - 1] {
            e += q.diag(i);
        }
    }
    for ((i, j), c) in q.offdiag() {
        if x[i - 1] && x[j - 1] {
            e += c;
        }
    }
    e
}

pub fn all_bits(n: usize) -> impl Iterator<Item = Vec<bool>> {
    all_assignments(n).map(Assignment::into_bits)
}

/// Standard AES S-box.
pub const AES_SBOX: [u8; 256] = [
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76, 0xca, 0x82, 0xc9,
    0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0, 0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f,
    0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15, 0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07,
    0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75, 0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3,
    0x29, 0xe3, 0x2f, 0x84, 0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58,
    0xcf, 0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8, 0x51, 0xa3,
    0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2, 0xcd, 0x0c, 0x13, 0xec, 0x5f,
    0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73, 0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88,
    0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb, 0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac,
    0x62, 0x91, 0x95, 0xe4, 0x79, 0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a,
    0xae, 0x08, 0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a, 0x70,
    0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e, 0xe1, 0xf8, 0x98, 0x11,
    0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf, 0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42,
    0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,
];

/// `x0..x7, y0..y7` for byte `x` and its image, bit 0 most significant.
pub fn sbox_bits(x: u8) -> Vec<bool> {
    let y = AES_SBOX[x as usize];
    (0..8)
        .map(|i| x >> (7 - i) & 1 == 1)
        .chain((0..8).map(|i| y >> (7 - i) & 1 == 1))
        .collect()
}

/// Sum of `coeff * product` for a formula written as `[(coeff, [names])]`,
/// with names resolved by `lookup`.
pub fn named_poly(n: usize, terms: &[(i64, &[&str])], lookup: impl Fn(&str) -> usize) -> Polynomial {
    Polynomial::from_terms(
        n,
        terms.iter().map(|(c, names)| {
            let ix: Vec<usize> = names.iter().map(|s| lookup(s)).collect();
            (if ix.is_empty() { Monomial::one() } else { mono(&ix) }, *c)
        }),
    )
    .unwrap()
}
