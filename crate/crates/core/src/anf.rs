//! GF(2) equation systems in algebraic normal form and their compilation
//! to QUBO through integer carry expansion.
//!
//! Text format, one equation per line:
//!
//! ```text
//! # comment
//! x0*y2 + x0 + 1 = 0
//! a*b + c = 1
//! ```
//!
//! `*` is AND, `+` is XOR, `1` is the constant. The `= 0` suffix is
//! optional; `= 1` folds the constant into the left side.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{checked, Error, Result};
use crate::pbf::{Assignment, Monomial, Polynomial, VariableId};
use crate::quadratize::{reduce_alg3, EquationSystem, ReductionTrace};
use crate::qubo::{poly_to_qubo, QuboModel};

/// XOR of monomials, read as `= 0`. The empty monomial is the constant 1.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct BooleanEquation {
    monomials: BTreeSet<Monomial>,
}

impl BooleanEquation {
    /// Repeated monomials cancel in pairs.
    pub fn new(monomials: impl IntoIterator<Item = Monomial>) -> Self {
        let mut eq = BooleanEquation::default();
        for m in monomials {
            eq.toggle(m);
        }
        eq
    }

    fn toggle(&mut self, m: Monomial) {
        if !self.monomials.remove(&m) {
            self.monomials.insert(m);
        }
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> + '_ {
        self.monomials.iter()
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.monomials.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn max_var_index(&self) -> usize {
        self.monomials
            .iter()
            .filter_map(|m| m.max_var())
            .map(VariableId::index)
            .max()
            .unwrap_or(0)
    }

    /// XOR of the monomials at `a`.
    pub fn value(&self, a: &Assignment) -> bool {
        self.monomials.iter().filter(|m| m.value(a)).count() % 2 == 1
    }

    pub fn holds(&self, a: &Assignment) -> bool {
        !self.value(a)
    }

    /// Substitute a constant for `v`.
    pub fn fix(&self, v: VariableId, bit: bool) -> BooleanEquation {
        let mut out = BooleanEquation::default();
        for m in &self.monomials {
            if !m.contains(v) {
                out.toggle(m.clone());
            } else if bit {
                out.toggle(Monomial::new(m.vars().iter().copied().filter(|u| *u != v)));
            }
        }
        out
    }
}

/// Named equations over `x_1..x_n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnfSystem {
    names: Vec<String>,
    equations: Vec<BooleanEquation>,
}

impl AnfSystem {
    pub fn new(names: Vec<String>, equations: Vec<BooleanEquation>) -> Result<Self> {
        let n = names.len();
        if let Some(eq) = equations.iter().find(|e| e.max_var_index() > n) {
            return Err(Error::Dimension {
                expected: n,
                found: eq.max_var_index(),
            });
        }
        Ok(AnfSystem { names, equations })
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: VariableId) -> &str {
        &self.names[v.slot()]
    }

    pub fn var(&self, name: &str) -> Option<VariableId> {
        let k = self.names.iter().position(|s| s == name)?;
        Some(VariableId::from_index(k + 1))
    }

    pub fn equations(&self) -> &[BooleanEquation] {
        &self.equations
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn is_satisfied(&self, a: &Assignment) -> Result<bool> {
        a.check_len(self.n())?;
        Ok(self.equations.iter().all(|e| e.holds(a)))
    }

    pub fn fix(&self, fixes: &[(VariableId, bool)]) -> Result<AnfSystem> {
        let mut seen = BTreeMap::new();
        for (v, b) in fixes {
            if v.index() > self.n() {
                return Err(Error::arg(format!(
                    "cannot fix {v}: the system has {} variables",
                    self.n()
                )));
            }
            if seen.insert(*v, *b).is_some_and(|old| old != *b) {
                return Err(Error::arg(format!("{} fixed to both values", self.name(*v))));
            }
        }
        let equations = self
            .equations
            .iter()
            .map(|e| seen.iter().fold(e.clone(), |e, (v, b)| e.fix(*v, *b)))
            .collect();
        Ok(AnfSystem {
            names: self.names.clone(),
            equations,
        })
    }

    /// Parse `name=bit` pairs separated by commas.
    pub fn parse_fixes(&self, spec: &str) -> Result<Vec<(VariableId, bool)>> {
        let mut out = Vec::new();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let Some((name, bit)) = item.split_once('=') else {
                return Err(Error::arg(format!("fixing {item:?} is not name=bit")));
            };
            let v = self
                .var(name.trim())
                .ok_or_else(|| Error::arg(format!("unknown variable {:?}", name.trim())))?;
            let bit = match bit.trim() {
                "0" => false,
                "1" => true,
                other => return Err(Error::arg(format!("bit must be 0 or 1, found {other:?}"))),
            };
            out.push((v, bit));
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for eq in &self.equations {
            let terms: Vec<String> = eq
                .monomials()
                .map(|m| {
                    if m.is_one() {
                        "1".to_string()
                    } else {
                        m.vars().iter().map(|v| self.name(*v)).collect::<Vec<_>>().join("*")
                    }
                })
                .collect();
            if terms.is_empty() {
                s.push_str("0 = 0\n");
            } else {
                s.push_str(&terms.join(" + "));
                s.push_str(" = 0\n");
            }
        }
        s
    }
}

fn natural_key(name: &str) -> (String, Option<u64>, String) {
    let digits = name.len() - name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    let (stem, num) = name.split_at(name.len() - digits);
    (stem.to_string(), num.parse().ok(), name.to_string())
}

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Ident(&'a str),
    Const(bool),
    Plus,
    Star,
    Eq,
}

/// Parse ANF text. Variables are numbered in natural order of their names
/// (`x2` before `x10`).
pub fn parse_anf(text: &str) -> Result<AnfSystem> {
    let mut raw: Vec<Vec<Vec<&str>>> = Vec::new();
    let mut constants: Vec<bool> = Vec::new();
    let mut pos = 0usize;
    for (lineno, line) in text.split_inclusive('\n').enumerate() {
        let start = pos;
        pos += line.len();
        let body = line.split('#').next().unwrap_or("");
        // Positions are byte indices into `body`.
        let err = |at: usize, msg: String| Error::Parse {
            line: lineno + 1,
            column: body[..at].chars().count() + 1,
            offset: start + at,
            message: msg,
        };
        let toks = lex(body).map_err(|(col, msg)| err(col, msg))?;
        if toks.is_empty() {
            continue;
        }
        let end_col = body.trim_end().len();
        // Left side: terms separated by '+', factors by '*'.
        let mut terms: Vec<Vec<&str>> = Vec::new();
        let mut constant = false;
        let mut k = 0;
        loop {
            let mut factors = Vec::new();
            let mut is_one = true;
            let mut is_zero = false;
            loop {
                match toks.get(k) {
                    Some((_, Tok::Ident(s))) => {
                        factors.push(*s);
                        is_one = false;
                    }
                    Some((_, Tok::Const(b))) => is_zero |= !b,
                    Some((col, t)) => return Err(err(*col, format!("expected a variable or constant, found {t:?}"))),
                    None => return Err(err(end_col, "expected a variable or constant".into())),
                }
                k += 1;
                if matches!(toks.get(k), Some((_, Tok::Star))) {
                    k += 1;
                } else {
                    break;
                }
            }
            if !is_zero {
                if is_one {
                    constant ^= true;
                } else {
                    terms.push(factors);
                }
            }
            match toks.get(k) {
                Some((_, Tok::Plus)) => k += 1,
                _ => break,
            }
        }
        match toks.get(k) {
            None => {}
            Some((_, Tok::Eq)) => {
                match toks.get(k + 1) {
                    Some((_, Tok::Const(b))) => constant ^= b,
                    Some((col, t)) => return Err(err(*col, format!("right side must be 0 or 1, found {t:?}"))),
                    None => return Err(err(end_col, "missing right side after '='".into())),
                }
                if let Some((col, t)) = toks.get(k + 2) {
                    return Err(err(*col, format!("unexpected {t:?} after the right side")));
                }
            }
            Some((col, t)) => return Err(err(*col, format!("unexpected {t:?}"))),
        }
        raw.push(terms);
        constants.push(constant);
    }

    let mut names: Vec<&str> = raw.iter().flatten().flatten().copied().collect();
    names.sort_by_key(|s| natural_key(s));
    names.dedup();
    let index: BTreeMap<&str, VariableId> = names
        .iter()
        .enumerate()
        .map(|(k, s)| (*s, VariableId::from_index(k + 1)))
        .collect();
    let equations = raw
        .into_iter()
        .zip(constants)
        .map(|(terms, c)| {
            let mut monomials: Vec<Monomial> = terms
                .into_iter()
                .map(|f| Monomial::new(f.into_iter().map(|s| index[s])))
                .collect();
            if c {
                monomials.push(Monomial::one());
            }
            BooleanEquation::new(monomials)
        })
        .collect();
    AnfSystem::new(names.into_iter().map(String::from).collect(), equations)
}

fn lex(body: &str) -> std::result::Result<Vec<(usize, Tok<'_>)>, (usize, String)> {
    let mut out = Vec::new();
    let bytes = body.as_bytes();
    let mut k = 0;
    while k < bytes.len() {
        let c = bytes[k] as char;
        let col = k;
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '*' => Tok::Star,
            '=' => Tok::Eq,
            '0' | '1' => {
                let end = k + bytes[k..]
                    .iter()
                    .take_while(|b| b.is_ascii_alphanumeric() || **b == b'_')
                    .count();
                if end != k + 1 {
                    return Err((col, format!("bad token {:?}", &body[k..end])));
                }
                Tok::Const(c == '1')
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let end = k + bytes[k..]
                    .iter()
                    .take_while(|b| b.is_ascii_alphanumeric() || **b == b'_')
                    .count();
                out.push((col, Tok::Ident(&body[k..end])));
                k = end;
                continue;
            }
            _ => {
                let ch = body[k..].chars().next().unwrap();
                return Err((col, format!("unexpected character {ch:?}")));
            }
        };
        out.push((col, tok));
        k += 1;
    }
    Ok(out)
}

/// The integer form of one equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarryExpansion {
    /// Integer sum of the monomials.
    pub base: Polynomial,
    pub m_f: usize,
    /// Carry variables with their weights, heaviest first.
    pub carries: Vec<(VariableId, i64)>,
}

impl CarryExpansion {
    pub fn t(&self) -> usize {
        self.carries.len()
    }
}

/// Smallest `t` whose carries `2, 4, .., 2^t` can sum to every even value up
/// to `m_f`.
pub fn carry_count(m_f: usize) -> usize {
    let even = (m_f / 2 * 2) as u128;
    let mut t = 0;
    while (1u128 << (t + 1)) - 2 < even {
        t += 1;
    }
    t
}

/// `f' = Σ monomials − Σ 2^i y_i`, with the carries numbered from `n + 1`.
/// The result lives over `n + t` variables.
pub fn to_pseudo_boolean(eq: &BooleanEquation, n: usize) -> Result<(Polynomial, CarryExpansion)> {
    if eq.max_var_index() > n {
        return Err(Error::Dimension {
            expected: n,
            found: eq.max_var_index(),
        });
    }
    let m_f = eq.len();
    let t = carry_count(m_f);
    let base = Polynomial::from_terms(n, eq.monomials().map(|m| (m.clone(), 1)))?;
    let carries: Vec<(VariableId, i64)> = (0..t)
        .map(|k| (VariableId::from_index(n + 1 + k), 1i64 << (t - k)))
        .collect();
    let mut f = base.with_n(n + t)?;
    for (v, w) in &carries {
        f = f.sub(&Polynomial::from_terms(n + t, [(Monomial::new([*v]), *w)])?)?;
    }
    Ok((f, CarryExpansion { base, m_f, carries }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnfReport {
    pub n_equations: usize,
    pub n_inputs: usize,
    pub n_fixed: usize,
    pub n_carries: usize,
    pub n_aux: usize,
    pub n_vars: usize,
    pub live_vars: usize,
    /// Largest monomial count over the (fixed) equations.
    pub max_m_f: usize,
    /// `inputs + aux + Σ ⌈log2 M_f⌉`.
    pub var_bound: usize,
    pub coeff_min: i64,
    pub coeff_max: i64,
}

#[derive(Debug, Clone)]
pub struct AnfCompilation {
    pub system: AnfSystem,
    pub fixed: Vec<(VariableId, bool)>,
    pub expansions: Vec<CarryExpansion>,
    pub equations: EquationSystem,
    pub trace: ReductionTrace,
    pub qubo: QuboModel,
    pub report: AnfReport,
}

impl AnfCompilation {
    /// System-variable values for a QUBO assignment, plus whether every
    /// substitution is consistent. Fixed variables take their fixed values.
    pub fn decode(&self, a: &Assignment) -> Result<(Assignment, bool)> {
        let (lifted, ok) = self.trace.lift(a)?;
        let mut bits = lifted.into_bits();
        bits.truncate(self.system.n());
        let mut out = Assignment::new(bits);
        for (v, b) in &self.fixed {
            out.set(*v, *b);
        }
        Ok((out, ok))
    }

    /// Display name for any QUBO variable.
    pub fn var_name(&self, v: VariableId) -> String {
        let n = self.system.n();
        if v.index() <= n {
            return self.system.name(v).to_string();
        }
        for (e, x) in self.expansions.iter().enumerate() {
            if let Some(k) = x.carries.iter().position(|(c, _)| *c == v) {
                return format!("carry{e}_{}", k + 1);
            }
        }
        match self.trace.records.iter().find(|r| r.aux == v) {
            Some(r) => {
                let parts: Vec<String> = r.replaced.vars().iter().map(|u| self.var_name(*u)).collect();
                format!("[{}]", parts.join("*"))
            }
            None => v.to_string(),
        }
    }
}

fn ceil_log2(m: usize) -> usize {
    if m <= 1 {
        0
    } else {
        (usize::BITS - (m - 1).leading_zeros()) as usize
    }
}

/// Fix, expand each equation with its carries, then quadratize the system
/// with shared product substitutions.
pub fn system_to_qubo(sys: &AnfSystem, fixes: &[(VariableId, bool)]) -> Result<AnfCompilation> {
    let fixed_sys = sys.fix(fixes)?;
    let n0 = sys.n();
    let mut n = n0;
    let mut polys = Vec::new();
    let mut expansions = Vec::new();
    for eq in fixed_sys.equations() {
        let (f, x) = to_pseudo_boolean(eq, n)?;
        n += x.t();
        polys.push(f);
        expansions.push(x);
    }
    let polys = polys.into_iter().map(|p| p.with_n(n)).collect::<Result<Vec<_>>>()?;
    let equations = EquationSystem::new(n, polys)?;
    let (g, trace) = reduce_alg3(&equations)?;
    let qubo = poly_to_qubo(&g)?;
    let stats = qubo.stats();
    let n_carries = n - n0;
    let mut var_bound = n0 + trace.len();
    for x in &expansions {
        var_bound = checked_usize(var_bound, ceil_log2(x.m_f))?;
    }
    let mut fixed: Vec<(VariableId, bool)> = fixes.to_vec();
    fixed.sort();
    fixed.dedup();
    let report = AnfReport {
        n_equations: fixed_sys.len(),
        n_inputs: n0,
        n_fixed: fixed.len(),
        n_carries,
        n_aux: trace.len(),
        n_vars: qubo.n(),
        live_vars: stats.live,
        max_m_f: expansions.iter().map(|x| x.m_f).max().unwrap_or(0),
        var_bound,
        coeff_min: stats.min_coeff,
        coeff_max: stats.max_coeff,
    };
    Ok(AnfCompilation {
        system: sys.clone(),
        fixed,
        expansions,
        equations,
        trace,
        qubo,
        report,
    })
}

fn checked_usize(a: usize, b: usize) -> Result<usize> {
    let s = checked::add(a as i64, b as i64, "variable bound")?;
    Ok(s as usize)
}

const AES_SBOX_ANF: &str = include_str!("../fixtures/aes_sbox.anf");

/// The 13 quadratic equations relating an AES S-box input `x0..x7` to its
/// output `y0..y7`; bit 0 is the most significant.
pub fn aes_sbox_system() -> AnfSystem {
    parse_anf(AES_SBOX_ANF).expect("fixture parses")
}

pub fn aes_sbox_text() -> &'static str {
    AES_SBOX_ANF
}

/// Equations `y_i + ANF_i(x) = 0` for a `bits`-bit S-box given by its table,
/// with `x_i = (x >> i) & 1`. Names are `x0..`, then `y0..`.
pub fn sbox_system(table: &[u32], bits: usize) -> Result<AnfSystem> {
    if bits == 0 || bits > 12 || table.len() != 1 << bits {
        return Err(Error::arg(format!(
            "table of length {} does not describe a {bits}-bit S-box",
            table.len()
        )));
    }
    if let Some(v) = table.iter().find(|v| **v >> bits != 0) {
        return Err(Error::arg(format!("table entry {v} exceeds {bits} bits")));
    }
    let names: Vec<String> = (0..bits)
        .map(|i| format!("x{i}"))
        .chain((0..bits).map(|i| format!("y{i}")))
        .collect();
    let mut equations = Vec::with_capacity(bits);
    for out in 0..bits {
        // Möbius transform of the output bit.
        let mut coef: Vec<u8> = table.iter().map(|v| ((v >> out) & 1) as u8).collect();
        for i in 0..bits {
            for s in 0..coef.len() {
                if s >> i & 1 == 1 {
                    coef[s] ^= coef[s ^ (1 << i)];
                }
            }
        }
        let mut monomials = vec![Monomial::new([VariableId::from_index(bits + out + 1)])];
        for (s, c) in coef.iter().enumerate() {
            if *c == 1 {
                monomials.push(Monomial::new(
                    (0..bits)
                        .filter(|i| s >> i & 1 == 1)
                        .map(|i| VariableId::from_index(i + 1)),
                ));
            }
        }
        equations.push(BooleanEquation::new(monomials));
    }
    AnfSystem::new(names, equations)
}
