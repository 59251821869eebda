//! JSON forms of the model types. Unknown fields are rejected and syntax
//! errors carry a byte offset.
//!
//! ```text
//! polynomial  {"n": 3, "constant": 5, "terms": [{"vars": [1, 2], "coeff": -3}]}
//! posiform    {"n": 2, "constant": 0, "terms": [{"literals": [1, -2], "weight": 4}]}
//! system      {"n": 3, "equations": [<polynomial>, ...]}
//! trace       {"original_n": 3, "records": [{"aux": 4, "replaced": [1, 2]}]}
//! qubo        {"n": 2, "offset": 0, "diagonal": [1, -2], "offdiag": [{"i": 1, "j": 2, "value": 3}]}
//! ising       {"n": 2, "scale": 4, "offset": 8, "h": [-2, 1], "j": [{"i": 1, "j": 2, "value": 3}]}
//! ```
//!
//! Ising values are integers scaled by `scale` (always 4).

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pbf::{Literal, LiteralSet, Monomial, Polynomial, Posiform, VariableId};
use crate::quadratize::{EquationSystem, ReductionTrace, SubstitutionRecord};
use crate::qubo::{IsingModel, Quarter, QuboModel};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub vars: Vec<u32>,
    pub coeff: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialJson {
    pub n: usize,
    pub constant: i64,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosiformTermJson {
    pub literals: Vec<i64>,
    pub weight: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosiformJson {
    pub n: usize,
    pub constant: i64,
    pub terms: Vec<PosiformTermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemJson {
    pub n: usize,
    pub equations: Vec<PolynomialJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordJson {
    pub aux: u32,
    pub replaced: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceJson {
    pub original_n: usize,
    pub records: Vec<RecordJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryJson {
    pub i: usize,
    pub j: usize,
    pub value: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuboJson {
    pub n: usize,
    pub offset: i64,
    pub diagonal: Vec<i64>,
    pub offdiag: Vec<EntryJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsingJson {
    pub n: usize,
    pub scale: i64,
    pub offset: i64,
    pub h: Vec<i64>,
    pub j: Vec<EntryJson>,
}

fn monomial(vars: &[u32]) -> Result<Monomial> {
    let ids = vars.iter().map(|v| VariableId::new(*v)).collect::<Result<Vec<_>>>()?;
    let m = Monomial::new(ids.iter().copied());
    if m.degree() != vars.len() {
        return Err(Error::arg(format!("repeated variable in {vars:?}")));
    }
    Ok(m)
}

fn index_list(m: &Monomial) -> Vec<u32> {
    m.vars().iter().map(|v| v.index() as u32).collect()
}

impl From<&Polynomial> for PolynomialJson {
    fn from(p: &Polynomial) -> Self {
        PolynomialJson {
            n: p.n(),
            constant: p.constant_term(),
            terms: p
                .nonconstant_terms()
                .map(|(m, c)| TermJson {
                    vars: index_list(m),
                    coeff: c,
                })
                .collect(),
        }
    }
}

impl TryFrom<PolynomialJson> for Polynomial {
    type Error = Error;
    fn try_from(j: PolynomialJson) -> Result<Polynomial> {
        let mut terms = vec![(Monomial::one(), j.constant)];
        for t in &j.terms {
            if t.vars.is_empty() {
                return Err(Error::arg("a term with no variables; use \"constant\""));
            }
            terms.push((monomial(&t.vars)?, t.coeff));
        }
        Polynomial::from_terms(j.n, terms)
    }
}

impl From<&Posiform> for PosiformJson {
    fn from(p: &Posiform) -> Self {
        PosiformJson {
            n: p.n(),
            constant: p.constant(),
            terms: p
                .terms()
                .map(|(t, w)| PosiformTermJson {
                    literals: t.literals().iter().map(|l| l.to_signed()).collect(),
                    weight: w,
                })
                .collect(),
        }
    }
}

impl TryFrom<PosiformJson> for Posiform {
    type Error = Error;
    fn try_from(j: PosiformJson) -> Result<Posiform> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            let lits = t
                .literals
                .iter()
                .map(|c| Literal::from_signed(*c))
                .collect::<Result<Vec<_>>>()?;
            let set = LiteralSet::new(lits)?;
            if set.len() != t.literals.len() {
                return Err(Error::arg(format!("repeated literal in {:?}", t.literals)));
            }
            terms.push((set, t.weight));
        }
        Posiform::new(j.n, j.constant, terms)
    }
}

impl From<&EquationSystem> for SystemJson {
    fn from(s: &EquationSystem) -> Self {
        SystemJson {
            n: s.n(),
            equations: s.polys().iter().map(PolynomialJson::from).collect(),
        }
    }
}

impl TryFrom<SystemJson> for EquationSystem {
    type Error = Error;
    fn try_from(j: SystemJson) -> Result<EquationSystem> {
        let polys = j
            .equations
            .into_iter()
            .map(Polynomial::try_from)
            .collect::<Result<Vec<_>>>()?;
        EquationSystem::new(j.n, polys)
    }
}

impl From<&ReductionTrace> for TraceJson {
    fn from(t: &ReductionTrace) -> Self {
        TraceJson {
            original_n: t.original_n,
            records: t
                .records
                .iter()
                .map(|r| RecordJson {
                    aux: r.aux.index() as u32,
                    replaced: index_list(&r.replaced),
                })
                .collect(),
        }
    }
}

impl TryFrom<TraceJson> for ReductionTrace {
    type Error = Error;
    fn try_from(j: TraceJson) -> Result<ReductionTrace> {
        let records = j
            .records
            .iter()
            .map(|r| {
                Ok(SubstitutionRecord {
                    aux: VariableId::new(r.aux)?,
                    replaced: monomial(&r.replaced)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ReductionTrace::from_records(j.original_n, records)
    }
}

fn entries<T: Copy>(m: &BTreeMap<(usize, usize), T>, f: impl Fn(T) -> i64) -> Vec<EntryJson> {
    m.iter()
        .map(|((i, j), v)| EntryJson {
            i: *i,
            j: *j,
            value: f(*v),
        })
        .collect()
}

fn check_entries(n: usize, e: &[EntryJson]) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for x in e {
        if !(1 <= x.i && x.i < x.j && x.j <= n) {
            return Err(Error::arg(format!("entry ({}, {}) invalid for n = {n}", x.i, x.j)));
        }
        if !seen.insert((x.i, x.j)) {
            return Err(Error::arg(format!("duplicate entry ({}, {})", x.i, x.j)));
        }
    }
    Ok(())
}

impl From<&QuboModel> for QuboJson {
    fn from(q: &QuboModel) -> Self {
        QuboJson {
            n: q.n(),
            offset: q.offset(),
            diagonal: q.diagonal().to_vec(),
            offdiag: entries(q.offdiag(), |v| v),
        }
    }
}

impl TryFrom<QuboJson> for QuboModel {
    type Error = Error;
    fn try_from(j: QuboJson) -> Result<QuboModel> {
        check_entries(j.n, &j.offdiag)?;
        QuboModel::new(
            j.n,
            j.diagonal,
            j.offdiag.iter().map(|e| ((e.i, e.j), e.value)),
            j.offset,
        )
    }
}

impl From<&IsingModel> for IsingJson {
    fn from(m: &IsingModel) -> Self {
        IsingJson {
            n: m.n,
            scale: 4,
            offset: m.offset.0,
            h: m.h.iter().map(|h| h.0).collect(),
            j: entries(&m.j, |v: Quarter| v.0),
        }
    }
}

impl TryFrom<IsingJson> for IsingModel {
    type Error = Error;
    fn try_from(j: IsingJson) -> Result<IsingModel> {
        if j.scale != 4 {
            return Err(Error::arg(format!("scale must be 4, found {}", j.scale)));
        }
        check_entries(j.n, &j.j)?;
        let couplings = j.j.iter().map(|e| ((e.i, e.j), Quarter(e.value))).collect();
        IsingModel::new(
            j.n,
            j.h.into_iter().map(Quarter).collect(),
            couplings,
            Quarter(j.offset),
        )
    }
}

/// Deserialize with a byte-offset diagnostic on syntax or shape errors.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| json_error(text, &e))
}

fn json_error(text: &str, e: &serde_json::Error) -> Error {
    let offset = if e.is_eof() {
        text.len()
    } else {
        let mut off = 0usize;
        for (k, l) in text.split_inclusive('\n').enumerate() {
            if k + 1 == e.line() {
                off += l
                    .char_indices()
                    .nth(e.column().saturating_sub(1))
                    .map_or(l.len(), |(b, _)| b);
                break;
            }
            off += l.len();
        }
        off.min(text.len())
    };
    let message = e.to_string();
    let message = message.split(" at line ").next().unwrap_or(&message).to_string();
    Error::Parse {
        line: e.line().max(1),
        column: e.column().max(1),
        offset,
        message,
    }
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("model types serialize")
}

pub fn polynomial_to_json(p: &Polynomial) -> String {
    to_json(&PolynomialJson::from(p))
}

pub fn polynomial_from_json(text: &str) -> Result<Polynomial> {
    from_json::<PolynomialJson>(text)?.try_into()
}

pub fn posiform_to_json(p: &Posiform) -> String {
    to_json(&PosiformJson::from(p))
}

pub fn posiform_from_json(text: &str) -> Result<Posiform> {
    from_json::<PosiformJson>(text)?.try_into()
}

pub fn system_to_json(s: &EquationSystem) -> String {
    to_json(&SystemJson::from(s))
}

pub fn system_from_json(text: &str) -> Result<EquationSystem> {
    from_json::<SystemJson>(text)?.try_into()
}

pub fn trace_to_json(t: &ReductionTrace) -> String {
    to_json(&TraceJson::from(t))
}

pub fn trace_from_json(text: &str) -> Result<ReductionTrace> {
    from_json::<TraceJson>(text)?.try_into()
}

pub fn qubo_to_json(q: &QuboModel) -> String {
    to_json(&QuboJson::from(q))
}

pub fn qubo_from_json(text: &str) -> Result<QuboModel> {
    from_json::<QuboJson>(text)?.try_into()
}

pub fn ising_to_json(m: &IsingModel) -> String {
    to_json(&IsingJson::from(m))
}

pub fn ising_from_json(text: &str) -> Result<IsingModel> {
    from_json::<IsingJson>(text)?.try_into()
}
