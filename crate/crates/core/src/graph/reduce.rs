use std::collections::{BTreeSet, HashMap};

use super::build_conflict_graph;
use crate::error::Result;
use crate::pbf::{Assignment, LiteralSet, Posiform};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphEvent {
    /// An isolated term was forced to 1; its weight went to the constant.
    Fixed { term: LiteralSet, weight: i64 },
    /// `absorbed` had the same neighbourhood as `surviving`; its weight moved over.
    Merged {
        absorbed: LiteralSet,
        surviving: LiteralSet,
        weight: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphReductionLog {
    pub events: Vec<GraphEvent>,
}

impl GraphReductionLog {
    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn extend(&mut self, other: GraphReductionLog) {
        self.events.extend(other.events);
    }

    /// Turns a maximiser of the reduced posiform into a maximiser of the
    /// original by replaying events backwards.
    pub fn lift(&self, a: &Assignment) -> Assignment {
        let mut a = a.clone();
        for e in self.events.iter().rev() {
            match e {
                GraphEvent::Fixed { term, .. } => set_true(&mut a, term),
                GraphEvent::Merged {
                    absorbed, surviving, ..
                } => {
                    if surviving.value(&a) {
                        set_true(&mut a, absorbed);
                    }
                }
            }
        }
        a
    }
}

fn set_true(a: &mut Assignment, t: &LiteralSet) {
    for l in t.literals() {
        a.set(l.var, !l.negated);
    }
}

/// An isolated term equals 1 at every maximum, so its literals are
/// forced and substituted into the other terms. Repeats until no vertex is
/// isolated.
pub fn fix_isolated_vertices(phi: &Posiform) -> Result<(Posiform, GraphReductionLog)> {
    let mut phi = phi.clone();
    let mut log = GraphReductionLog::default();
    loop {
        let g = build_conflict_graph(&phi);
        let Some(v) = (0..g.len()).find(|v| g.is_isolated(*v)) else {
            return Ok((phi, log));
        };
        let term = g.vertices()[v].term.clone().expect("built from a posiform");
        let weight = g.weight(v);
        phi = force_true(&phi, &term)?;
        log.events.push(GraphEvent::Fixed { term, weight });
    }
}

/// Sets every literal of `term` to 1 and simplifies.
fn force_true(phi: &Posiform, term: &LiteralSet) -> Result<Posiform> {
    let mut constant = phi.constant();
    let mut out = Vec::with_capacity(phi.len());
    for (t, w) in phi.terms() {
        let rest: Vec<_> = t.literals().iter().copied().filter(|l| !term.contains(*l)).collect();
        debug_assert!(
            !rest.iter().any(|l| term.contains(l.complement())),
            "isolated term conflicts with {t}"
        );
        if rest.is_empty() {
            constant = crate::error::checked::add(constant, w, "constant absorption")?;
        } else if rest.len() == t.len() {
            out.push((t.clone(), w));
        } else {
            out.push((LiteralSet::new(rest)?, w));
        }
    }
    Posiform::new(phi.n(), constant, out)?.normalized()
}

/// Two non-adjacent vertices with the same open neighbourhood can be
/// merged. Equal open neighbourhoods already rule out adjacency.
///
/// Each round groups vertices by neighbourhood; within a group the first
/// term in canonical order absorbs the others. Rounds repeat until no twins
/// remain, since removals can make new twins.
pub fn merge_twin_vertices(phi: &Posiform) -> Result<(Posiform, GraphReductionLog)> {
    let mut phi = phi.clone();
    let mut log = GraphReductionLog::default();
    loop {
        let g = build_conflict_graph(&phi);
        let mut first_with: HashMap<&BTreeSet<usize>, usize> = HashMap::new();
        let mut merges = Vec::new();
        for v in 0..g.len() {
            match first_with.get(g.neighbors(v)) {
                Some(&s) => merges.push((v, s)),
                None => {
                    first_with.insert(g.neighbors(v), v);
                }
            }
        }
        if merges.is_empty() {
            return Ok((phi, log));
        }
        let term = |v: usize| g.vertices()[v].term.clone().expect("built from a posiform");
        for (absorbed, surviving) in merges {
            let (a, s, weight) = (term(absorbed), term(surviving), g.weight(absorbed));
            phi.remove_term(&a);
            phi.add_term(s.clone(), weight)?;
            log.events.push(GraphEvent::Merged {
                absorbed: a,
                surviving: s,
                weight,
            });
        }
    }
}

/// Alternates [`fix_isolated_vertices`] and [`merge_twin_vertices`] until
/// neither applies.
pub fn reduce_fixpoint(phi: &Posiform) -> Result<(Posiform, GraphReductionLog)> {
    let mut phi = phi.clone();
    let mut log = GraphReductionLog::default();
    loop {
        let (p1, l1) = fix_isolated_vertices(&phi)?;
        let (p2, l2) = merge_twin_vertices(&p1)?;
        let done = l1.is_empty() && l2.is_empty();
        log.extend(l1);
        log.extend(l2);
        phi = p2;
        if done {
            return Ok((phi, log));
        }
    }
}
