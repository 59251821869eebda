//! Conflict graphs of posiforms and the reductions that shrink them.
//!
//! Vertex ids are 0-based positions; for a graph built from a posiform they
//! follow the posiform's canonical term order.

mod realize;
mod reduce;

pub use realize::realize_graph;
pub use reduce::{fix_isolated_vertices, merge_twin_vertices, reduce_fixpoint, GraphEvent, GraphReductionLog};

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pbf::{Literal, LiteralSet, Posiform};

/// Default vertex cap for [`mwis_bruteforce`].
pub const MWIS_CAP: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub weight: i64,
    /// The posiform term, when the graph came from one.
    pub term: Option<LiteralSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConflictGraph {
    vertices: Vec<Vertex>,
    adj: Vec<BTreeSet<usize>>,
}

impl ConflictGraph {
    /// Abstract weighted graph. Weights must be positive; self-loops and
    /// out-of-range endpoints are rejected.
    pub fn new(weights: Vec<i64>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| **w <= 0) {
            return Err(Error::arg(format!("vertex weight {w} is not positive")));
        }
        let n = weights.len();
        let mut adj = vec![BTreeSet::new(); n];
        for (a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::arg(format!("bad edge ({a}, {b}) for {n} vertices")));
            }
            adj[a].insert(b);
            adj[b].insert(a);
        }
        let vertices = weights
            .into_iter()
            .map(|weight| Vertex { weight, term: None })
            .collect();
        Ok(ConflictGraph { vertices, adj })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn weight(&self, v: usize) -> i64 {
        self.vertices[v].weight
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }

    pub fn is_isolated(&self, v: usize) -> bool {
        self.adj[v].is_empty()
    }

    /// Edges `(a, b)` with `a < b`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.range(a + 1..).map(move |b| (a, *b)))
    }

    pub fn n_edges(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(k, a)| set[k + 1..].iter().all(|b| !self.adjacent(*a, *b)))
    }

    /// Text export: `p <V> <E>`, then `v <id> <weight> <literal codes>`,
    /// then `e <a> <b>`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "p {} {}", self.len(), self.n_edges()).unwrap();
        for (id, v) in self.vertices.iter().enumerate() {
            write!(s, "v {id} {}", v.weight).unwrap();
            if let Some(t) = &v.term {
                for l in t.literals() {
                    write!(s, " {}", l.to_signed()).unwrap();
                }
            }
            s.push('\n');
        }
        for (a, b) in self.edges() {
            writeln!(s, "e {a} {b}").unwrap();
        }
        s
    }

    /// Inverse of [`ConflictGraph::to_text`]. Vertex lines must appear in id order.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        let mut offset = 0;
        for (lineno, line) in text.split_inclusive('\n').enumerate() {
            let start = offset;
            offset += line.len();
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse {
                line: lineno + 1,
                column: 1,
                offset: start,
                message: msg,
            };
            let toks: Vec<&str> = body.split_whitespace().collect();
            let num = |t: &str| {
                t.parse::<i64>()
                    .map_err(|_| err(format!("expected an integer, found {t:?}")))
            };
            match toks[0] {
                "p" if toks.len() == 3 && header.is_none() => {
                    header = Some((num(toks[1])? as usize, num(toks[2])? as usize));
                }
                "v" if toks.len() >= 3 => {
                    let id = num(toks[1])?;
                    if id != vertices.len() as i64 {
                        return Err(err(format!("vertex {id} out of order")));
                    }
                    let weight = num(toks[2])?;
                    if weight <= 0 {
                        return Err(err(format!("vertex weight {weight} is not positive")));
                    }
                    let term = if toks.len() > 3 {
                        let lits = toks[3..]
                            .iter()
                            .map(|t| num(t).and_then(|c| Literal::from_signed(c).map_err(|e| err(e.to_string()))))
                            .collect::<Result<Vec<_>>>()?;
                        Some(LiteralSet::new(lits).map_err(|e| err(e.to_string()))?)
                    } else {
                        None
                    };
                    vertices.push(Vertex { weight, term });
                }
                "e" if toks.len() == 3 => {
                    let (a, b) = (num(toks[1])?, num(toks[2])?);
                    if a < 0 || b < 0 {
                        return Err(err("negative vertex id".into()));
                    }
                    edges.push((a as usize, b as usize));
                }
                _ => return Err(err(format!("unrecognised line {body:?}"))),
            }
        }
        let (nv, ne) = header.ok_or_else(|| Error::Parse {
            line: 1,
            column: 1,
            offset: 0,
            message: "missing header line".into(),
        })?;
        let mut g = ConflictGraph::new(vertices.iter().map(|v| v.weight).collect(), edges)?;
        if g.len() != nv || g.n_edges() != ne {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                offset: 0,
                message: format!(
                    "header says {nv} vertices and {ne} edges, found {} and {}",
                    g.len(),
                    g.n_edges()
                ),
            });
        }
        for (slot, v) in g.vertices.iter_mut().zip(vertices) {
            slot.term = v.term;
        }
        Ok(g)
    }
}

/// One vertex per nonconstant term, an edge wherever one term holds a
/// literal whose complement is in the other. The constant is not a vertex.
pub fn build_conflict_graph(phi: &Posiform) -> ConflictGraph {
    let terms: Vec<(&LiteralSet, i64)> = phi.terms().collect();
    let mut by_literal: HashMap<Literal, Vec<usize>> = HashMap::new();
    for (id, (t, _)) in terms.iter().enumerate() {
        for l in t.literals() {
            by_literal.entry(*l).or_default().push(id);
        }
    }
    let mut adj = vec![BTreeSet::new(); terms.len()];
    for (id, (t, _)) in terms.iter().enumerate() {
        for l in t.literals() {
            if let Some(others) = by_literal.get(&l.complement()) {
                adj[id].extend(others.iter().copied());
            }
        }
    }
    let vertices = terms
        .iter()
        .map(|(t, w)| Vertex {
            weight: *w,
            term: Some((*t).clone()),
        })
        .collect();
    ConflictGraph { vertices, adj }
}

/// Exact maximum-weight independent set by include-first branch and bound.
///
/// Among optimal sets the lexicographically smallest id sequence is
/// returned: the include-first search meets it before any other optimum,
/// and later ties are pruned.
pub fn mwis_bruteforce(g: &ConflictGraph) -> Result<(i64, Vec<usize>)> {
    mwis_bruteforce_capped(g, MWIS_CAP)
}

pub fn mwis_bruteforce_capped(g: &ConflictGraph, cap: usize) -> Result<(i64, Vec<usize>)> {
    let n = g.len();
    if n > cap || n > 63 {
        return Err(Error::Cap {
            what: "MWIS graph",
            size: n,
            cap: cap.min(63),
        });
    }
    let adj: Vec<u64> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, u| m | 1 << u))
        .collect();
    let w: Vec<i64> = (0..n).map(|v| g.weight(v)).collect();
    let mut s = Search {
        adj: &adj,
        w: &w,
        best: -1,
        best_set: 0,
    };
    let all = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
    s.dfs(all, 0, 0);
    let set = (0..n).filter(|v| s.best_set >> v & 1 == 1).collect();
    Ok((s.best.max(0), set))
}

struct Search<'a> {
    adj: &'a [u64],
    w: &'a [i64],
    best: i64,
    best_set: u64,
}

impl Search<'_> {
    fn dfs(&mut self, cand: u64, chosen: u64, cur: i64) {
        if cand == 0 {
            if cur > self.best {
                self.best = cur;
                self.best_set = chosen;
            }
            return;
        }
        let mut bound = cur;
        let mut m = cand;
        while m != 0 {
            bound += self.w[m.trailing_zeros() as usize];
            m &= m - 1;
        }
        if bound <= self.best {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        let rest = cand & !(1 << v);
        self.dfs(rest & !self.adj[v], chosen | 1 << v, cur + self.w[v]);
        self.dfs(rest, chosen, cur);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_term_graph() {
        let phi = Posiform::from_codes(2, 0, &[(&[1, -2], 4)]).unwrap();
        let g = build_conflict_graph(&phi);
        assert_eq!((g.len(), g.n_edges()), (1, 0));
    }

    #[test]
    fn path_mwis() {
        let g = ConflictGraph::new(vec![17, 25, 8, 30], [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(mwis_bruteforce(&g).unwrap(), (55, vec![1, 3]));
    }

    #[test]
    fn edgeless_mwis_takes_everything() {
        let g = ConflictGraph::new(vec![1, 2, 3], []).unwrap();
        assert_eq!(mwis_bruteforce(&g).unwrap(), (6, vec![0, 1, 2]));
        assert_eq!(mwis_bruteforce(&ConflictGraph::default()).unwrap(), (0, vec![]));
    }

    #[test]
    fn tie_break_prefers_smallest_ids() {
        // Triangle of equal weights: {0} wins.
        let g = ConflictGraph::new(vec![5, 5, 5], [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(mwis_bruteforce(&g).unwrap(), (5, vec![0]));
    }

    #[test]
    fn cap_is_enforced() {
        let g = ConflictGraph::new(vec![1; 31], []).unwrap();
        assert!(matches!(mwis_bruteforce(&g), Err(Error::Cap { .. })));
    }

    #[test]
    fn text_round_trip() {
        let phi = Posiform::from_codes(3, 2, &[(&[1], 3), (&[-1, 2], 4), (&[-2, 3], 1)]).unwrap();
        let g = build_conflict_graph(&phi);
        let text = g.to_text();
        assert_eq!(text, "p 3 2\nv 0 3 1\nv 1 4 -1 2\nv 2 1 -2 3\ne 0 1\ne 1 2\n");
        assert_eq!(ConflictGraph::from_text(&text).unwrap(), g);
        assert!(ConflictGraph::from_text("p 1 0\nv 0 -3\n").is_err());
    }
}
