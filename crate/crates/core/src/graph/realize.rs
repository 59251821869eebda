use std::collections::BTreeSet;

use super::ConflictGraph;
use crate::error::Result;
use crate::pbf::{Literal, LiteralSet, Posiform, VariableId};

/// Builds a posiform whose conflict graph is `g`, term `k` standing for
/// vertex `k`.
///
/// Edges are covered by bicliques found greedily from the smallest uncovered
/// edge; each biclique gets a fresh variable, positive on one side and
/// negated on the other. Vertices left without literals get a fresh positive
/// variable each, and vertices that end up with identical literal sets are
/// told apart by extra positive tag variables. Positive-only variables never
/// create conflicts, so adjacency is exactly the edge set of `g`.
pub fn realize_graph(g: &ConflictGraph) -> Result<(Posiform, Vec<LiteralSet>)> {
    let n = g.len();
    let mut lits: Vec<Vec<Literal>> = vec![Vec::new(); n];
    let mut covered: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut next_var = 1usize;
    let mut fresh = || {
        let v = VariableId::from_index(next_var);
        next_var += 1;
        v
    };

    let edges: Vec<(usize, usize)> = g.edges().collect();
    for &(u, v) in &edges {
        if covered.contains(&(u, v)) {
            continue;
        }
        let mut a = vec![u];
        let mut b = vec![v];
        grow(g, &covered, &a, &mut b);
        grow(g, &covered, &b, &mut a);
        grow(g, &covered, &a, &mut b);
        let y = fresh();
        for &x in &a {
            lits[x].push(Literal::pos(y));
        }
        for &x in &b {
            lits[x].push(Literal::neg(y));
        }
        for &x in &a {
            for &z in &b {
                covered.insert((x.min(z), x.max(z)));
            }
        }
    }

    for l in lits.iter_mut().filter(|l| l.is_empty()) {
        l.push(Literal::pos(fresh()));
    }

    // The j-th repeat of a literal set gets tag variable j.
    let mut tags: Vec<VariableId> = Vec::new();
    let mut seen: Vec<(Vec<Literal>, usize)> = Vec::new();
    for l in lits.iter_mut() {
        l.sort_unstable();
        let repeats = match seen.iter_mut().find(|(s, _)| s == l) {
            Some((_, c)) => {
                *c += 1;
                *c
            }
            None => {
                seen.push((l.clone(), 0));
                0
            }
        };
        if repeats > 0 {
            while tags.len() < repeats {
                tags.push(fresh());
            }
            l.push(Literal::pos(tags[repeats - 1]));
        }
    }

    let n_vars = next_var - 1;
    let sets = lits.into_iter().map(LiteralSet::new).collect::<Result<Vec<_>>>()?;
    let phi = Posiform::new(
        n_vars,
        0,
        sets.iter().cloned().zip(g.vertices().iter().map(|v| v.weight)),
    )?;
    Ok((phi, sets))
}

/// Adds to `side` every vertex adjacent to all of `other` that brings at
/// least one uncovered edge.
fn grow(g: &ConflictGraph, covered: &BTreeSet<(usize, usize)>, other: &[usize], side: &mut Vec<usize>) {
    for w in 0..g.len() {
        if side.contains(&w) || other.contains(&w) {
            continue;
        }
        if !other.iter().all(|o| g.adjacent(*o, w)) {
            continue;
        }
        let new_edge = other.iter().any(|o| !covered.contains(&((*o).min(w), (*o).max(w))));
        if new_edge {
            side.push(w);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_conflict_graph, mwis_bruteforce};

    fn same_graph(g: &ConflictGraph, phi: &Posiform, sets: &[LiteralSet]) {
        let h = build_conflict_graph(phi);
        assert_eq!(h.len(), g.len());
        // h's ids follow canonical term order; map through the literal sets.
        let pos: Vec<usize> = sets
            .iter()
            .map(|s| h.vertices().iter().position(|v| v.term.as_ref() == Some(s)).unwrap())
            .collect();
        for a in 0..g.len() {
            assert_eq!(h.weight(pos[a]), g.weight(a));
            for b in 0..g.len() {
                if a != b {
                    assert_eq!(h.adjacent(pos[a], pos[b]), g.adjacent(a, b), "pair {a},{b}");
                }
            }
        }
    }

    #[test]
    fn path_needs_two_variables() {
        let g = ConflictGraph::new(vec![17, 25, 8, 30], [(0, 1), (1, 2), (2, 3)]).unwrap();
        let (phi, sets) = realize_graph(&g).unwrap();
        assert_eq!(phi.n(), 2);
        same_graph(&g, &phi, &sets);
        assert_eq!(mwis_bruteforce(&g).unwrap().0, 55);
    }

    #[test]
    fn edgeless_gets_distinct_positive_literals() {
        let g = ConflictGraph::new(vec![3, 1, 4], []).unwrap();
        let (phi, sets) = realize_graph(&g).unwrap();
        assert_eq!(phi.n(), 3);
        assert!(sets.iter().all(|s| s.len() == 1 && !s.literals()[0].negated));
        same_graph(&g, &phi, &sets);
    }

    #[test]
    fn twins_are_kept_apart() {
        // Star: centre 0, leaves 1..3 are twins and would share a literal set.
        let g = ConflictGraph::new(vec![1, 2, 3, 4], [(0, 1), (0, 2), (0, 3)]).unwrap();
        let (phi, sets) = realize_graph(&g).unwrap();
        same_graph(&g, &phi, &sets);
        assert_eq!(phi.len(), 4);
    }
}
