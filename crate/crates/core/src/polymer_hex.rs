//! Self-avoiding walks and loops on the honeycomb lattice.
//!
//! Walks grow from directed *start bonds* (a boundary vertex and its
//! neighbour inside the volume) and must end on a designated end vertex.
//! Their interior vertices may not touch the endpoint pools or the avoid
//! set, and the walk must meet a must-intersect set.  A walk whose reversal
//! also satisfies the constraints is reported once.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::lattice::{adjacent, hex_neighbors, DirectedEdge, Edge, LatticeKind, Vertex};
use crate::search::{self, Query};

/// Errors raised by the enumerators.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolymerError {
    #[error("length must be at least {min}, got {got}")]
    TooShort { min: usize, got: usize },
    #[error("loops on a bipartite lattice have even length, got {0}")]
    OddLoop(usize),
    #[error("vertex sequence is not a valid {0}")]
    Invalid(&'static str),
    #[error("edge {edge} is not incident to {vertex}")]
    NotIncident { vertex: Vertex, edge: Edge },
}

/// A self-avoiding walk, stored as its vertex sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Walk {
    vertices: Vec<Vertex>,
}

impl Walk {
    /// Validates adjacency and vertex-distinctness.
    pub fn new(vertices: Vec<Vertex>) -> Result<Self, PolymerError> {
        if vertices.len() < 2 {
            return Err(PolymerError::Invalid("walk"));
        }
        let distinct: BTreeSet<_> = vertices.iter().collect();
        let steps_ok = vertices
            .windows(2)
            .all(|p| adjacent(p[0], p[1], LatticeKind::Hexagonal));
        if distinct.len() != vertices.len() || !steps_ok {
            return Err(PolymerError::Invalid("walk"));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 2
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.vertices.windows(2).map(|p| Edge::between(p[0], p[1])).collect()
    }

    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Self { vertices }
    }

    /// The lexicographically smaller of the walk and its reversal.
    pub fn canonical(&self) -> Self {
        let r = self.reversed();
        if r.vertices < self.vertices {
            r
        } else {
            self.clone()
        }
    }
}

/// A closed self-avoiding loop, stored as a cyclic vertex sequence (the
/// first vertex is not repeated).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Loop {
    vertices: Vec<Vertex>,
}

/// Lexicographically smallest rotation of `seq` or of its reversal.
pub(crate) fn min_cyclic<T: Ord + Clone>(seq: &[T]) -> Vec<T> {
    let n = seq.len();
    let mut best: Option<Vec<T>> = None;
    let mut rev = seq.to_vec();
    rev.reverse();
    for s in [seq, rev.as_slice()] {
        for r in 0..n {
            let cand: Vec<T> = s[r..].iter().chain(&s[..r]).cloned().collect();
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}

impl Loop {
    /// Validates closure, adjacency and vertex-distinctness.
    pub fn new(vertices: Vec<Vertex>) -> Result<Self, PolymerError> {
        let n = vertices.len();
        if n < 4 {
            return Err(PolymerError::Invalid("loop"));
        }
        let distinct: BTreeSet<_> = vertices.iter().collect();
        let closed = (0..n).all(|i| adjacent(vertices[i], vertices[(i + 1) % n], LatticeKind::Hexagonal));
        if distinct.len() != n || !closed {
            return Err(PolymerError::Invalid("loop"));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> Vec<Edge> {
        let n = self.vertices.len();
        (0..n).map(|i| Edge::between(self.vertices[i], self.vertices[(i + 1) % n])).collect()
    }

    /// Smallest representative over all rotations and both orientations.
    pub fn canonical(&self) -> Self {
        Self { vertices: min_cyclic(&self.vertices) }
    }
}

/// Constraints of one enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationConstraints {
    pub length: usize,
    /// Directed bonds a walk must begin with.
    pub start_edges: Vec<DirectedEdge>,
    /// Bonds whose boundary vertices are the admissible final vertices.
    pub end_edges: Vec<DirectedEdge>,
    /// The walk must share at least one vertex with this set.
    pub must_intersect: Vec<Vertex>,
    /// Vertices forbidden in the interior of the walk.
    pub avoid: Vec<Vertex>,
}

/// Boundary vertices of a list of spoke bonds.
pub fn firsts(edges: &[DirectedEdge]) -> Vec<Vertex> {
    edges.iter().map(|e| e.from).collect()
}

/// Inner endpoints of a list of spoke bonds.
pub fn tips(edges: &[DirectedEdge]) -> Vec<Vertex> {
    edges.iter().map(|e| e.to).collect()
}

impl EnumerationConstraints {
    /// Walks between two pools whose interior avoids both pools.
    pub fn between_pools(
        length: usize,
        start_edges: Vec<DirectedEdge>,
        end_edges: Vec<DirectedEdge>,
        must_intersect: Vec<Vertex>,
    ) -> Self {
        let mut avoid = firsts(&start_edges);
        avoid.extend(firsts(&end_edges));
        Self { length, start_edges, end_edges, must_intersect, avoid }
    }

    pub(crate) fn query(&self, max_len: usize, closed: bool) -> Query {
        Query {
            lattice: LatticeKind::Hexagonal,
            starts: self.start_edges.clone(),
            ends: firsts(&self.end_edges),
            avoid: self.avoid.clone(),
            groups: vec![self.must_intersect.clone()],
            max_len,
            closed,
        }
    }
}

/// All walks satisfying `c`, each in canonical form.
pub fn generate_walks(c: &EnumerationConstraints) -> Result<BTreeSet<Walk>, PolymerError> {
    if c.length < 1 {
        return Err(PolymerError::TooShort { min: 1, got: c.length });
    }
    let out = search::run(&c.query(c.length, false), true);
    Ok(out
        .paths
        .into_iter()
        .filter(|p| p.len() == c.length + 1)
        .map(|p| Walk { vertices: p }.canonical())
        .collect())
}

/// Number of walks satisfying `c` (without materialising them).
pub fn count_walks(c: &EnumerationConstraints) -> u64 {
    if c.length < 1 {
        return 0;
    }
    search::run(&c.query(c.length, false), false).at(c.length)
}

/// Counts for every length `1..=max_len` under the pools and sets of `c`
/// (its `length` field is ignored); index `k` of the result is length `k`.
pub fn count_walks_by_length(c: &EnumerationConstraints, max_len: usize) -> Vec<u64> {
    let out = search::run(&c.query(max_len, false), false);
    (0..=max_len).map(|k| out.at(k)).collect()
}

/// Like [`count_walks_by_length`], but with one must-intersect set per
/// group: `result[g][k]` counts the walks of length `k` meeting group `g`.
pub fn count_walks_grouped(
    c: &EnumerationConstraints,
    groups: &[Vec<Vertex>],
    max_len: usize,
) -> Vec<Vec<u64>> {
    let mut q = c.query(max_len, false);
    q.groups = groups.to_vec();
    let out = search::run(&q, false);
    (0..groups.len())
        .map(|g| (0..=max_len).map(|k| out.counts[k][g]).collect())
        .collect()
}

/// Closed loops through the start bonds of `c` (returning to the start
/// vertex), deduplicated under rotation and reversal.
pub fn generate_loops(c: &EnumerationConstraints) -> Result<BTreeSet<Loop>, PolymerError> {
    if c.length % 2 == 1 {
        return Err(PolymerError::OddLoop(c.length));
    }
    if c.length < 6 {
        return Err(PolymerError::TooShort { min: 6, got: c.length });
    }
    let out = search::run(&c.query(c.length, true), true);
    Ok(out
        .paths
        .into_iter()
        .filter(|p| p.len() == c.length + 1 && p[0] == p[c.length])
        .map(|mut p| {
            p.pop();
            Loop { vertices: p }.canonical()
        })
        .collect())
}

/// Loops through a single bond `(v, w)`, for every even length up to
/// `max_len` (index `k` of the result is length `k`).
pub fn loops_through_bond_by_length(bond: DirectedEdge, max_len: usize) -> Vec<u64> {
    let q = Query {
        lattice: LatticeKind::Hexagonal,
        starts: vec![bond],
        ends: vec![bond.from],
        avoid: vec![bond.from],
        groups: vec![vec![bond.from, bond.to]],
        max_len,
        closed: true,
    };
    let out = search::run(&q, false);
    (0..=max_len).map(|k| out.at(k)).collect()
}

/// All simple loops of length `len` sharing a vertex with `touch` and
/// containing no vertex of `forbid`.
pub fn loops_touching(touch: &[Vertex], len: usize, forbid: &[Vertex]) -> BTreeSet<Loop> {
    fn dfs(
        path: &mut Vec<Vertex>,
        len: usize,
        forbid: &BTreeSet<Vertex>,
        found: &mut BTreeSet<Loop>,
    ) {
        let u = *path.last().expect("non-empty path");
        if path.len() == len {
            if adjacent(u, path[0], LatticeKind::Hexagonal) {
                found.insert(Loop { vertices: path.clone() }.canonical());
            }
            return;
        }
        for w in hex_neighbors(u) {
            if forbid.contains(&w) || path.contains(&w) {
                continue;
            }
            path.push(w);
            dfs(path, len, forbid, found);
            path.pop();
        }
    }
    let forbid: BTreeSet<Vertex> = forbid.iter().copied().collect();
    let mut found = BTreeSet::new();
    for &s in touch {
        if !forbid.contains(&s) {
            dfs(&mut vec![s], len, &forbid, &mut found);
        }
    }
    found
}

/// Number of walks of length `l` from `v` whose first step does not use
/// the bond `e`, ending on the boundary pool `pool` and whose interior
/// avoids the pool.
pub fn walk_concatenation_count(
    v: Vertex,
    e: Edge,
    l: usize,
    pool: &[Vertex],
) -> Result<u64, PolymerError> {
    let excluded = e.other(v).ok_or(PolymerError::NotIncident { vertex: v, edge: e })?;
    let starts: Vec<DirectedEdge> = hex_neighbors(v)
        .into_iter()
        .filter(|&w| w != excluded)
        .map(|w| DirectedEdge::new(v, w))
        .collect();
    Ok(starts
        .into_iter()
        .map(|s| walks_from_bond_by_length(s, pool, l)[l])
        .sum())
}

/// Walks starting with bond `s`, ending on `pool`, interior avoiding
/// `pool`, for every length up to `max_len`.
pub fn walks_from_bond_by_length(s: DirectedEdge, pool: &[Vertex], max_len: usize) -> Vec<u64> {
    let q = Query {
        lattice: LatticeKind::Hexagonal,
        starts: vec![s],
        ends: pool.to_vec(),
        avoid: pool.to_vec(),
        groups: vec![pool.to_vec()],
        max_len,
        closed: false,
    };
    let out = search::run(&q, false);
    (0..=max_len).map(|k| out.at(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{hex_corner_window, hex_start_arm, Corner};

    #[test]
    fn hexagon_loops_through_a_bond() {
        let bond = hex_start_arm(0)[0];
        let counts = loops_through_bond_by_length(bond, 12);
        assert_eq!(counts[6], 2);
        assert_eq!(counts[8], 0);
        assert_eq!(counts[10], 10);
        assert_eq!(counts[12], 8);
    }

    #[test]
    fn unique_outer_corner_walk_of_length_three() {
        let w = hex_corner_window(6, Corner::Outer);
        let all = w.all();
        let c = EnumerationConstraints::between_pools(3, all.clone(), all, w.pool());
        let walks = generate_walks(&c).unwrap();
        let expected = Walk::new(vec![
            Vertex::new(1, -1),
            Vertex::new(2, -1),
            Vertex::new(3, -1),
            Vertex::new(3, 0),
        ])
        .unwrap();
        assert_eq!(walks.into_iter().collect::<Vec<_>>(), vec![expected.canonical()]);
    }

    #[test]
    fn odd_loop_rejected() {
        let s = hex_start_arm(0);
        let c = EnumerationConstraints::between_pools(7, s.clone(), s, vec![]);
        assert_eq!(generate_loops(&c), Err(PolymerError::OddLoop(7)));
    }

    #[test]
    fn canonical_loop_is_rotation_invariant() {
        let h = crate::lattice::hexagon_vertices(Vertex::new(0, 0)).to_vec();
        let a = Loop::new(h.clone()).unwrap().canonical();
        let mut r = h;
        r.rotate_left(2);
        r.reverse();
        assert_eq!(Loop::new(r).unwrap().canonical(), a);
    }
}
