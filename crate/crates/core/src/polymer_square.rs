//! Edge-self-avoiding trails on the square lattice.
//!
//! On the decorated square lattice the polymers are trails: every edge is
//! used at most once, but a vertex may be passed twice.  Such a vertex has
//! degree four in the trail and the way its four edges are paired into
//! passages (one of three routings) is part of the trail's identity.  The
//! vertex sequence records the routing, so two trails are equal exactly
//! when their canonical vertex sequences agree.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::lattice::{
    adjacent, square_continuations, square_corner_window, square_neighbors, Corner, DirectedEdge,
    Edge, LatticeKind, Vertex,
};
use crate::polymer_hex::{firsts, min_cyclic, PolymerError};
use crate::search::{self, Query};

/// Open or closed trail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TrailKind {
    Walk,
    Loop,
}

/// An edge-self-avoiding trail.  Loops store their cyclic vertex sequence
/// without repeating the first vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Trail {
    kind: TrailKind,
    vertices: Vec<Vertex>,
}

/// The two passages through a degree-four vertex, each a pair of incident
/// edges traversed consecutively.
pub type Passages = [(Edge, Edge); 2];

impl Trail {
    /// Validates adjacency, edge-distinctness and the at-most-twice vertex
    /// rule.
    pub fn new(kind: TrailKind, vertices: Vec<Vertex>) -> Result<Self, PolymerError> {
        let t = Self { kind, vertices };
        let n = t.vertices.len();
        let min = if kind == TrailKind::Loop { 4 } else { 2 };
        if n < min {
            return Err(PolymerError::Invalid("trail"));
        }
        let steps = t.steps();
        if !steps.iter().all(|&(a, b)| adjacent(a, b, LatticeKind::Square)) {
            return Err(PolymerError::Invalid("trail"));
        }
        let edges: BTreeSet<Edge> = steps.iter().map(|&(a, b)| Edge::between(a, b)).collect();
        if edges.len() != steps.len() || t.multiplicities().values().any(|&m| m > 2) {
            return Err(PolymerError::Invalid("trail"));
        }
        Ok(t)
    }

    fn steps(&self) -> Vec<(Vertex, Vertex)> {
        let n = self.vertices.len();
        match self.kind {
            TrailKind::Walk => self.vertices.windows(2).map(|p| (p[0], p[1])).collect(),
            TrailKind::Loop => (0..n).map(|i| (self.vertices[i], self.vertices[(i + 1) % n])).collect(),
        }
    }

    fn multiplicities(&self) -> BTreeMap<Vertex, usize> {
        let mut m = BTreeMap::new();
        for &v in &self.vertices {
            *m.entry(v).or_insert(0) += 1;
        }
        m
    }

    pub fn kind(&self) -> TrailKind {
        self.kind
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Number of edges `|γ|`.
    pub fn len(&self) -> usize {
        self.steps().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.steps().into_iter().map(|(a, b)| Edge::between(a, b)).collect()
    }

    /// Vertex support of the trail.
    pub fn support(&self) -> BTreeSet<Vertex> {
        self.vertices.iter().copied().collect()
    }

    /// Vertices of degree four in the trail (passed twice).
    pub fn degree_four_vertices(&self) -> Vec<Vertex> {
        let mut deg: BTreeMap<Vertex, usize> = BTreeMap::new();
        for e in self.edges() {
            let (a, b) = e.endpoints();
            *deg.entry(a).or_insert(0) += 1;
            *deg.entry(b).or_insert(0) += 1;
        }
        deg.into_iter().filter(|&(_, d)| d == 4).map(|(v, _)| v).collect()
    }

    /// The routing at each degree-four vertex, in a deterministic order.
    pub fn pairings(&self) -> Vec<(Vertex, Passages)> {
        let n = self.vertices.len();
        let mut by_vertex: BTreeMap<Vertex, Vec<(Edge, Edge)>> = BTreeMap::new();
        let interior = match self.kind {
            TrailKind::Walk => 1..n.saturating_sub(1),
            TrailKind::Loop => 0..n,
        };
        for i in interior {
            let v = self.vertices[i];
            let a = self.vertices[(i + n - 1) % n];
            let b = self.vertices[(i + 1) % n];
            let (e1, e2) = (Edge::between(a, v), Edge::between(v, b));
            by_vertex.entry(v).or_default().push((e1.min(e2), e1.max(e2)));
        }
        let four: BTreeSet<Vertex> = self.degree_four_vertices().into_iter().collect();
        by_vertex
            .into_iter()
            .filter(|(v, p)| four.contains(v) && p.len() == 2)
            .map(|(v, mut p)| {
                p.sort();
                (v, [p[0], p[1]])
            })
            .collect()
    }

    /// Canonical representative: reversal for walks, rotation and reversal
    /// for loops.
    pub fn canonical(&self) -> Self {
        let vertices = match self.kind {
            TrailKind::Walk => {
                let mut r = self.vertices.clone();
                r.reverse();
                r.min(self.vertices.clone())
            }
            TrailKind::Loop => min_cyclic(&self.vertices),
        };
        Self { kind: self.kind, vertices }
    }
}

/// Constraints of a trail enumeration (same conventions as the honeycomb
/// walk constraints).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrailConstraints {
    pub length: usize,
    pub start_edges: Vec<DirectedEdge>,
    pub end_edges: Vec<DirectedEdge>,
    pub must_contain: Vec<Vertex>,
    pub avoid: Vec<Vertex>,
}

impl TrailConstraints {
    fn query(&self, groups: Vec<Vec<Vertex>>, max_len: usize) -> Query {
        Query {
            lattice: LatticeKind::Square,
            starts: self.start_edges.clone(),
            ends: firsts(&self.end_edges),
            avoid: self.avoid.clone(),
            groups,
            max_len,
            closed: false,
        }
    }
}

/// All open trails satisfying `c`, in canonical form.
pub fn generate_trails(c: &TrailConstraints) -> Result<BTreeSet<Trail>, PolymerError> {
    if c.length < 2 {
        return Err(PolymerError::TooShort { min: 2, got: c.length });
    }
    let out = search::run(&c.query(vec![c.must_contain.clone()], c.length), true);
    Ok(out
        .paths
        .into_iter()
        .filter(|p| p.len() == c.length + 1)
        .map(|p| Trail { kind: TrailKind::Walk, vertices: p }.canonical())
        .collect())
}

/// Number of trails satisfying `c`.
pub fn count_trails(c: &TrailConstraints) -> u64 {
    if c.length < 1 {
        return 0;
    }
    search::run(&c.query(vec![c.must_contain.clone()], c.length), false).at(c.length)
}

/// Closed trails of length `n` through `v` whose vertices avoid `forbid`,
/// deduplicated under rotation and reversal.
pub fn closed_trails_through(v: Vertex, n: usize, forbid: &[Vertex]) -> BTreeSet<Trail> {
    fn dfs(
        path: &mut Vec<Vertex>,
        used: &mut BTreeSet<Edge>,
        n: usize,
        forbid: &BTreeSet<Vertex>,
        found: &mut BTreeSet<Trail>,
    ) {
        let u = *path.last().expect("non-empty path");
        let k = path.len() - 1;
        if k == n {
            if u == path[0] {
                let cyc = path[..n].to_vec();
                found.insert(Trail { kind: TrailKind::Loop, vertices: cyc }.canonical());
            }
            return;
        }
        let nexts: Vec<Vertex> = if k == 0 {
            square_neighbors(u).to_vec()
        } else {
            square_continuations(path[k - 1], u).to_vec()
        };
        for w in nexts {
            let e = Edge::between(u, w);
            if forbid.contains(&w) || used.contains(&e) {
                continue;
            }
            // Distance pruning: the walk has to come back to the start.
            let back = ((w.x - path[0].x).abs() + (w.y - path[0].y).abs()) as usize;
            if back > n - k - 1 {
                continue;
            }
            used.insert(e);
            path.push(w);
            dfs(path, used, n, forbid, found);
            path.pop();
            used.remove(&e);
        }
    }
    let forbid_set: BTreeSet<Vertex> = forbid.iter().copied().collect();
    let mut found = BTreeSet::new();
    if n >= 4 && n % 2 == 0 && !forbid_set.contains(&v) {
        dfs(&mut vec![v], &mut BTreeSet::new(), n, &forbid_set, &mut found);
    }
    // A loop passing v twice is found once from each passage; the
    // canonical form merges the two.
    found
}

/// Boundary-window walk count for the vertex `v` and corner type: trails
/// of length `n` from the first arm to either arm plus trails joining two
/// bonds of the second arm, all meeting `v`.  The window arms have `2n`
/// bonds each.
pub fn window_walks_through(v: Vertex, n: usize, corner: Corner) -> u64 {
    window_walk_counts(&[v], n, corner)[0]
}

/// [`window_walks_through`] for many vertices at once.
pub fn window_walk_counts(vs: &[Vertex], n: usize, corner: Corner) -> Vec<u64> {
    let w = square_corner_window(2 * n, corner);
    let pool = w.pool();
    let groups: Vec<Vec<Vertex>> = vs.iter().map(|&v| vec![v]).collect();
    let first = TrailConstraints {
        length: n,
        start_edges: w.starts.clone(),
        end_edges: w.all(),
        must_contain: vec![],
        avoid: pool.clone(),
    };
    let second = TrailConstraints {
        length: n,
        start_edges: w.ends.clone(),
        end_edges: w.ends.clone(),
        must_contain: vec![],
        avoid: pool,
    };
    let a = search::run(&first.query(groups.clone(), n), false);
    let b = search::run(&second.query(groups, n), false);
    (0..vs.len()).map(|g| a.counts[n][g] + b.counts[n][g]).collect()
}

/// Closed trails of length `n` through `v` inside the window of the given
/// corner type: pool vertices are excluded, except for the degree-two
/// corner of the inner boundary, which a loop may pass through.
pub fn window_loops_through(v: Vertex, n: usize, corner: Corner) -> u64 {
    let w = square_corner_window(2 * n, corner);
    let mut forbid = w.pool();
    if corner == Corner::Inner {
        forbid.retain(|&p| p != Vertex::new(0, 1));
    }
    closed_trails_through(v, n, &forbid).len() as u64
}

/// `(W_n(v), L_n(v))`: the largest window walk count and loop count of
/// length `n` through `v` over both corner types.
pub fn trails_through_vertex(v: Vertex, n: usize) -> Result<(u64, u64), PolymerError> {
    if n < 2 {
        return Err(PolymerError::TooShort { min: 2, got: n });
    }
    let walks = Corner::BOTH.iter().map(|&c| window_walks_through(v, n, c)).max().unwrap_or(0);
    let loops = Corner::BOTH.iter().map(|&c| window_loops_through(v, n, c)).max().unwrap_or(0);
    Ok((walks, loops))
}

/// Vertices `[0, 2n)²` over which the window counts are maximised.
pub fn window_grid(n: usize) -> Vec<Vertex> {
    let s = 2 * n as i32;
    (0..s).flat_map(|x| (0..s).map(move |y| Vertex::new(x, y))).collect()
}

/// `(max_v W_n(v), max_v L_n(v))` over the window grid, maximised
/// separately.
pub fn max_trails_through_vertex(n: usize) -> (u64, u64) {
    let grid = window_grid(n);
    let walks = Corner::BOTH
        .iter()
        .flat_map(|&c| window_walk_counts(&grid, n, c))
        .max()
        .unwrap_or(0);
    let loops = if n % 2 == 1 {
        0
    } else {
        // Loops near the window can only lose configurations, so the
        // supremum is reached at grid vertices away from the arms.
        Corner::BOTH
            .iter()
            .flat_map(|&c| grid.iter().map(move |&v| window_loops_through(v, n, c)))
            .max()
            .unwrap_or(0)
    };
    (walks, loops)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_loop() {
        let loops = closed_trails_through(Vertex::new(0, 0), 4, &[]);
        assert_eq!(loops.len(), 4);
        assert!(loops.iter().all(|t| t.degree_four_vertices().is_empty()));
    }

    #[test]
    fn domino_loops() {
        assert_eq!(closed_trails_through(Vertex::new(0, 0), 6, &[]).len(), 12);
    }

    #[test]
    fn trail_rejects_repeated_edge() {
        let v = |x, y| Vertex::new(x, y);
        assert!(Trail::new(TrailKind::Walk, vec![v(0, 0), v(1, 0), v(0, 0)]).is_err());
    }
}
