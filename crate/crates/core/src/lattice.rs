//! Exact integer geometry for the honeycomb and square lattices.
//!
//! The honeycomb lattice is embedded as a *brick wall*: every point of `Z^2`
//! is a vertex, `(x, y)` is always joined to `(x ± 1, y)`, and the third
//! (vertical) edge goes to `(x, y + 1)` when `x + y` is even and to
//! `(x, y - 1)` otherwise.  Hexagonal faces are the `3 × 2` bricks whose
//! lower-left corner `(x, y)` has `x + y` even; those corners form the dual
//! triangular lattice.
//!
//! The annular volumes are built exactly as unions of elementary pieces:
//! a hexagon together with every lattice edge touching it (honeycomb), or a
//! vertex together with its four incident edges (square).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

/// The two underlying lattices.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema,
)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    Hexagonal,
    Square,
}

impl LatticeKind {
    /// Coordination number of the infinite lattice.
    pub fn degree(self) -> usize {
        match self {
            LatticeKind::Hexagonal => 3,
            LatticeKind::Square => 4,
        }
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeKind::Hexagonal => f.write_str("hex"),
            LatticeKind::Square => f.write_str("square"),
        }
    }
}

/// A lattice vertex with exact integer coordinates.
///
/// The derived ordering is lexicographic in `(x, y)`; it is the order used
/// for canonical forms throughout the crate.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
pub struct Vertex {
    pub x: i32,
    pub y: i32,
}

impl Vertex {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub const fn shift(self, dx: i32, dy: i32) -> Self {
        Self { x: self.x + dx, y: self.y + dy }
    }

    /// Sup-norm distance from the origin (used for square volumes).
    pub fn sup_norm(self) -> u32 {
        self.x.unsigned_abs().max(self.y.unsigned_abs())
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Errors raised by geometric constructors.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("{0} and {1} are not adjacent on the {2} lattice")]
    NotAdjacent(Vertex, Vertex, LatticeKind),
    #[error("window length must be at least 1")]
    EmptyWindow,
    #[error("invalid annulus: K = {k} must be smaller than N = {n}, and N must be positive")]
    InvalidAnnulus { n: u32, k: u32 },
}

/// The vertical neighbour of a brick-wall vertex.
#[inline]
pub const fn hex_vertical(v: Vertex) -> Vertex {
    if (v.x + v.y) & 1 == 0 {
        Vertex::new(v.x, v.y + 1)
    } else {
        Vertex::new(v.x, v.y - 1)
    }
}

/// The three neighbours of a honeycomb vertex.
#[inline]
pub const fn hex_neighbors(v: Vertex) -> [Vertex; 3] {
    [Vertex::new(v.x + 1, v.y), Vertex::new(v.x - 1, v.y), hex_vertical(v)]
}

/// The four neighbours of a square-lattice vertex.
#[inline]
pub const fn square_neighbors(v: Vertex) -> [Vertex; 4] {
    [
        Vertex::new(v.x + 1, v.y),
        Vertex::new(v.x - 1, v.y),
        Vertex::new(v.x, v.y + 1),
        Vertex::new(v.x, v.y - 1),
    ]
}

/// All lattice-adjacent vertices of `v`.
pub fn neighbors(v: Vertex, lattice: LatticeKind) -> Vec<Vertex> {
    match lattice {
        LatticeKind::Hexagonal => hex_neighbors(v).to_vec(),
        LatticeKind::Square => square_neighbors(v).to_vec(),
    }
}

/// Whether `u` and `v` share a lattice edge.
pub fn adjacent(u: Vertex, v: Vertex, lattice: LatticeKind) -> bool {
    match lattice {
        LatticeKind::Hexagonal => hex_neighbors(u).contains(&v),
        LatticeKind::Square => square_neighbors(u).contains(&v),
    }
}

/// The two possible continuations of a honeycomb walk that arrived at
/// `last` from `prev`: every vertex has degree three, so after excluding the
/// backward step exactly two choices remain.
#[inline]
pub fn hex_continuations(prev: Vertex, last: Vertex) -> [Vertex; 2] {
    let n = hex_neighbors(last);
    if n[0] == prev {
        [n[1], n[2]]
    } else if n[1] == prev {
        [n[0], n[2]]
    } else {
        [n[0], n[1]]
    }
}

/// The three continuations (left, right, straight) of a square-lattice
/// trail that arrived at `last` from `prev`.
#[inline]
pub fn square_continuations(prev: Vertex, last: Vertex) -> [Vertex; 3] {
    let dx = last.x - prev.x;
    let dy = last.y - prev.y;
    [
        Vertex::new(last.x - dy, last.y + dx),
        Vertex::new(last.x + dy, last.y - dx),
        Vertex::new(last.x + dx, last.y + dy),
    ]
}

/// An undirected lattice edge stored with lexicographically ordered
/// endpoints, so that each edge has exactly one representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    a: Vertex,
    b: Vertex,
}

impl Edge {
    /// Builds the canonical edge between two adjacent vertices.
    pub fn new(u: Vertex, v: Vertex, lattice: LatticeKind) -> Result<Self, LatticeError> {
        if !adjacent(u, v, lattice) {
            return Err(LatticeError::NotAdjacent(u, v, lattice));
        }
        Ok(Self::between(u, v))
    }

    /// Canonical edge between `u` and `v` without an adjacency check.
    pub(crate) fn between(u: Vertex, v: Vertex) -> Self {
        if u <= v {
            Self { a: u, b: v }
        } else {
            Self { a: v, b: u }
        }
    }

    /// Re-canonicalises the edge (idempotent).
    pub fn canonical(self) -> Self {
        Self::between(self.a, self.b)
    }

    pub fn endpoints(self) -> (Vertex, Vertex) {
        (self.a, self.b)
    }

    pub fn contains(self, v: Vertex) -> bool {
        self.a == v || self.b == v
    }

    /// The endpoint opposite to `v`, if `v` is an endpoint.
    pub fn other(self, v: Vertex) -> Option<Vertex> {
        if self.a == v {
            Some(self.b)
        } else if self.b == v {
            Some(self.a)
        } else {
            None
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

/// An oriented edge, used for the start bonds of the enumerators: `from` is
/// the boundary vertex and `to` its neighbour inside the volume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DirectedEdge {
    pub from: Vertex,
    pub to: Vertex,
}

impl DirectedEdge {
    pub const fn new(from: Vertex, to: Vertex) -> Self {
        Self { from, to }
    }

    pub fn undirected(self) -> Edge {
        Edge::between(self.from, self.to)
    }

    pub const fn shift(self, dx: i32, dy: i32) -> Self {
        Self { from: self.from.shift(dx, dy), to: self.to.shift(dx, dy) }
    }
}

// ---------------------------------------------------------------------------
// Honeycomb faces and the dual lattice

/// Whether `c` is the lower-left corner of a hexagonal face, i.e. a site of
/// the dual lattice.
pub const fn is_hex_cell(c: Vertex) -> bool {
    (c.x + c.y) & 1 == 0
}

/// The six vertices of the hexagon with lower-left corner `c`, listed in
/// cyclic order.
pub fn hexagon_vertices(c: Vertex) -> [Vertex; 6] {
    debug_assert!(is_hex_cell(c));
    [
        c,
        c.shift(1, 0),
        c.shift(2, 0),
        c.shift(2, 1),
        c.shift(1, 1),
        c.shift(0, 1),
    ]
}

/// The three hexagonal faces containing a vertex.
pub fn cells_of(v: Vertex) -> [Vertex; 3] {
    let mut out = [v; 3];
    let mut n = 0;
    for dx in 0..3 {
        for dy in 0..2 {
            let c = v.shift(-dx, -dy);
            if is_hex_cell(c) {
                out[n] = c;
                n += 1;
            }
        }
    }
    debug_assert_eq!(n, 3);
    out
}

/// Graph distance between two faces in the dual (triangular) lattice.
pub fn dual_distance(c1: Vertex, c2: Vertex) -> u32 {
    let dx = (c1.x - c2.x).unsigned_abs();
    let dy = (c1.y - c2.y).unsigned_abs();
    dy.max((dx + dy) / 2)
}

/// Converts a point of the "doubled" planar embedding of the honeycomb
/// (`X = 2x`, `Y = 2y/√3` for unit bond length, with a vertex at
/// `(±1/2, √3/2)`) to brick-wall coordinates.
pub fn from_doubled(xd: i32, yd: i32) -> Vertex {
    debug_assert!(xd.rem_euclid(3) != 0, "not a honeycomb vertex");
    Vertex::new(yd, xd.div_euclid(3))
}

/// Inverse of [`from_doubled`].
pub fn to_doubled(v: Vertex) -> (i32, i32) {
    let c = v.y;
    let xd = if (v.x + c) & 1 == 0 { 3 * c + 2 } else { 3 * c + 1 };
    (xd, v.x)
}

/// Planar Euclidean position of a honeycomb vertex (unit bond length).
pub fn hex_position(v: Vertex) -> (f64, f64) {
    let (xd, yd) = to_doubled(v);
    (xd as f64 / 2.0, yd as f64 * 3f64.sqrt() / 2.0)
}

// ---------------------------------------------------------------------------
// Annular volumes

/// Position of a vertex relative to an annular volume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryClass {
    Interior,
    InnerBoundary,
    OuterBoundary,
    NotInVolume,
}

/// The annular region between an inner ball of radius `K` and an outer ball
/// of radius `N`; `K = 0` denotes the full ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnnulusSpec {
    pub lattice: LatticeKind,
    pub n: u32,
    pub k: u32,
}

impl AnnulusSpec {
    pub fn new(lattice: LatticeKind, n: u32, k: u32) -> Result<Self, LatticeError> {
        if n == 0 || k >= n {
            return Err(LatticeError::InvalidAnnulus { n, k });
        }
        Ok(Self { lattice, n, k })
    }

    /// Radii (dual distance for the honeycomb, sup-norm for the square
    /// lattice) of the elementary pieces making up the volume.
    fn piece_in_range(&self, r: u32) -> bool {
        let lo = match self.lattice {
            LatticeKind::Hexagonal if self.k > 0 => self.k + 1,
            _ => self.k,
        };
        lo <= r && r < self.n
    }

    /// Edge membership in the volume.
    pub fn contains_edge(&self, e: Edge) -> bool {
        let (u, v) = e.endpoints();
        match self.lattice {
            LatticeKind::Hexagonal => {
                // A hexagon piece contains every edge with an endpoint on it.
                cells_of(u)
                    .iter()
                    .chain(cells_of(v).iter())
                    .any(|&c| self.piece_in_range(dual_distance(c, Vertex::default())))
            }
            LatticeKind::Square => {
                // A plus-shaped piece centred at x contains the edges at x.
                self.piece_in_range(u.sup_norm()) || self.piece_in_range(v.sup_norm())
            }
        }
    }

    /// Number of volume edges at `v`.
    pub fn degree(&self, v: Vertex) -> usize {
        neighbors(v, self.lattice)
            .into_iter()
            .filter(|&w| self.contains_edge(Edge::between(v, w)))
            .count()
    }

    /// Whether `v` lies in the inner ball whose boundary is the inner
    /// boundary of the annulus.
    fn in_inner_ball(&self, v: Vertex) -> bool {
        if self.k == 0 {
            return false;
        }
        match self.lattice {
            LatticeKind::Hexagonal => cells_of(v)
                .iter()
                .any(|&c| dual_distance(c, Vertex::default()) < self.k),
            LatticeKind::Square => v.sup_norm() < self.k,
        }
    }

    /// Classifies `v` as interior, inner boundary, outer boundary, or
    /// outside the volume.
    pub fn classify(&self, v: Vertex) -> BoundaryClass {
        let d = self.degree(v);
        if d == 0 {
            BoundaryClass::NotInVolume
        } else if d == self.lattice.degree() {
            BoundaryClass::Interior
        } else if self.in_inner_ball(v) {
            BoundaryClass::InnerBoundary
        } else {
            BoundaryClass::OuterBoundary
        }
    }

    /// Explicit edge set of the volume.
    pub fn edges(&self) -> BTreeSet<Edge> {
        let n = self.n as i32;
        let mut out = BTreeSet::new();
        match self.lattice {
            LatticeKind::Hexagonal => {
                for y in -n - 1..=n + 1 {
                    for x in -2 * n - 3..=2 * n + 3 {
                        let c = Vertex::new(x, y);
                        if !is_hex_cell(c) || !self.piece_in_range(dual_distance(c, Vertex::default())) {
                            continue;
                        }
                        for v in hexagon_vertices(c) {
                            for w in hex_neighbors(v) {
                                out.insert(Edge::between(v, w));
                            }
                        }
                    }
                }
            }
            LatticeKind::Square => {
                for y in -n..=n {
                    for x in -n..=n {
                        let c = Vertex::new(x, y);
                        if self.piece_in_range(c.sup_norm()) {
                            for w in square_neighbors(c) {
                                out.insert(Edge::between(c, w));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Explicit vertex set with volume degrees.
    pub fn vertex_degrees(&self) -> BTreeMap<Vertex, usize> {
        let mut deg = BTreeMap::new();
        for e in self.edges() {
            let (u, v) = e.endpoints();
            *deg.entry(u).or_insert(0) += 1;
            *deg.entry(v).or_insert(0) += 1;
        }
        deg
    }

    /// All vertices of the given boundary class.
    pub fn boundary(&self, class: BoundaryClass) -> BTreeSet<Vertex> {
        self.vertex_degrees()
            .into_keys()
            .filter(|&v| self.classify(v) == class)
            .collect()
    }
}

/// Free-function form of [`AnnulusSpec::classify`].
pub fn classify_boundary(v: Vertex, spec: &AnnulusSpec) -> BoundaryClass {
    spec.classify(v)
}

/// Number of edges of the shortest loop enclosing the inner ball of radius
/// `k` (the loop bounding the interior of `Λ_k`).
pub fn enclosing_loop_length(lattice: LatticeKind, k: u32) -> u64 {
    let k = k as u64;
    match lattice {
        LatticeKind::Hexagonal => 6 * (2 * k).saturating_sub(1),
        LatticeKind::Square => 8 * k.saturating_sub(1),
    }
}

// ---------------------------------------------------------------------------
// Boundary windows

/// Which boundary stretch a window models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WindowKind {
    StraightInner,
    StraightOuter,
    CornerInner,
    CornerOuter,
}

/// The two corner types of an annulus boundary.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema,
)]
#[serde(rename_all = "lowercase")]
pub enum Corner {
    /// A convex corner of the outer boundary.
    Outer,
    /// A corner of the inner boundary (the volume wraps around it).
    Inner,
}

impl Corner {
    pub const BOTH: [Corner; 2] = [Corner::Outer, Corner::Inner];
}

/// A finite piece of boundary near a corner, given as two arms of
/// spoke edges oriented from the boundary vertex into the volume.
///
/// The `starts` arm is common to both corner types; the `ends` arm turns by
/// 120 degrees (honeycomb) or 90 degrees (square) towards the outside or the
/// inside of the volume, depending on the corner type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CornerWindow {
    pub lattice: LatticeKind,
    pub corner: Corner,
    pub starts: Vec<DirectedEdge>,
    pub ends: Vec<DirectedEdge>,
}

impl CornerWindow {
    /// All spoke edges, `starts` first.
    pub fn all(&self) -> Vec<DirectedEdge> {
        self.starts.iter().chain(self.ends.iter()).copied().collect()
    }

    /// Boundary vertices of both arms.
    pub fn pool(&self) -> Vec<Vertex> {
        self.all().iter().map(|e| e.from).collect()
    }

    /// Inner endpoints of the spokes of both arms.
    pub fn spoke_tips(&self) -> Vec<Vertex> {
        self.all().iter().map(|e| e.to).collect()
    }
}

/// The straight honeycomb arm shared by both corner windows: `n + 1` spokes
/// along a zigzag boundary line.
pub fn hex_start_arm(n: usize) -> Vec<DirectedEdge> {
    (0..=n as i32)
        .map(|i| DirectedEdge::new(Vertex::new(1 - i, -1 - i), Vertex::new(2 - i, -1 - i)))
        .collect()
}

/// The second honeycomb arm for the given corner type (`n + 1` spokes).
pub fn hex_end_arm(n: usize, corner: Corner) -> Vec<DirectedEdge> {
    (0..=n as i32)
        .map(|i| match corner {
            Corner::Inner => DirectedEdge::new(Vertex::new(1 - i, i), Vertex::new(2 - i, i)),
            Corner::Outer => {
                DirectedEdge::new(Vertex::new(2 * i + 3, 0), Vertex::new(2 * i + 3, -1))
            }
        })
        .collect()
}

/// Honeycomb corner window with arms of `n + 1` spokes each.
pub fn hex_corner_window(n: usize, corner: Corner) -> CornerWindow {
    CornerWindow {
        lattice: LatticeKind::Hexagonal,
        corner,
        starts: hex_start_arm(n),
        ends: hex_end_arm(n, corner),
    }
}

/// The straight square-lattice arm: spokes `(0, i) → (1, i)` for
/// `i = 1..=n`.
pub fn square_start_arm(n: usize) -> Vec<DirectedEdge> {
    (1..=n as i32)
        .map(|i| DirectedEdge::new(Vertex::new(0, i), Vertex::new(1, i)))
        .collect()
}

/// The second square-lattice arm.  For the inner corner its first boundary
/// vertex `(0, 1)` coincides with the first vertex of the start arm: this is
/// the degree-two corner of the inner boundary.
pub fn square_end_arm(n: usize, corner: Corner) -> Vec<DirectedEdge> {
    (1..=n as i32)
        .map(|i| match corner {
            Corner::Outer => DirectedEdge::new(Vertex::new(i, 0), Vertex::new(i, 1)),
            Corner::Inner => DirectedEdge::new(Vertex::new(1 - i, 1), Vertex::new(1 - i, 0)),
        })
        .collect()
}

/// Square-lattice corner window with arms of `n` spokes each.
pub fn square_corner_window(n: usize, corner: Corner) -> CornerWindow {
    CornerWindow {
        lattice: LatticeKind::Square,
        corner,
        starts: square_start_arm(n),
        ends: square_end_arm(n, corner),
    }
}

/// A boundary window request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundaryWindow {
    pub kind: WindowKind,
    pub length: usize,
}

/// Honeycomb boundary windows as undirected spoke edges.
///
/// Straight windows are a single arm of `length + 1` spokes (the outer one
/// runs along the outer-corner arm, the inner one along the inner-corner
/// arm); corner windows are the union of the two arms meeting at the
/// corner, `length + 1` spokes on each side.
pub fn boundary_window(kind: WindowKind, length: usize) -> Result<Vec<Edge>, LatticeError> {
    if length < 1 {
        return Err(LatticeError::EmptyWindow);
    }
    let directed = match kind {
        WindowKind::StraightOuter => hex_end_arm(length, Corner::Outer),
        WindowKind::StraightInner => hex_end_arm(length, Corner::Inner),
        WindowKind::CornerOuter => hex_corner_window(length, Corner::Outer).all(),
        WindowKind::CornerInner => hex_corner_window(length, Corner::Inner).all(),
    };
    Ok(directed.into_iter().map(DirectedEdge::undirected).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_origin_neighbors() {
        let mut n = neighbors(Vertex::new(0, 0), LatticeKind::Square);
        n.sort();
        assert_eq!(
            n,
            vec![
                Vertex::new(-1, 0),
                Vertex::new(0, -1),
                Vertex::new(0, 1),
                Vertex::new(1, 0)
            ]
        );
    }

    #[test]
    fn doubled_roundtrip() {
        for x in -20..20 {
            for y in -20..20 {
                let v = Vertex::new(x, y);
                let (xd, yd) = to_doubled(v);
                assert_eq!(from_doubled(xd, yd), v);
            }
        }
    }

    #[test]
    fn doubled_embedding_has_unit_bonds() {
        for x in -6..6 {
            for y in -6..6 {
                let v = Vertex::new(x, y);
                let (px, py) = hex_position(v);
                for w in hex_neighbors(v) {
                    let (qx, qy) = hex_position(w);
                    let d = ((px - qx).powi(2) + (py - qy).powi(2)).sqrt();
                    assert!((d - 1.0).abs() < 1e-12, "{v} {w} {d}");
                }
            }
        }
    }

    #[test]
    fn hexagon_is_a_cycle() {
        let h = hexagon_vertices(Vertex::new(2, 4));
        for i in 0..6 {
            assert!(adjacent(h[i], h[(i + 1) % 6], LatticeKind::Hexagonal));
        }
    }

    #[test]
    fn cells_of_contains_vertex() {
        for x in -5..5 {
            for y in -5..5 {
                let v = Vertex::new(x, y);
                for c in cells_of(v) {
                    assert!(hexagon_vertices(c).contains(&v));
                }
            }
        }
    }

    #[test]
    fn spokes_are_lattice_edges() {
        for corner in Corner::BOTH {
            for e in hex_corner_window(6, corner).all() {
                assert!(adjacent(e.from, e.to, LatticeKind::Hexagonal));
            }
            for e in square_corner_window(6, corner).all() {
                assert!(adjacent(e.from, e.to, LatticeKind::Square));
            }
        }
    }

    #[test]
    fn window_rejects_zero_length() {
        assert_eq!(boundary_window(WindowKind::StraightInner, 0), Err(LatticeError::EmptyWindow));
    }

    #[test]
    fn enclosing_loop_lengths() {
        assert_eq!(enclosing_loop_length(LatticeKind::Hexagonal, 25), 294);
        assert_eq!(enclosing_loop_length(LatticeKind::Square, 2), 8);
    }
}
