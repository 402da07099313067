//! Backtracking engine shared by the honeycomb and square-lattice
//! enumerators.
//!
//! A search grows paths from directed start bonds.  A path of length `k`
//! (vertices `P[0..=k]`) is *accepted* when
//!
//! * `P[k]` is an end vertex,
//! * some vertex of the path lies in a must-intersect group,
//! * no vertex `P[1..k]` is in the avoid set, and
//! * no vertex `P[1..k-1]` is an end vertex (a path may only continue from
//!   an end vertex with its final step).
//!
//! Honeycomb paths are vertex-self-avoiding (in closed mode the start
//! vertex may be revisited, which closes a loop); square-lattice paths are
//! edge-self-avoiding trails.  Each accepted path whose reversal is also
//! accepted is reported once, as the lexicographically smaller of the two.
//!
//! One depth-first search serves every length up to `max_len`; searches
//! from different start bonds run in parallel and their integer counts are
//! merged in start order, so results do not depend on the thread count.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::lattice::{hex_continuations, square_continuations, DirectedEdge, LatticeKind, Vertex};

const END: u8 = 1;
const AVOID: u8 = 2;
const UNREACHABLE: u16 = u16::MAX;

/// A fully specified enumeration problem.
#[derive(Debug, Clone)]
pub(crate) struct Query {
    pub lattice: LatticeKind,
    pub starts: Vec<DirectedEdge>,
    pub ends: Vec<Vertex>,
    pub avoid: Vec<Vertex>,
    /// Must-intersect groups; an accepted path is tallied once for every
    /// group it meets.
    pub groups: Vec<Vec<Vertex>>,
    pub max_len: usize,
    /// Honeycomb only: leave the start vertex unmarked so that paths can
    /// return to it.
    pub closed: bool,
}

/// Per-length, per-group tallies plus (optionally) the accepted paths.
#[derive(Debug, Clone, Default)]
pub(crate) struct Outcome {
    /// `counts[k][g]`: accepted paths of length `k` meeting group `g`.
    pub counts: Vec<Vec<u64>>,
    pub paths: Vec<Vec<Vertex>>,
    /// Number of search nodes visited (diagnostics and branching checks).
    pub nodes: u64,
}

impl Outcome {
    fn empty(max_len: usize, groups: usize) -> Self {
        Self { counts: vec![vec![0; groups]; max_len + 1], paths: Vec::new(), nodes: 0 }
    }

    fn absorb(&mut self, other: Outcome) {
        for (row, o) in self.counts.iter_mut().zip(other.counts) {
            for (c, v) in row.iter_mut().zip(o) {
                *c += v;
            }
        }
        self.paths.extend(other.paths);
        self.nodes += other.nodes;
    }

    /// Total over groups of the length-`k` tallies (for single-group
    /// queries this is simply the count).
    pub fn at(&self, k: usize) -> u64 {
        self.counts.get(k).map_or(0, |r| r.iter().sum())
    }
}

/// Dense rectangular index over the part of the plane a search can reach.
#[derive(Debug, Clone, Copy)]
struct Grid {
    x0: i32,
    y0: i32,
    w: i32,
    h: i32,
}

impl Grid {
    fn around(points: impl Iterator<Item = Vertex>, margin: i32) -> Self {
        let (mut lx, mut ly, mut hx, mut hy) = (i32::MAX, i32::MAX, i32::MIN, i32::MIN);
        for p in points {
            lx = lx.min(p.x);
            ly = ly.min(p.y);
            hx = hx.max(p.x);
            hy = hy.max(p.y);
        }
        if lx > hx {
            (lx, ly, hx, hy) = (0, 0, 0, 0);
        }
        Self { x0: lx - margin, y0: ly - margin, w: hx - lx + 2 * margin + 1, h: hy - ly + 2 * margin + 1 }
    }

    fn len(&self) -> usize {
        (self.w * self.h) as usize
    }

    fn index(&self, v: Vertex) -> Option<usize> {
        let (dx, dy) = (v.x - self.x0, v.y - self.y0);
        (dx >= 0 && dy >= 0 && dx < self.w && dy < self.h).then(|| (dy * self.w + dx) as usize)
    }

    /// Index of a vertex known to lie inside the grid.
    #[inline]
    fn at(&self, v: Vertex) -> usize {
        debug_assert!(self.index(v).is_some());
        ((v.y - self.y0) * self.w + (v.x - self.x0)) as usize
    }
}

/// Direction slot of the step `from → to` (neighbour order of the lattice).
#[inline]
fn direction(lattice: LatticeKind, from: Vertex, to: Vertex) -> u8 {
    let (dx, dy) = (to.x - from.x, to.y - from.y);
    match (lattice, dx, dy) {
        (_, 1, 0) => 0,
        (_, -1, 0) => 1,
        (LatticeKind::Hexagonal, 0, _) => 2,
        (LatticeKind::Square, 0, 1) => 2,
        (LatticeKind::Square, 0, -1) => 3,
        _ => unreachable!("not a lattice step"),
    }
}

#[inline]
fn opposite(lattice: LatticeKind, d: u8) -> u8 {
    match (lattice, d) {
        (_, 0) => 1,
        (_, 1) => 0,
        (LatticeKind::Hexagonal, _) => 2,
        (LatticeKind::Square, 2) => 3,
        (LatticeKind::Square, _) => 2,
    }
}

/// Immutable data shared by all per-start searches of one query.
struct Prepared {
    lattice: LatticeKind,
    closed: bool,
    max_len: usize,
    grid: Grid,
    flags: Vec<u8>,
    /// Bit `d` set at cell `v`: the bond leaving `v` in direction `d` is a
    /// start bond.
    start_dirs: Vec<u8>,
    dist_end: Vec<u16>,
    dist_hit: Vec<u16>,
    /// CSR lists of the groups containing each cell.
    group_off: Vec<u32>,
    group_ids: Vec<u32>,
    words: usize,
    groups: usize,
}

fn bfs(grid: &Grid, lattice: LatticeKind, sources: impl Iterator<Item = Vertex>) -> Vec<u16> {
    let mut dist = vec![UNREACHABLE; grid.len()];
    let mut queue = VecDeque::new();
    for s in sources {
        if let Some(i) = grid.index(s) {
            if dist[i] != 0 {
                dist[i] = 0;
                queue.push_back(s);
            }
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[grid.at(v)];
        for w in crate::lattice::neighbors(v, lattice) {
            if let Some(j) = grid.index(w) {
                if dist[j] == UNREACHABLE {
                    dist[j] = d + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    dist
}

impl Prepared {
    fn new(q: &Query) -> Self {
        let margin = q.max_len as i32 + 2;
        let grid = Grid::around(q.starts.iter().map(|e| e.from), margin);
        let mut flags = vec![0u8; grid.len()];
        for &v in &q.ends {
            if let Some(i) = grid.index(v) {
                flags[i] |= END;
            }
        }
        for &v in &q.avoid {
            if let Some(i) = grid.index(v) {
                flags[i] |= AVOID;
            }
        }
        let mut start_dirs = vec![0u8; grid.len()];
        for e in &q.starts {
            if let Some(i) = grid.index(e.from) {
                start_dirs[i] |= 1 << direction(q.lattice, e.from, e.to);
            }
        }
        let dist_end = bfs(&grid, q.lattice, q.ends.iter().copied());
        let dist_hit = bfs(&grid, q.lattice, q.groups.iter().flatten().copied());

        let mut member: Vec<Vec<u32>> = vec![Vec::new(); grid.len()];
        for (g, group) in q.groups.iter().enumerate() {
            for &v in group {
                if let Some(i) = grid.index(v) {
                    if member[i].last() != Some(&(g as u32)) {
                        member[i].push(g as u32);
                    }
                }
            }
        }
        let mut group_off = Vec::with_capacity(grid.len() + 1);
        let mut group_ids = Vec::new();
        group_off.push(0);
        for m in member {
            group_ids.extend(m);
            group_off.push(group_ids.len() as u32);
        }
        let groups = q.groups.len();
        Self {
            lattice: q.lattice,
            closed: q.closed,
            max_len: q.max_len,
            grid,
            flags,
            start_dirs,
            dist_end,
            dist_hit,
            group_off,
            group_ids,
            words: groups.div_ceil(64).max(1),
            groups,
        }
    }

    #[inline]
    fn groups_of(&self, cell: usize) -> &[u32] {
        &self.group_ids[self.group_off[cell] as usize..self.group_off[cell + 1] as usize]
    }
}

/// Mutable state of one depth-first search.
struct Search<'a> {
    p: &'a Prepared,
    collect: bool,
    path: Vec<Vertex>,
    visited: Vec<u8>,
    /// `hits[k * words ..]`: groups met by `P[0..=k]`.
    hits: Vec<u64>,
    out: Outcome,
}

impl<'a> Search<'a> {
    fn new(p: &'a Prepared, collect: bool) -> Self {
        Self {
            p,
            collect,
            path: Vec::with_capacity(p.max_len + 1),
            visited: vec![0; p.grid.len()],
            hits: vec![0; (p.max_len + 1) * p.words],
            out: Outcome::empty(p.max_len, p.groups),
        }
    }

    fn run(mut self, start: DirectedEdge) -> Outcome {
        let p = self.p;
        if p.max_len == 0 || p.grid.index(start.to).is_none() {
            return self.out;
        }
        let c0 = p.grid.at(start.from);
        for &g in p.groups_of(c0) {
            self.hits[(g / 64) as usize] |= 1 << (g % 64);
        }
        self.path.push(start.from);
        match p.lattice {
            LatticeKind::Hexagonal => {
                if !p.closed {
                    self.visited[c0] = 1;
                }
            }
            LatticeKind::Square => self.mark_edge(start.from, start.to),
        }
        self.arrive(1, start.to, start.from, false);
        self.out
    }

    #[inline]
    fn edge_bits(&self, a: Vertex, b: Vertex) -> (usize, u8, usize, u8) {
        let d = direction(self.p.lattice, a, b);
        (self.p.grid.at(a), 1 << d, self.p.grid.at(b), 1 << opposite(self.p.lattice, d))
    }

    #[inline]
    fn mark_edge(&mut self, a: Vertex, b: Vertex) {
        let (i, bi, j, bj) = self.edge_bits(a, b);
        self.visited[i] |= bi;
        self.visited[j] |= bj;
    }

    #[inline]
    fn unmark_edge(&mut self, a: Vertex, b: Vertex) {
        let (i, bi, j, bj) = self.edge_bits(a, b);
        self.visited[i] &= !bi;
        self.visited[j] &= !bj;
    }

    /// Handles the arrival of the path at `u`, which becomes `P[j]`.
    /// `final_only` is set when `P[j-1]` is an interior end vertex, so `u`
    /// may only complete the path.
    fn arrive(&mut self, j: usize, u: Vertex, prev: Vertex, final_only: bool) {
        let p = self.p;
        let cell = p.grid.at(u);
        let rem = (p.max_len - j) as u16;
        if p.dist_end[cell] > rem {
            return;
        }
        self.out.nodes += 1;
        let w = p.words;
        let (lo, hi) = self.hits.split_at_mut(j * w);
        let cur = &mut hi[..w];
        cur.copy_from_slice(&lo[(j - 1) * w..]);
        for &g in p.groups_of(cell) {
            cur[(g / 64) as usize] |= 1 << (g % 64);
        }
        let any = cur.iter().any(|&x| x != 0);
        if !any && p.dist_hit[cell] > rem {
            return;
        }
        let flags = p.flags[cell];
        self.path.push(u);
        if flags & END != 0 && any {
            self.complete(j);
        }
        if !final_only && j < p.max_len && flags & AVOID == 0 {
            let next_final = flags & END != 0;
            match p.lattice {
                LatticeKind::Hexagonal => {
                    self.visited[cell] = 1;
                    for v in hex_continuations(prev, u) {
                        if self.visited[p.grid.at(v)] == 0 {
                            self.arrive(j + 1, v, u, next_final);
                        }
                    }
                    self.visited[cell] = 0;
                }
                LatticeKind::Square => {
                    for v in square_continuations(prev, u) {
                        let d = direction(p.lattice, u, v);
                        if self.visited[cell] & (1 << d) == 0 {
                            self.mark_edge(u, v);
                            self.arrive(j + 1, v, u, next_final);
                            self.unmark_edge(u, v);
                        }
                    }
                }
            }
        }
        self.path.pop();
    }

    /// Records the accepted path `P[0..=k]` unless its reversal is also
    /// accepted and lexicographically smaller.
    fn complete(&mut self, k: usize) {
        let p = self.p;
        let path = &self.path;
        let last = path[k];
        let reverse_valid = p.start_dirs[p.grid.at(last)] & (1 << direction(p.lattice, last, path[k - 1])) != 0
            && p.grid.index(path[0]).is_some_and(|i| p.flags[i] & END != 0)
            && (k < 3 || p.flags[p.grid.at(path[k - 1])] & END == 0);
        if reverse_valid {
            for i in 0..=k {
                match path[k - i].cmp(&path[i]) {
                    std::cmp::Ordering::Less => return,
                    std::cmp::Ordering::Greater => break,
                    std::cmp::Ordering::Equal => {}
                }
            }
        }
        let w = p.words;
        let row = &mut self.out.counts[k];
        for (wi, &word) in self.hits[k * w..(k + 1) * w].iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                row[wi * 64 + b] += 1;
                bits &= bits - 1;
            }
        }
        if self.collect {
            self.out.paths.push(path.clone());
        }
    }
}

/// Runs a query, in parallel over start bonds.
pub(crate) fn run(q: &Query, collect: bool) -> Outcome {
    let prepared = Prepared::new(q);
    let parts: Vec<Outcome> = q
        .starts
        .par_iter()
        .map(|&s| Search::new(&prepared, collect).run(s))
        .collect();
    let mut out = Outcome::empty(q.max_len, q.groups.len());
    for part in parts {
        out.absorb(part);
    }
    out
}
