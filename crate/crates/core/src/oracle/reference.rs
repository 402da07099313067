//! Literal floating-point port of the reference enumerators.
//!
//! Points are Euclidean coordinates compared with an absolute tolerance,
//! membership tests are linear scans and reversal duplicates are removed by
//! pairwise comparison, exactly as in the original procedures. The port is
//! deliberately naive: it exists to be diffed against the integer engine on
//! reduced ranges, not to be fast.

/// A point of the plane.
pub type Point = [f64; 2];
/// A walk or a directed edge given by its points.
pub type Path = Vec<Point>;

/// Tolerance of point comparisons.
pub const TOL: f64 = 1e-6;

pub fn is_close(p1: &Point, p2: &Point) -> bool {
    (p1[0] - p2[0]).abs() < TOL && (p1[1] - p2[1]).abs() < TOL
}

pub fn in_path_with_tol(p: &Point, path: &[Point]) -> bool {
    path.iter().any(|q| is_close(p, q))
}

pub fn hits(a: &[Point], b: &[Point]) -> bool {
    a.iter().any(|p| in_path_with_tol(p, b))
}

pub fn firsts(paths: &[Path]) -> Vec<Point> {
    paths.iter().map(|p| p[0]).collect()
}

pub fn lasts(paths: &[Path]) -> Vec<Point> {
    paths.iter().map(|p| p[p.len() - 1]).collect()
}

fn is_reverse_of(path: &[Point], r: &[Point]) -> bool {
    path.iter().rev().zip(r).all(|(p1, p2)| is_close(p1, p2))
}

/// Shared recursion of the walk generators: `step` lists the continuations,
/// `blocked` decides self-avoidance and `accept` the final test.
fn recurse_paths(
    length: usize,
    start_paths: &[Path],
    end_firsts: &[Point],
    step: &dyn Fn(&Point, &Point) -> Vec<Point>,
    blocked: &dyn Fn(&[Point], &Point) -> bool,
    accept: &dyn Fn(&[Point]) -> bool,
) -> Vec<Path> {
    fn go(
        path: &mut Path,
        length: usize,
        end_firsts: &[Point],
        step: &dyn Fn(&Point, &Point) -> Vec<Point>,
        blocked: &dyn Fn(&[Point], &Point) -> bool,
        accept: &dyn Fn(&[Point]) -> bool,
        results: &mut Vec<Path>,
    ) {
        if path.len() == length + 1 {
            if in_path_with_tol(&path[path.len() - 1], end_firsts)
                && accept(path)
                && !results.iter().any(|r| is_reverse_of(path, r))
            {
                results.push(path.clone());
            }
            return;
        }
        let last = path[path.len() - 1];
        let second_last = path[path.len() - 2];
        for next in step(&second_last, &last) {
            if blocked(path, &next) {
                continue;
            }
            if in_path_with_tol(&last, end_firsts) && path.len() != length {
                continue;
            }
            path.push(next);
            go(path, length, end_firsts, step, blocked, accept, results);
            path.pop();
        }
    }
    let mut results = vec![];
    for sp in start_paths {
        let mut path = sp.clone();
        go(&mut path, length, end_firsts, step, blocked, accept, &mut results);
    }
    results
}

/// Honeycomb lattice with unit edge length.
pub mod hex {
    use super::*;

    const H: f64 = 0.866_025_403_784_438_6; // √3/2

    fn s3() -> f64 {
        3f64.sqrt()
    }

    fn turns(second_last: &Point, last: &Point) -> Vec<Point> {
        let h = s3() / 2.0;
        let dx = last[0] - second_last[0];
        let dy = last[1] - second_last[1];
        vec![
            [last[0] + dx / 2.0 - h * dy, last[1] + h * dx + dy / 2.0],
            [last[0] + dx / 2.0 + h * dy, last[1] - h * dx + dy / 2.0],
        ]
    }

    pub fn starts2(n: usize) -> Vec<Path> {
        (0..=n)
            .map(|i| {
                let i = i as f64;
                vec![[-0.5 - i * 1.5, H * (1.0 - i)], [-1.0 - i * 1.5, H * (2.0 - i)]]
            })
            .collect()
    }

    pub fn ends2(n: usize, o: u8) -> Vec<Path> {
        (0..=n)
            .map(|i| {
                let i = i as f64;
                if o == 1 {
                    vec![[0.5 + i * 1.5, H * (1.0 - i)], [1.0 + i * 1.5, H * (2.0 - i)]]
                } else {
                    let val = 2.0 * (i + 1.5) * H;
                    vec![[0.5, val], [-0.5, val]]
                }
            })
            .collect()
    }

    pub fn alls(length: usize, o: u8) -> Vec<Path> {
        let mut v = starts2(length);
        v.extend(ends2(length, o));
        v
    }

    pub fn generate_saws(length: usize, start_paths: &[Path], end_paths: &[Path], intersect: &[Point]) -> Vec<Path> {
        let end_firsts = firsts(end_paths);
        let mut all_end_start = firsts(start_paths);
        all_end_start.extend(end_firsts.iter().copied());
        recurse_paths(
            length,
            start_paths,
            &end_firsts,
            &turns,
            &|path, next| in_path_with_tol(next, path),
            &|path| hits(path, intersect) && !hits(&path[1..path.len() - 1], &all_end_start),
        )
    }

    pub fn generate_loops(length: usize, start_paths: &[Path], end_paths: &[Path], intersect: &[Point]) -> Vec<Path> {
        let end_firsts = firsts(end_paths);
        let mut all_end_start = firsts(start_paths);
        all_end_start.extend(end_firsts.iter().copied());
        recurse_paths(
            length,
            start_paths,
            &end_firsts,
            &turns,
            &|path, next| in_path_with_tol(next, &path[1..]),
            &|path| hits(path, intersect) && !hits(&path[1..path.len() - 1], &all_end_start),
        )
    }

    pub fn saw_with_avoidance(
        length: usize,
        start_paths: &[Path],
        end_paths: &[Path],
        intersect: &[Point],
        avoid: &[Point],
    ) -> Vec<Path> {
        let end_firsts = firsts(end_paths);
        recurse_paths(
            length,
            start_paths,
            &end_firsts,
            &turns,
            &|path, next| in_path_with_tol(next, path),
            &|path| hits(path, intersect) && !hits(&path[1..path.len() - 1], avoid),
        )
    }

    /// Loops of length `6, 8, …, length` through a fixed edge.
    pub fn loops_through_edge(length: usize) -> Vec<u64> {
        let s = starts2(0);
        (6..=length)
            .step_by(2)
            .map(|i| generate_loops(i, &s, &s, &s[0]).len() as u64)
            .collect()
    }

    fn shift(path: &[Point], dx: f64, dy: f64) -> Path {
        path.iter().map(|p| [p[0] + dx, p[1] + dy]).collect()
    }

    pub fn loop_translates(m: usize) -> Vec<Path> {
        let r = s3();
        let toploop: Path = vec![
            [-0.5, 1.5 * r],
            [-1.0, 2.0 * r],
            [-0.5, 2.5 * r],
            [0.5, 2.5 * r],
            [1.0, 2.0 * r],
            [0.5, 1.5 * r],
            [-0.5, 1.5 * r],
        ];
        (0..m).map(|ii| shift(&toploop, -(ii as f64) * 1.5, ii as f64 * (-r / 2.0))).collect()
    }

    pub fn layered_loop_translates(mm: usize, l: usize) -> Vec<Path> {
        let mut z = loop_translates(mm);
        for i in loop_translates(mm) {
            for j in 1..=l {
                z.push(shift(&i, 0.0, s3() * j as f64));
            }
        }
        z
    }

    pub fn get_edges(paths: &[Path]) -> Vec<Path> {
        let mut edges = vec![];
        for path in paths {
            for i in 0..path.len() - 1 {
                edges.push(vec![path[i], path[(i + 1) % path.len()]]);
            }
        }
        edges
    }

    pub fn get_points(paths: &[Path]) -> Vec<Point> {
        let mut points = vec![];
        for path in paths {
            for p in &path[..path.len() - 1] {
                points.push(*p);
            }
        }
        points
    }

    /// Largest number of walks of length `1..=length` leaving a patch point
    /// along its out-bonds, for one corner type.
    pub fn pb(length: usize, o: u8) -> Vec<u64> {
        let edges = get_edges(&layered_loop_translates(length, length));
        let points = get_points(&edges);
        let a = alls(length, o);
        let fa = firsts(&a);
        (1..=length)
            .map(|i| {
                points
                    .iter()
                    .map(|point| {
                        edges
                            .iter()
                            .filter(|e| in_path_with_tol(point, e) && is_close(&e[0], point))
                            .map(|e| saw_with_avoidance(i, std::slice::from_ref(e), &a, &fa, &fa).len() as u64)
                            .sum::<u64>()
                    })
                    .max()
                    .unwrap_or(0)
            })
            .collect()
    }

    /// Element-wise maximum of [`pb`] over both corner types.
    pub fn p(length: usize) -> Vec<u64> {
        pb(length, 0).into_iter().zip(pb(length, 1)).map(|(a, b)| a.max(b)).collect()
    }

    /// Walks of length `4, 6, …, length` with a fixed right endpoint.
    pub fn r(length: usize) -> Vec<u64> {
        let s = starts2(length);
        let z = s.len() / 2;
        let fs = firsts(&s);
        let avoid = firsts(&s[z..]);
        (4..=length)
            .step_by(2)
            .map(|i| saw_with_avoidance(i, &s[z..=z], &s[..z], &fs, &avoid).len() as u64)
            .collect()
    }

    pub fn qb(length: usize, o: u8) -> Vec<u64> {
        let s = starts2(length);
        let e = ends2(length, o);
        let fe = firsts(&e);
        (3..=length).step_by(2).map(|i| generate_saws(i, &s, &e, &fe).len() as u64).collect()
    }

    /// Walks of odd length `3, 5, …, length` around a corner, maximised over
    /// both corner types.
    pub fn q(length: usize) -> Vec<u64> {
        qb(length, 1).into_iter().zip(qb(length, 0)).map(|(a, b)| a.max(b)).collect()
    }

    /// Fixed walks `γ` of the S-table procedure for one corner type.
    pub fn fixed_walks(length_gamma: usize, upper_bound: usize, o: u8) -> Vec<Path> {
        let a = alls(upper_bound, o);
        generate_saws(length_gamma, &a, &a, &lasts(&alls(upper_bound, 1 - o)))
    }
}

/// Square lattice with unit spacing.
pub mod square {
    use std::collections::HashSet;

    use super::*;

    pub fn starts2(n: usize) -> Vec<Path> {
        (1..=n).map(|i| vec![[0.0, i as f64], [1.0, i as f64]]).collect()
    }

    pub fn ends2(n: usize, o: u8) -> Vec<Path> {
        (1..=n)
            .map(|i| {
                let i = i as f64;
                if o == 1 {
                    vec![[1.0 - i, 1.0], [1.0 - i, 0.0]]
                } else {
                    vec![[i, 0.0], [i, 1.0]]
                }
            })
            .collect()
    }

    pub fn alls(length: usize, o: u8) -> Vec<Path> {
        let mut v = starts2(length);
        v.extend(ends2(length, o));
        v
    }

    /// Edge key: the two endpoints' bit patterns, unordered.
    fn edge_key(a: &Point, b: &Point) -> [(u64, u64); 2] {
        let (x, y) = ((a[0].to_bits(), a[1].to_bits()), (b[0].to_bits(), b[1].to_bits()));
        if x <= y {
            [x, y]
        } else {
            [y, x]
        }
    }

    pub fn esaw_with_avoidance(
        length: usize,
        start_paths: &[Path],
        end_paths: &[Path],
        intersect: &[Point],
        avoid: &[Point],
    ) -> Vec<Path> {
        let end_firsts = firsts(end_paths);
        let mut results: Vec<Path> = vec![];

        #[allow(clippy::too_many_arguments)]
        fn go(
            path: &mut Path,
            visited: &mut HashSet<[(u64, u64); 2]>,
            length: usize,
            end_firsts: &[Point],
            intersect: &[Point],
            avoid: &[Point],
            results: &mut Vec<Path>,
        ) {
            if path.len() == length + 1 {
                if in_path_with_tol(&path[path.len() - 1], end_firsts)
                    && hits(path, intersect)
                    && !hits(&path[1..path.len() - 1], avoid)
                    && !results.iter().any(|r| is_reverse_of(path, r))
                {
                    results.push(path.clone());
                }
                return;
            }
            let last = path[path.len() - 1];
            let second_last = path[path.len() - 2];
            let dx = last[0] - second_last[0];
            let dy = last[1] - second_last[1];
            let left = [last[0] - dy, last[1] + dx];
            let right = [last[0] + dy, last[1] - dx];
            let middle = [last[0] + dx, last[1] + dy];
            for next in [left, right, middle] {
                let edge = edge_key(&last, &next);
                if visited.contains(&edge) {
                    continue;
                }
                if in_path_with_tol(&last, end_firsts) && path.len() != length {
                    continue;
                }
                visited.insert(edge);
                path.push(next);
                go(path, visited, length, end_firsts, intersect, avoid, results);
                path.pop();
                visited.remove(&edge);
            }
        }

        for sp in start_paths {
            let mut path = sp.clone();
            let mut visited: HashSet<_> = path.windows(2).map(|w| edge_key(&w[0], &w[1])).collect();
            go(&mut path, &mut visited, length, &end_firsts, intersect, avoid, &mut results);
        }
        results
    }

    pub fn vertices(n: usize) -> Vec<Point> {
        (0..n).flat_map(|i| (0..n).map(move |j| [i as f64, j as f64])).collect()
    }

    /// Largest number of window walks of length `i` through a vertex of the
    /// `n × n` grid, over both corner types.
    pub fn maxes(i: usize, n: usize) -> u64 {
        let mut best = 0;
        for e in vertices(n) {
            let e = [e];
            for o in [0u8, 1] {
                let a = alls(2 * i, o);
                let fa = firsts(&a);
                let ends = ends2(2 * i, o);
                let c = esaw_with_avoidance(i, &starts2(2 * i), &a, &e, &fa).len()
                    + esaw_with_avoidance(i, &ends, &ends, &e, &fa).len();
                best = best.max(c as u64);
            }
        }
        best
    }
}
