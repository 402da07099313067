//! Property suites: canonical forms, bipartiteness, deterministic parallel
//! enumeration and closed-form tail sums.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use proptest::prelude::*;

use kpu_core::criterion::{little_w, tail_sum_loops, tail_sum_walks, verify_kpu_hex, WalkTail, WeightParams};
use kpu_core::lattice::{
    hex_continuations, hexagon_vertices, square_continuations, Edge, LatticeKind, Vertex,
};
use kpu_core::oracle::{mc_edge_identity, McConfig, SpherePoint};
use kpu_core::polymer_hex::{loops_through_bond_by_length, loops_touching, Loop, Walk};
use kpu_core::polymer_square::{closed_trails_through, Trail, TrailKind};
use kpu_core::tables::{loops_through_edge_table, q_table, s_table, square_cn_table};

/// A self-avoiding honeycomb walk grown from the bond (0,0)→(1,0) by the
/// given left/right choices, stopped before the first self-intersection.
fn grow_hex_walk(choices: &[bool]) -> Walk {
    let mut v = vec![Vertex::new(0, 0), Vertex::new(1, 0)];
    for &c in choices {
        let k = v.len();
        let next = hex_continuations(v[k - 2], v[k - 1])[c as usize];
        if v.contains(&next) {
            break;
        }
        v.push(next);
    }
    Walk::new(v).expect("grown walk is self-avoiding")
}

/// An edge-self-avoiding square trail grown from (0,0)→(1,0), stopped before
/// the first repeated edge or third visit of a vertex.
fn grow_square_trail(choices: &[u8]) -> Trail {
    let mut v = vec![Vertex::new(0, 0), Vertex::new(1, 0)];
    let mut edges: BTreeSet<Edge> = [Edge::new(v[0], v[1], LatticeKind::Square).unwrap()].into_iter().collect();
    for &c in choices {
        let k = v.len();
        let next = square_continuations(v[k - 2], v[k - 1])[c as usize % 3];
        let e = Edge::new(v[k - 1], next, LatticeKind::Square).unwrap();
        if edges.contains(&e) || v.iter().filter(|&&u| u == next).count() >= 2 {
            break;
        }
        edges.insert(e);
        v.push(next);
    }
    Trail::new(TrailKind::Walk, v).expect("grown trail is valid")
}

fn hex_loops() -> &'static Vec<Loop> {
    static L: OnceLock<Vec<Loop>> = OnceLock::new();
    L.get_or_init(|| {
        let touch = hexagon_vertices(Vertex::new(0, 0));
        (6..=12).step_by(2).flat_map(|len| loops_touching(&touch, len, &[])).collect()
    })
}

fn square_loops() -> &'static Vec<Trail> {
    static L: OnceLock<Vec<Trail>> = OnceLock::new();
    L.get_or_init(|| (4..=10).step_by(2).flat_map(|n| closed_trails_through(Vertex::new(0, 0), n, &[])).collect())
}

fn rotate<T: Clone>(v: &[T], r: usize, reverse: bool) -> Vec<T> {
    let mut out: Vec<T> = v[r % v.len()..].iter().chain(&v[..r % v.len()]).cloned().collect();
    if reverse {
        out.reverse();
    }
    out
}

fn parity(v: Vertex) -> i32 {
    (v.x + v.y).rem_euclid(2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn walk_canonicalization_is_idempotent(choices in prop::collection::vec(any::<bool>(), 1..40)) {
        let w = grow_hex_walk(&choices);
        let c = w.canonical();
        prop_assert_eq!(c.canonical(), c.clone());
        prop_assert!(c == w || c == w.reversed());
    }

    #[test]
    fn walk_canonical_form_is_reversal_invariant(choices in prop::collection::vec(any::<bool>(), 1..40)) {
        let w = grow_hex_walk(&choices);
        prop_assert_eq!(w.reversed().canonical(), w.canonical());
    }

    #[test]
    fn honeycomb_walks_alternate_colour(choices in prop::collection::vec(any::<bool>(), 1..40)) {
        let w = grow_hex_walk(&choices);
        for p in w.vertices().windows(2) {
            prop_assert_ne!(parity(p[0]), parity(p[1]));
        }
    }

    #[test]
    fn loop_canonical_form_is_rotation_and_reversal_invariant(
        idx in any::<prop::sample::Index>(), r in 0usize..20, rev in any::<bool>()
    ) {
        let l = idx.get(hex_loops());
        let moved = Loop::new(rotate(l.vertices(), r, rev)).unwrap();
        prop_assert_eq!(moved.canonical(), l.canonical());
        prop_assert_eq!(l.canonical().canonical(), l.canonical());
    }

    #[test]
    fn honeycomb_loops_are_even_and_bipartite(idx in any::<prop::sample::Index>()) {
        let l = idx.get(hex_loops());
        prop_assert_eq!(l.len() % 2, 0);
        let v = l.vertices();
        for i in 0..v.len() {
            prop_assert_ne!(parity(v[i]), parity(v[(i + 1) % v.len()]));
        }
    }

    #[test]
    fn trail_canonicalization(choices in prop::collection::vec(0u8..3, 1..30)) {
        let t = grow_square_trail(&choices);
        let c = t.canonical();
        prop_assert_eq!(c.canonical(), c.clone());
        let mut rev = t.vertices().to_vec();
        rev.reverse();
        prop_assert_eq!(Trail::new(TrailKind::Walk, rev).unwrap().canonical(), c);
    }

    #[test]
    fn closed_trail_canonical_form_is_invariant(
        idx in any::<prop::sample::Index>(), r in 0usize..20, rev in any::<bool>()
    ) {
        let t = idx.get(square_loops());
        prop_assert_eq!(t.len() % 2, 0);
        let moved = Trail::new(TrailKind::Loop, rotate(t.vertices(), r, rev)).unwrap();
        prop_assert_eq!(moved.canonical(), t.canonical());
    }

    #[test]
    fn sphere_points_are_normalised(theta in 0.0f64..std::f64::consts::PI, phi in 0.0f64..6.3) {
        prop_assert!((SpherePoint::from_angles(theta, phi).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn loop_tail_matches_truncated_sum(m in 0u32..4, l_start in 4usize..30) {
        let p = WeightParams::hex(m);
        let closed = tail_sum_loops(l_start, &p).unwrap();
        let truncated: f64 = (l_start..l_start + 300)
            .map(|l| 2f64.powi(2 * l as i32 - 3) * little_w(2 * l, &p))
            .sum();
        prop_assert!((closed - truncated).abs() <= 1e-10 * closed, "{} vs {}", closed, truncated);
    }

    #[test]
    fn walk_tails_match_truncated_sums(m in 0u32..4, l_start in 7usize..40) {
        let p = WeightParams::hex(m);
        let interior: f64 = (l_start..l_start + 300)
            .map(|l| (2.0 * l as f64 + 95.0) * 2f64.powi(l as i32 - 10) * little_w(l, &p))
            .sum();
        let boundary: f64 = (l_start..l_start + 300).map(|l| 2f64.powi(l as i32 - 4) * little_w(l, &p)).sum();
        let ci = tail_sum_walks(l_start, &p, WalkTail::Interior).unwrap();
        let cb = tail_sum_walks(l_start, &p, WalkTail::Boundary).unwrap();
        prop_assert!((ci - interior).abs() <= 1e-10 * ci, "{} vs {}", ci, interior);
        prop_assert!((cb - boundary).abs() <= 1e-10 * cb, "{} vs {}", cb, boundary);
    }
}

#[test]
fn odd_loops_do_not_exist() {
    let counts = loops_through_bond_by_length(kpu_core::lattice::hex_start_arm(0)[0], 17);
    for l in (1..=17).step_by(2) {
        assert_eq!(counts[l], 0, "l = {l}");
    }
    let touch = hexagon_vertices(Vertex::new(0, 0));
    assert!(loops_touching(&touch, 9, &[]).is_empty());
    assert!(closed_trails_through(Vertex::new(0, 0), 7, &[]).is_empty());
}

#[test]
fn tails_reject_explicit_range() {
    assert!(tail_sum_walks(6, &WeightParams::hex(0), WalkTail::Interior).is_err());
    assert!(tail_sum_loops(3, &WeightParams::hex(0)).is_err());
    assert!(tail_sum_loops(5, &WeightParams::for_lattice(LatticeKind::Square, 1)).is_err());
}

fn with_threads<T: Send>(n: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(f)
}

#[test]
fn parallel_enumeration_is_deterministic() {
    let run = || {
        (
            loops_through_edge_table(20).unwrap(),
            q_table(15).unwrap(),
            s_table(12).unwrap(),
            square_cn_table(6).unwrap(),
            verify_kpu_hex(0, 25, 78).unwrap().totals(),
        )
    };
    let one = with_threads(1, run);
    let eight = with_threads(8, run);
    assert_eq!(one.0, eight.0);
    assert_eq!(one.1, eight.1);
    assert_eq!(one.2, eight.2);
    assert_eq!(one.3, eight.3);
    assert_eq!(one.4, eight.4, "criterion totals must be bitwise identical");
}

#[test]
fn monte_carlo_is_deterministic_across_thread_counts() {
    let cfg = McConfig { seed: 7, samples: 300_000 };
    let run = || mc_edge_identity(&SpherePoint::north(), &SpherePoint::x_axis(), &cfg).unwrap();
    assert_eq!(with_threads(1, run), with_threads(8, run));
}
