//! Table reproduction: exact agreement with the published counts, plus an
//! independent brute-force count of loops through a bond.

use std::collections::HashSet;

use kpu_core::golden::{check_table, golden};
use kpu_core::oracle::reference_port_compare;
use kpu_core::tables::{
    compute_table, loops_through_edge_table, q_table, r_table, s_table, square_cn_table, walks_to_boundary_table,
    SColumn, TableCache, TableError, TableId,
};

/// Brick-wall honeycomb neighbours, written out independently of the crate.
fn hex_nbrs(v: (i32, i32)) -> [(i32, i32); 3] {
    let (x, y) = v;
    let vertical = if (x + y).rem_euclid(2) == 0 { (x, y + 1) } else { (x, y - 1) };
    [(x - 1, y), (x + 1, y), vertical]
}

/// Number of self-avoiding polygons of each length `≤ max` through the bond
/// (0,0)–(1,0): walks from (1,0) back to (0,0), each polygon traversed in
/// the one orientation that uses the bond as (0,0) → (1,0).
fn brute_force_loops(max: usize) -> Vec<u64> {
    fn dfs(v: (i32, i32), len: usize, max: usize, seen: &mut HashSet<(i32, i32)>, counts: &mut [u64]) {
        for w in hex_nbrs(v) {
            if w == (0, 0) && len + 1 >= 6 {
                counts[len + 1] += 1;
            }
            if len + 1 < max && !seen.contains(&w) {
                seen.insert(w);
                dfs(w, len + 1, max, seen, counts);
                seen.remove(&w);
            }
        }
    }
    let mut counts = vec![0; max + 1];
    let mut seen: HashSet<_> = [(0, 0), (1, 0)].into_iter().collect();
    dfs((1, 0), 1, max, &mut seen, &mut counts);
    counts
}

#[test]
fn loops_table_matches_published_values() {
    let t = loops_through_edge_table(28).unwrap();
    assert!(check_table(&t).is_empty(), "{:?}", check_table(&t));
    assert_eq!(t.get(6), Some(2));
    assert_eq!(t.get(28), Some(81368));
}

#[test]
fn loops_table_matches_brute_force() {
    let bf = brute_force_loops(18);
    let t = loops_through_edge_table(18).unwrap();
    for l in (6..=18).step_by(2) {
        assert_eq!(t.get(l), Some(bf[l]), "l = {l}");
    }
    assert!((7..=17).step_by(2).all(|l| bf[l] == 0), "odd polygons on a bipartite lattice");
}

#[test]
fn walks_to_boundary_table_matches_published_values() {
    let t = walks_to_boundary_table(10).unwrap();
    assert!(check_table(&t).is_empty(), "{:?}", check_table(&t));
    assert_eq!(t.as_map().values().copied().collect::<Vec<_>>(), vec![1, 2, 2, 4, 6, 8, 16, 24, 40, 64]);
}

#[test]
fn r_table_matches_published_values() {
    let t = r_table(20).unwrap();
    assert!(check_table(&t).is_empty(), "{:?}", check_table(&t));
    assert_eq!(t.rows.len(), 9);
}

#[test]
fn q_table_matches_published_values() {
    let t = q_table(19).unwrap();
    assert!(check_table(&t).is_empty(), "{:?}", check_table(&t));
    assert_eq!(t.get(19), Some(6803));
}

#[test]
fn square_cn_table_matches_published_values() {
    let t = square_cn_table(7).unwrap();
    assert!(check_table(&t).is_empty(), "{:?}", check_table(&t));
}

#[test]
fn s_table_bold_entries() {
    let s = s_table(20).unwrap();
    assert_eq!(s.column(SColumn::W5).loops6, 3);
    assert_eq!(s.column(SColumn::W5).loops10, 11);
    let g = golden();
    assert_eq!(g.s_cell("w5", "Mal6"), Some(3));
    assert_eq!(g.s_cell("w5", "Mal10"), Some(11));
}

#[test]
fn s_table_walk_column_w3_matches_published_values() {
    let t = s_table(20).unwrap().to_result();
    let g = golden();
    for row in std::iter::once("M3".to_string()).chain((4..=20).map(|l| format!("S{l}"))) {
        assert_eq!(t.cell(SColumn::W3, &row), g.s_cell("w3", &row), "w3:{row}");
    }
}

#[test]
fn s_table_rows_and_round_trip() {
    let s = s_table(12).unwrap();
    let t = s.to_result();
    assert_eq!(t.rows.len(), 5 * (10 + 2));
    assert_eq!(kpu_core::tables::STable::from_result(&t).as_ref(), Some(&s));
}

#[test]
fn reference_port_parity() {
    for (id, max) in [
        (TableId::LoopsThroughEdge, 14),
        (TableId::WalksToBoundaryN, 8),
        (TableId::RightEndpointR, 12),
        (TableId::OddCornerQ, 11),
        (TableId::SquareCn, 5),
    ] {
        let d = reference_port_compare(id, max).unwrap();
        assert!(d.is_empty(), "{id}: {:?}", d.diffs);
    }
}

#[test]
fn invalid_ranges_are_rejected() {
    assert!(matches!(loops_through_edge_table(7), Err(TableError::InvalidRange { .. })));
    assert!(matches!(loops_through_edge_table(4), Err(TableError::InvalidRange { .. })));
    assert!(matches!(s_table(2), Err(TableError::InvalidRange { .. })));
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = TableCache::new(dir.path());
    let first = compute_table(TableId::RightEndpointR, 16, Some(&cache)).unwrap();
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let second = compute_table(TableId::RightEndpointR, 16, Some(&cache)).unwrap();
    assert_eq!(first, second);
    assert_eq!(first, r_table(16).unwrap());
}

#[test]
fn stale_cache_entries_are_ignored() {
    let dir = tempfile::tempdir().unwrap();
    let cache = TableCache::new(dir.path());
    let t = compute_table(TableId::OddCornerQ, 9, Some(&cache)).unwrap();
    let path = std::fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    let mut stale = t.clone();
    stale.generator_version = "0.0.0+stale".into();
    stale.rows[0].value = 999;
    std::fs::write(&path, serde_json::to_string(&stale).unwrap()).unwrap();
    let again = compute_table(TableId::OddCornerQ, 9, Some(&cache)).unwrap();
    assert_eq!(again.get(3), Some(1));
}

#[test]
fn csv_rendering() {
    let t = r_table(20).unwrap();
    let csv = t.to_csv();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "index,value");
    assert_eq!(lines.len(), 1 + 9);
    assert_eq!(lines[9], "20,1943");
}
