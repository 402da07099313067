//! Convergence-criterion checks: published totals, monotonicity in the
//! decoration, the square lattice and regime handling.

use kpu_core::criterion::{
    little_w, verify_kpu_hex, verify_kpu_hex_with, verify_kpu_square, CriterionError, FixedClass, HexOptions,
    LoopEvenRule, SummedClass, WeightParams, A_SQUARE,
};
use kpu_core::golden::{check_totals, golden};
use kpu_core::lattice::LatticeKind;

#[test]
fn hex_m0_cells_match_published_table() {
    let r = verify_kpu_hex(0, 25, 78).unwrap();
    assert!(r.pass);
    let mismatches = check_totals(&r, 1e-4);
    assert!(mismatches.is_empty(), "{mismatches:#?}");
}

#[test]
fn hex_m0_totals_within_tolerance() {
    let r = verify_kpu_hex(0, 25, 78).unwrap();
    let g = golden();
    for class in FixedClass::ALL {
        let col = r.column(class.label()).unwrap();
        let printed = g.total_cell(class.label(), "Total").unwrap();
        assert!((col.total - printed).abs() <= 5e-4, "{}: {} vs {printed}", class.label(), col.total);
        assert!(col.total < 1.0);
    }
}

#[test]
fn hex_report_layout() {
    let r = verify_kpu_hex(0, 25, 78).unwrap();
    assert_eq!(r.columns.len(), 7);
    let rows: Vec<String> = SummedClass::all().into_iter().map(|c| c.label()).collect();
    for col in &r.columns {
        let got: Vec<&str> = col.cells.iter().map(|c| c.row.as_str()).collect();
        assert_eq!(got, rows.iter().map(String::as_str).collect::<Vec<_>>());
        let sum: f64 = col.cells.iter().map(|c| c.value).sum();
        assert!((sum - col.total).abs() < 1e-12);
        assert!((col.threshold - col.total - col.margin).abs() < 1e-12);
    }
    assert_eq!(r.dmin, Some(20));
}

#[test]
fn hex_totals_decrease_with_decoration() {
    let mut prev = verify_kpu_hex(0, 25, 78).unwrap().totals();
    for m in 1..=3 {
        let r = verify_kpu_hex(m, 25, 78).unwrap();
        assert!(r.pass, "m = {m}");
        let cur = r.totals();
        for (a, b) in prev.iter().zip(&cur) {
            assert!(b < a, "m = {m}: {b} !< {a}");
        }
        prev = cur;
    }
}

#[test]
fn hex_ball_differs_only_in_two_cells() {
    let r = verify_kpu_hex(0, 0, 60).unwrap();
    assert!(r.pass);
    let cells: Vec<(&str, &str)> = r.ball_deviations.iter().map(|d| (d.column.as_str(), d.row.as_str())).collect();
    assert_eq!(cells, vec![("W5", "L6"), ("W5", "L10")]);
    for d in &r.ball_deviations {
        assert!(d.ball < d.annulus);
    }
}

#[test]
fn hex_corridor_rule_is_larger_but_converges() {
    let opts = HexOptions { loop_even_rule: LoopEvenRule::Corridor };
    let corridor = verify_kpu_hex_with(0, 25, 78, &opts, None).unwrap();
    let tabulated = verify_kpu_hex(0, 25, 78).unwrap();
    let (c, t) = (corridor.column("L>6").unwrap().total, tabulated.column("L>6").unwrap().total);
    assert!(c > t && c < 1.0, "{c} vs {t}");
}

#[test]
fn hex_outside_regime() {
    assert!(matches!(verify_kpu_hex(0, 24, 78), Err(CriterionError::OutsideRegime(_))));
    assert!(matches!(verify_kpu_hex(0, 25, 77), Err(CriterionError::OutsideRegime(_))));
}

#[test]
fn square_m1_total() {
    let r = verify_kpu_square(1, 2, 10).unwrap();
    let total = r.columns[0].total;
    let printed = golden().constant("square_total").unwrap().value;
    assert!(total <= printed + 5e-4, "{total}");
    assert!(total < A_SQUARE);
    assert!(r.pass);
}

#[test]
fn square_totals_decrease_with_decoration() {
    let t: Vec<f64> = (1..=3).map(|m| verify_kpu_square(m, 2, 10).unwrap().columns[0].total).collect();
    assert!(t[0] > t[1] && t[1] > t[2], "{t:?}");
}

#[test]
fn square_refuses_undecorated_and_small_volumes() {
    assert!(matches!(verify_kpu_square(0, 2, 10), Err(CriterionError::UndecoratedSquare)));
    assert!(matches!(verify_kpu_square(1, 2, 6), Err(CriterionError::OutsideRegime(_))));
}

#[test]
fn little_w_closed_forms() {
    // w_m(l) = 3(e^{0.15 l + 0.0086 l}/3^l)^{m+1} in the linear range.
    for m in 0..3u32 {
        let p = WeightParams::hex(m);
        for l in [7usize, 10, 20] {
            let expected = 3.0 * ((0.1586 * l as f64).exp() / 3f64.powi(l as i32)).powi(m as i32 + 1);
            assert!((little_w(l, &p) / expected - 1.0).abs() < 1e-12);
        }
    }
    // Explicit value a(3) = 0.52.
    let expected = 3.0 * ((0.52f64 + 3.0 * 0.0086).exp() / 27.0);
    assert!((little_w(3, &WeightParams::hex(0)) / expected - 1.0).abs() < 1e-12);
    // Square: e^{(a+ε)(m+1)n}/((m+1)3^{(m+1)n−1}).
    let p = WeightParams::for_lattice(LatticeKind::Square, 1);
    let expected = (0.131f64 * 2.0 * 5.0).exp() / (2.0 * 3f64.powi(9));
    assert!((little_w(5, &p) / expected - 1.0).abs() < 1e-12);
}
