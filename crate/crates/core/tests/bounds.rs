//! Bound evaluation: constants, closed forms and regime checks.

use kpu_core::bounds::{
    correlation_bound, f_bound, indistinguishability_bound, ltqo_bound, smallest_width_below, BoundsReport,
    ModelConstants,
};
use kpu_core::golden::{check_constant, golden};
use kpu_core::lattice::LatticeKind::{Hexagonal, Square};

#[test]
fn eta_relations() {
    let h = ModelConstants::for_lattice(Hexagonal);
    assert_eq!(h.eta, 2.0 * h.epsilon());
    assert_eq!(h.eta, 0.0172);
    let s = ModelConstants::for_lattice(Square);
    assert_eq!(s.eta, s.epsilon());
    assert_eq!(s.eta, 0.046);
}

#[test]
fn hex_c_gamma_recomputes() {
    let c = ModelConstants::for_lattice(Hexagonal).c_gamma_check();
    assert!(check_constant("C_hex", c.recomputed, 5e-4).is_none(), "{}", c.recomputed);
    assert!(!c.discrepancy);
}

#[test]
fn square_c_gamma_discrepancy_is_flagged() {
    let c = ModelConstants::for_lattice(Square).c_gamma_check();
    assert_eq!(c.quoted, golden().constant("C_square").unwrap().value);
    assert!(c.discrepancy);
    assert!((c.recomputed - 2.6494).abs() < 5e-4, "{}", c.recomputed);
    let r = ltqo_bound(Square, 1, 100, 2, 1.0).unwrap();
    assert!(r.notes.iter().any(|n| n.contains("2.4951") && n.contains("2.6494")));
}

#[test]
fn f_bound_closed_form() {
    // (m+1)(3.6K + 1.8)e^{−0.0172(m+1)(N−K)}
    let r = f_bound(Hexagonal, 1, 200, 25);
    let expected = 2.0 * (3.6 * 25.0 + 1.8) * (-0.0172f64 * 2.0 * 175.0).exp();
    assert!((r.value / expected - 1.0).abs() < 1e-12);
    assert!(r.regime_ok);
    let s = f_bound(Square, 1, 40, 2);
    let expected = 2.0 * 1.36 * 2.0 * (-0.046f64 * 2.0 * 38.0).exp();
    assert!((s.value / expected - 1.0).abs() < 1e-12);
}

#[test]
fn f_bound_regime() {
    assert!(!f_bound(Hexagonal, 0, 77, 25).regime_ok);
    assert!(!f_bound(Hexagonal, 0, 100, 24).regime_ok);
    assert!(!f_bound(Square, 0, 100, 2).regime_ok);
    assert!(f_bound(Square, 1, 100, 2).regime_ok);
}

#[test]
fn indistinguishability_closed_form() {
    let f = f_bound(Hexagonal, 0, 300, 25).value;
    let r = indistinguishability_bound(Hexagonal, 0, 300, 25, 2.5).unwrap();
    assert!((r.value - 2.0 * 2.5 * f * f.exp()).abs() < 1e-15);
    assert!(indistinguishability_bound(Hexagonal, 0, 300, 25, -1.0).is_err());
}

#[test]
fn ltqo_closed_form_and_regime() {
    let c = ModelConstants::for_lattice(Hexagonal);
    let k = 25i64;
    // The hypothesis N ≥ K + max(N_Γ, ln K/η) needs N − K ≥ 187.14 at K = 25.
    let width = (k as f64).ln() / 0.0172;
    assert!(width > 187.0 && width < 187.2);
    let at_200 = ltqo_bound(Hexagonal, 0, 200, k, 1.0).unwrap();
    assert!(!at_200.regime_ok);
    assert!(ltqo_bound(Hexagonal, 0, 213, k, 1.0).unwrap().regime_ok);
    assert!(!ltqo_bound(Hexagonal, 0, 212, k, 1.0).unwrap().regime_ok);

    let expected = 2.0 * c.c_gamma_recomputed() * (c.loop_length(k) as f64) * (-0.0172f64 * 175.0).exp();
    assert!((at_200.value / expected - 1.0).abs() < 1e-12);
    // |γ^(K)| = 6(2K − 1) on the honeycomb.
    assert_eq!(c.loop_length(k), 294);
}

#[test]
fn correlation_regime_thresholds() {
    assert!(!correlation_bound(Hexagonal, 50, 49, 1.0, 1.0).unwrap().regime_ok);
    assert!(correlation_bound(Hexagonal, 50, 50, 1.0, 1.0).unwrap().regime_ok);
    assert!(!correlation_bound(Hexagonal, 49, 60, 1.0, 1.0).unwrap().regime_ok);
    assert!(!correlation_bound(Square, 10, 7, 1.0, 1.0).unwrap().regime_ok);
    assert!(correlation_bound(Square, 10, 8, 1.0, 1.0).unwrap().regime_ok);
    let r = correlation_bound(Hexagonal, 50, 100, 2.0, 3.0).unwrap();
    let expected = 6.0 * 50f64.powf(2.9) * (-0.0086f64 * 100.0).exp();
    assert!((r.value / expected - 1.0).abs() < 1e-12);
}

#[test]
fn smallest_width_is_tight() {
    let target = 1e-3;
    let w = smallest_width_below(Hexagonal, 0, 25, target, 10_000).unwrap();
    let at = |w: i64| indistinguishability_bound(Hexagonal, 0, 25 + w, 25, 1.0).unwrap().value;
    assert!(at(w) < target && at(w - 1) >= target);
    assert!(smallest_width_below(Hexagonal, 0, 25, 1e-300, 10).is_err());
}

#[test]
fn report_carries_constant_check() {
    let r = BoundsReport::new(Square, vec![f_bound(Square, 1, 100, 2)]);
    assert!(r.c_gamma.discrepancy);
    assert!(r.regime_ok());
}
