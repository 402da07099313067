//! Monte-Carlo identities, tiny partition functions and the oracle suite.

use kpu_core::lattice::{LatticeKind, Vertex};
use kpu_core::oracle::{
    brute_force_partition, degree4_identity_exact, edge_identity_exact, mc_degree4_identity, polymer_value,
    run_suite, McConfig, OracleError, SpherePoint, TinyVolume, RANDOM_CONFIGURATIONS,
};

#[test]
fn analytic_cases() {
    let (n, x) = (SpherePoint::north(), SpherePoint::x_axis());
    assert!((edge_identity_exact(&n, &n) - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(edge_identity_exact(&n, &x), 0.0);
    assert!((degree4_identity_exact(&[n; 4]) - 0.2).abs() < 1e-15);
    let est = mc_degree4_identity(&[n; 4], &McConfig { seed: 3, samples: 200_000 }).unwrap();
    assert!(est.agrees_with(0.2), "{est:?}");
}

#[test]
fn suite_passes_and_is_reproducible() {
    let a = run_suite(42, 100_000).unwrap();
    let failures: Vec<_> = a.failures().collect();
    assert!(a.pass, "{failures:#?}");
    assert_eq!(a.checks.len(), 3 + 2 * RANDOM_CONFIGURATIONS + 2 + 5);
    assert_eq!(a, run_suite(42, 100_000).unwrap());
}

#[test]
fn polymer_values_in_closed_form() {
    // Single hexagon: (1 + 1/243)/64.
    let hex = polymer_value(&TinyVolume::hexagon(Vertex::new(0, 0)).unwrap());
    assert!((hex - 244.0 / (64.0 * 243.0)).abs() < 1e-15);
    // Unit square: (1 + 1/27)/16.
    let sq = polymer_value(&TinyVolume::unit_square(Vertex::new(0, 0)).unwrap());
    assert!((sq - (1.0 + 1.0 / 27.0) / 16.0).abs() < 1e-15);
    // A tree has no polymers: 2^{-|E|}.
    let path = TinyVolume::new(LatticeKind::Hexagonal, [(Vertex::new(0, 0), Vertex::new(1, 0))]).unwrap();
    assert_eq!(polymer_value(&path), 0.5);
}

#[test]
fn square_grid_partition_function() {
    let g = TinyVolume::square_grid(2, 2).unwrap();
    let r = brute_force_partition(&g, &McConfig { seed: 11, samples: 2_000_000 }).unwrap();
    assert!(r.agrees, "{r:?}");
}

#[test]
fn guards() {
    let cfg = McConfig { seed: 0, samples: 10 };
    let hex = TinyVolume::hexagon(Vertex::new(0, 0)).unwrap();
    assert!(matches!(brute_force_partition(&hex, &cfg), Err(OracleError::TooFewSamples { .. })));
    let two = hex.union(&TinyVolume::hexagon(Vertex::new(2, 0)).unwrap()).unwrap();
    let cfg = McConfig { seed: 0, samples: 100_000 };
    assert!(matches!(brute_force_partition(&two, &cfg), Err(OracleError::VolumeTooLarge { .. })));
    assert!(SpherePoint::new(0.0, 0.0, 0.0).is_err());
}
