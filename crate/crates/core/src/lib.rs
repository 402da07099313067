//! Enumeration of constrained lattice polymers and certification of
//! cluster-expansion convergence for AKLT models on the honeycomb and the
//! (decorated) square lattice.
//!
//! * [`lattice`] — exact integer geometry, annular volumes and boundary
//!   windows.
//! * [`polymer_hex`] / [`polymer_square`] — self-avoiding walks and loops on
//!   the honeycomb lattice, edge-self-avoiding trails on the square lattice.
//! * [`tables`] — the combinatorial tables feeding the convergence proof,
//!   with an on-disk cache.
//! * [`criterion`] — weights, tail sums and the convergence criterion.
//! * [`bounds`] — ground-state indistinguishability, LTQO and correlation
//!   bounds.
//! * [`oracle`] — Monte-Carlo identities, brute-force partition functions
//!   and a literal floating-point port of the reference enumerators.

pub mod bounds;
pub mod criterion;
pub mod golden;
pub mod lattice;
pub mod oracle;
pub mod polymer_hex;
pub mod polymer_square;
pub mod tables;

mod search;

use serde::{Deserialize, Serialize};

/// Any polymer of either lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polymer {
    Walk(polymer_hex::Walk),
    Loop(polymer_hex::Loop),
    Trail(polymer_square::Trail),
}

impl Polymer {
    /// Number of edges `|γ|`.
    pub fn len(&self) -> usize {
        match self {
            Polymer::Walk(w) => w.len(),
            Polymer::Loop(l) => l.len(),
            Polymer::Trail(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lattice(&self) -> lattice::LatticeKind {
        match self {
            Polymer::Trail(_) => lattice::LatticeKind::Square,
            _ => lattice::LatticeKind::Hexagonal,
        }
    }
}
