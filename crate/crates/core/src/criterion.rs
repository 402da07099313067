//! Polymer weights, tail sums and verification of the KPU cluster-expansion
//! convergence criterion.
//!
//! For the honeycomb lattice the criterion is checked column by column: a
//! column fixes the class of the polymer `γ` (walks of length 3–6, hexagons,
//! longer walks, longer loops) and its rows bound the contribution of every
//! incompatible polymer class `γ'`, normalised by `a(|γ|)`. Every column must
//! total strictly less than one. Decorated models reduce to the undecorated
//! bookkeeping through the factor `w_m(l)/(m+1)`, which is non-increasing
//! in `m`.
//!
//! For the decorated square lattice a single sum `Σ_n C_n w_m(n)` must stay
//! below `a = 0.085`.
//!
//! Arithmetic is `f64`; whenever a margin to the threshold drops below
//! [`CERTIFIED_SLACK`] the affected column is recomputed in double-double
//! precision.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use twofloat::TwoFloat;

use crate::lattice::{Corner, LatticeKind};
use crate::tables::{compute_table, HexTables, SColumn, TableCache, TableError, TableId};
use crate::Polymer;

/// `ε` for the honeycomb lattice.
pub const EPSILON_HEX: f64 = 0.0086;
/// `ε` for the decorated square lattice.
pub const EPSILON_SQUARE: f64 = 0.046;
/// Slope `a` of the square-lattice `a(γ) = a|γ|`.
pub const A_SQUARE: f64 = 0.085;
/// Smallest inner radius for which the annulus bounds are proven.
pub const K_MIN_HEX: i64 = 25;
/// Smallest annulus width `N − K` for which the bounds are proven.
pub const WIDTH_MIN_HEX: i64 = 53;
/// Margins below this trigger an extended-precision recomputation.
pub const CERTIFIED_SLACK: f64 = 1e-4;
/// Cap on `κ^w(l, l')/l` for walks longer than six.
pub const KAPPA_WALK: f64 = 1.0 / 7.0;
/// Cap on `κ^ℓ(l, l')/l` for loops longer than six.
pub const KAPPA_LOOP: f64 = 1.0 / 10.0;

#[derive(Debug, Error)]
pub enum CriterionError {
    #[error("outside proven regime: {0}")]
    OutsideRegime(String),
    #[error("criterion not satisfied for undecorated square lattice (m = 0); decoration m >= 1 is required")]
    UndecoratedSquare,
    #[error("series diverges: ratio {ratio} >= 1")]
    Divergent { ratio: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("missing table data: {0}")]
    MissingTable(String),
    #[error(transparent)]
    Table(#[from] TableError),
}

// ---------------------------------------------------------------------------
// Scalars

/// The arithmetic used by the criterion: `f64`, or double-double for the
/// certified recomputation.
pub(crate) trait Real:
    Copy + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    /// Converts a parameter, reading it as the decimal it prints as (so that
    /// `0.0086` is exactly `86/10000` in extended precision).
    fn decimal(x: f64) -> Self;
    fn int(n: i64) -> Self;
    fn exp(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn to_f64(self) -> f64;
}

impl Real for f64 {
    fn decimal(x: f64) -> Self {
        x
    }
    fn int(n: i64) -> Self {
        n as f64
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn to_f64(self) -> f64 {
        self
    }
}

impl Real for TwoFloat {
    fn decimal(x: f64) -> Self {
        let text = format!("{x}");
        match text.split_once('.') {
            Some((int, frac)) if !text.contains('e') && int.len() + frac.len() <= 15 => {
                let digits: i64 = format!("{int}{frac}").parse().expect("decimal digits");
                TwoFloat::from(digits as f64) / TwoFloat::from(10f64.powi(frac.len() as i32))
            }
            _ => TwoFloat::from(x),
        }
    }
    fn int(n: i64) -> Self {
        TwoFloat::from(n as f64)
    }
    fn exp(self) -> Self {
        TwoFloat::exp(self)
    }
    fn powi(self, n: i32) -> Self {
        TwoFloat::powi(self, n)
    }
    fn to_f64(self) -> f64 {
        self.hi() + self.lo()
    }
}

// ---------------------------------------------------------------------------
// Weights

/// The function `a(l)`: explicit values for short polymers, linear beyond.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct AFunction {
    /// Explicit values `l → a(l)`.
    pub explicit: BTreeMap<usize, f64>,
    /// Slope `c` of `a(l) = c·l` for lengths without an explicit value.
    pub slope: f64,
}

impl AFunction {
    pub fn eval(&self, l: usize) -> f64 {
        self.explicit.get(&l).copied().unwrap_or(self.slope * l as f64)
    }

    fn eval_r<R: Real>(&self, l: usize) -> R {
        match self.explicit.get(&l) {
            Some(&v) => R::decimal(v),
            None => R::decimal(self.slope) * R::int(l as i64),
        }
    }

    /// Smallest length from which `a` is linear.
    fn linear_from(&self) -> usize {
        self.explicit.keys().next_back().map_or(0, |l| l + 1)
    }
}

/// Weight parameters of one lattice and decoration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct WeightParams {
    pub lattice: LatticeKind,
    /// Number of decoration sites per edge.
    pub m: u32,
    pub epsilon: f64,
    pub a: AFunction,
}

impl WeightParams {
    /// Honeycomb parameters: `a(3..=6) = .52, .56, .66, .70`, `a(l) = .15 l`
    /// beyond, `ε = 0.0086`.
    pub fn hex(m: u32) -> Self {
        let explicit = [(3, 0.52), (4, 0.56), (5, 0.66), (6, 0.70)].into_iter().collect();
        Self { lattice: LatticeKind::Hexagonal, m, epsilon: EPSILON_HEX, a: AFunction { explicit, slope: 0.15 } }
    }

    /// Square-lattice parameters: `a(γ) = .085|γ|`, `ε = 0.046`.
    pub fn square(m: u32) -> Self {
        Self {
            lattice: LatticeKind::Square,
            m,
            epsilon: EPSILON_SQUARE,
            a: AFunction { explicit: BTreeMap::new(), slope: A_SQUARE },
        }
    }

    pub fn for_lattice(lattice: LatticeKind, m: u32) -> Self {
        match lattice {
            LatticeKind::Hexagonal => Self::hex(m),
            LatticeKind::Square => Self::square(m),
        }
    }

    /// `a(l)` of the undecorated model.
    pub fn a_of(&self, l: usize) -> f64 {
        self.a.eval(l)
    }

    /// `a_m(l) = (m+1) a(l)`.
    pub fn a_m(&self, l: usize) -> f64 {
        (self.m as f64 + 1.0) * self.a_of(l)
    }

    /// `b(γ) = ε(m+1)|γ|`.
    pub fn b(&self, l: usize) -> f64 {
        self.epsilon * (self.m as f64 + 1.0) * l as f64
    }
}

/// Uniform bound on `|W_m(γ)|` (using `|∂γ(Ω)| ≤ 1`):
/// `(1/3)^{(m+1)|γ|−1}`, times `(3/5)^{|V⁴_γ|}` for square-lattice trails.
pub fn weight_magnitude(gamma: &Polymer, params: &WeightParams) -> f64 {
    let exponent = (params.m as i32 + 1) * gamma.len() as i32 - 1;
    let base = (1.0f64 / 3.0).powi(exponent);
    match gamma {
        Polymer::Trail(t) => base * 0.6f64.powi(t.degree_four_vertices().len() as i32),
        _ => base,
    }
}

/// The length weight `w_m(l)`.
///
/// Honeycomb: `w_m(l) = 3(e^{a(l)+εl}/3^l)^{m+1}`. Square lattice:
/// `w_m(n) = e^{(a+ε)(m+1)n}/((m+1)3^{(m+1)n−1})`, which already contains the
/// division by `m+1`.
pub fn little_w(l: usize, params: &WeightParams) -> f64 {
    little_w_r::<f64>(l, params)
}

fn little_w_r<R: Real>(l: usize, p: &WeightParams) -> R {
    let m1 = p.m as i32 + 1;
    let eps = R::decimal(p.epsilon);
    let len = R::int(l as i64);
    match p.lattice {
        LatticeKind::Hexagonal => {
            let base = (p.a.eval_r::<R>(l) + eps * len).exp() / R::int(3).powi(l as i32);
            R::int(3) * base.powi(m1)
        }
        LatticeKind::Square => {
            let a = R::decimal(p.a.slope);
            ((a + eps) * R::int(m1 as i64) * len).exp()
                / (R::int(m1 as i64) * R::int(3).powi(m1 * l as i32 - 1))
        }
    }
}

/// The weight entering the per-`(m+1)` normalised criterion: `w_m(l)/(m+1)`
/// on the honeycomb lattice, `w_m(n)` on the square lattice.
pub fn normalized_w(l: usize, params: &WeightParams) -> f64 {
    normalized_w_r::<f64>(l, params)
}

fn normalized_w_r<R: Real>(l: usize, p: &WeightParams) -> R {
    match p.lattice {
        LatticeKind::Hexagonal => little_w_r::<R>(l, p) / R::int(p.m as i64 + 1),
        LatticeKind::Square => little_w_r::<R>(l, p),
    }
}

/// Per-step factor `q = (e^{c+ε}/3)^{m+1}` of `w_m` in its linear range
/// (`w_m(l) = 3q^l` there).
fn hex_step<R: Real>(p: &WeightParams) -> R {
    ((R::decimal(p.a.slope) + R::decimal(p.epsilon)).exp() / R::int(3)).powi(p.m as i32 + 1)
}

// ---------------------------------------------------------------------------
// Tail sums

/// Which cardinality bound the walk tail uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum WalkTail {
    /// Walks meeting the fixed polymer in its interior: `(2l+95)2^{l−10}`.
    Interior,
    /// Walks sharing a boundary endpoint with the fixed polymer: `2^{l−4}`.
    Boundary,
}

fn check_hex(p: &WeightParams) -> Result<(), CriterionError> {
    if p.lattice != LatticeKind::Hexagonal {
        return Err(CriterionError::InvalidArgument("honeycomb tail sums need honeycomb parameters".into()));
    }
    Ok(())
}

/// `Σ_{l ≥ l_start} 2^{2l−3} w_m(2l)`: loops of length `2l` through a fixed
/// edge, bounded by `2^{2l−3}`, summed in closed form as a geometric series
/// with ratio `4q²`.
pub fn tail_sum_loops(l_start: usize, params: &WeightParams) -> Result<f64, CriterionError> {
    tail_loops_r::<f64>(l_start, params)
}

fn tail_loops_r<R: Real>(l_start: usize, p: &WeightParams) -> Result<R, CriterionError> {
    check_hex(p)?;
    if 2 * l_start < p.a.linear_from() {
        return Err(CriterionError::InvalidArgument(format!(
            "loop tail must start in the linear range of a(l) (2·l_start >= {})",
            p.a.linear_from()
        )));
    }
    let q = hex_step::<R>(p);
    let ratio = R::int(4) * q * q;
    if ratio.to_f64() >= 1.0 {
        return Err(CriterionError::Divergent { ratio: ratio.to_f64() });
    }
    Ok(R::int(3) / R::int(8) * ratio.powi(l_start as i32) / (R::int(1) - ratio))
}

/// `Σ_{l ≥ l_start} c(l) w_m(l)` with `c(l) = (2l+95)2^{l−10}` or `2^{l−4}`
/// (see [`WalkTail`]), in closed form as an arithmetico-geometric series with
/// ratio `2q`.
pub fn tail_sum_walks(l_start: usize, params: &WeightParams, kind: WalkTail) -> Result<f64, CriterionError> {
    tail_walks_r::<f64>(l_start, params, kind)
}

fn tail_walks_r<R: Real>(l_start: usize, p: &WeightParams, kind: WalkTail) -> Result<R, CriterionError> {
    check_hex(p)?;
    if l_start < p.a.linear_from() {
        return Err(CriterionError::InvalidArgument(format!(
            "walk tail must start in the linear range of a(l) (l_start >= {})",
            p.a.linear_from()
        )));
    }
    let x = R::int(2) * hex_step::<R>(p);
    if x.to_f64() >= 1.0 {
        return Err(CriterionError::Divergent { ratio: x.to_f64() });
    }
    let (s0, s1) = power_sums(x, l_start);
    Ok(match kind {
        // 3·Σ (2L+95) 2^{L−10} q^L = 3/1024 · Σ (2L+95) x^L
        WalkTail::Interior => R::int(3) / R::int(1024) * (R::int(2) * s1 + R::int(95) * s0),
        // 3·Σ 2^{L−4} q^L = 3/16 · Σ x^L
        WalkTail::Boundary => R::int(3) / R::int(16) * s0,
    })
}

/// `(Σ_{L≥s} x^L, Σ_{L≥s} L x^L)` for `0 ≤ x < 1`.
fn power_sums<R: Real>(x: R, s: usize) -> (R, R) {
    let one = R::int(1);
    let xs = x.powi(s as i32);
    let s0 = xs / (one - x);
    let s1 = xs * (R::int(s as i64) - R::int(s as i64 - 1) * x) / ((one - x) * (one - x));
    (s0, s1)
}

// ---------------------------------------------------------------------------
// Classes

/// Class of the fixed polymer `γ` (a column of the totals table).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, JsonSchema)]
pub enum FixedClass {
    #[serde(rename = "W3")]
    W3,
    #[serde(rename = "W4")]
    W4,
    #[serde(rename = "W5")]
    W5,
    #[serde(rename = "W6")]
    W6,
    #[serde(rename = "L6")]
    L6,
    #[serde(rename = "W>6")]
    WalksOver6,
    #[serde(rename = "L>6")]
    LoopsOver6,
}

impl FixedClass {
    pub const ALL: [FixedClass; 7] = [
        FixedClass::W3,
        FixedClass::W4,
        FixedClass::W5,
        FixedClass::W6,
        FixedClass::L6,
        FixedClass::WalksOver6,
        FixedClass::LoopsOver6,
    ];

    pub fn label(self) -> &'static str {
        match self {
            FixedClass::W3 => "W3",
            FixedClass::W4 => "W4",
            FixedClass::W5 => "W5",
            FixedClass::W6 => "W6",
            FixedClass::L6 => "L6",
            FixedClass::WalksOver6 => "W>6",
            FixedClass::LoopsOver6 => "L>6",
        }
    }

    /// The S-table column of a short fixed polymer.
    pub fn s_column(self) -> Option<SColumn> {
        match self {
            FixedClass::W3 => Some(SColumn::W3),
            FixedClass::W4 => Some(SColumn::W4),
            FixedClass::W5 => Some(SColumn::W5),
            FixedClass::W6 => Some(SColumn::W6),
            FixedClass::L6 => Some(SColumn::L6),
            _ => None,
        }
    }

    /// Length at which the column is evaluated: the exact length for short
    /// polymers, the shortest member (7 for walks, 10 for loops, there being
    /// no loops of length 8) for long ones.
    pub fn reference_length(self) -> usize {
        match self {
            FixedClass::W3 => 3,
            FixedClass::W4 => 4,
            FixedClass::W5 => 5,
            FixedClass::W6 | FixedClass::L6 => 6,
            FixedClass::WalksOver6 => 7,
            FixedClass::LoopsOver6 => 10,
        }
    }

    pub fn is_loop(self) -> bool {
        matches!(self, FixedClass::L6 | FixedClass::LoopsOver6)
    }
}

/// Class of the summed polymers `γ'` (a row of the totals table).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, JsonSchema)]
#[serde(into = "String", try_from = "String")]
pub enum SummedClass {
    /// Walks of one length `3 ≤ l' ≤ 10`.
    Walks(u32),
    /// Walks with `10 < l' < 21`.
    Walks11To20,
    /// Walks longer than 20.
    WalksOver20,
    /// Hexagons.
    Loops6,
    /// Loops of length 10.
    Loops10,
    /// Loops longer than 10.
    LoopsOver10,
}

impl SummedClass {
    pub fn all() -> Vec<SummedClass> {
        let mut v: Vec<_> = (3..=10).map(SummedClass::Walks).collect();
        v.extend([
            SummedClass::Walks11To20,
            SummedClass::WalksOver20,
            SummedClass::Loops6,
            SummedClass::Loops10,
            SummedClass::LoopsOver10,
        ]);
        v
    }

    pub fn label(self) -> String {
        match self {
            SummedClass::Walks(l) => format!("W{l}"),
            SummedClass::Walks11To20 => "W11-20".into(),
            SummedClass::WalksOver20 => "W>20".into(),
            SummedClass::Loops6 => "L6".into(),
            SummedClass::Loops10 => "L10".into(),
            SummedClass::LoopsOver10 => "L>10".into(),
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "W11-20" => Some(SummedClass::Walks11To20),
            "W>20" => Some(SummedClass::WalksOver20),
            "L6" => Some(SummedClass::Loops6),
            "L10" => Some(SummedClass::Loops10),
            "L>10" => Some(SummedClass::LoopsOver10),
            _ => match s.strip_prefix('W')?.parse() {
                Ok(l) if (3..=10).contains(&l) => Some(SummedClass::Walks(l)),
                _ => None,
            },
        }
    }
}

impl fmt::Display for SummedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl From<SummedClass> for String {
    fn from(c: SummedClass) -> String {
        c.label()
    }
}

impl TryFrom<String> for SummedClass {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        SummedClass::from_label(&s).ok_or_else(|| format!("unknown row class {s:?}"))
    }
}

/// Either side of the totals table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum PolymerClass {
    Fixed(FixedClass),
    Summed(SummedClass),
}

// ---------------------------------------------------------------------------
// Column assembly

/// How the even-length rows `8 ≤ l' ≤ 20` of the long-loop column count
/// incompatible walks per boundary endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum LoopEvenRule {
    /// `l/2 + 12` endpoints for every `8 ≤ l' ≤ 20` (17 at `l = 10`): the
    /// count that reproduces the tabulated long-loop column.
    #[default]
    Tabulated,
    /// `l/2 + 11l'/4 − 12` endpoints, the corridor bound also used for long
    /// walks (gives a larger, still convergent, total).
    Corridor,
}

/// Options for the honeycomb verification.
#[derive(Debug, Clone, Default, Serialize, Deserialize, JsonSchema)]
pub struct HexOptions {
    pub loop_even_rule: LoopEvenRule,
}

/// Number of walks of even length `l'` meeting a long polymer of length `l`,
/// per boundary endpoint class, times `R(l')` where applicable.
fn even_multiplier<R: Real>(l: usize, lp: usize, r: Option<u64>, rule: Option<LoopEvenRule>) -> Result<R, CriterionError> {
    let half = R::int(l as i64) / R::int(2);
    Ok(match lp {
        4 => half + R::int(1),
        6 => half + R::int(2),
        _ => {
            let r = r.ok_or_else(|| CriterionError::MissingTable(format!("R({lp})")))?;
            let per = match rule {
                Some(LoopEvenRule::Tabulated) => half + R::int(12),
                _ => half + R::int(11 * lp as i64) / R::int(4) - R::int(12),
            };
            per * R::int(r as i64)
        }
    })
}

fn lookup(map: &BTreeMap<usize, u64>, name: &str, l: usize) -> Result<u64, CriterionError> {
    map.get(&l).copied().ok_or_else(|| CriterionError::MissingTable(format!("{name}({l})")))
}

/// `Σ_{L=12..=28} N_ℓ(L) w(L) + Σ_{L≥30} 2^{L−3} w(L)` (normalised weights).
fn long_loops<R: Real>(p: &WeightParams, t: &HexTables) -> Result<R, CriterionError> {
    let mut s = R::int(0);
    for big in (12..=28).step_by(2) {
        s = s + R::int(lookup(&t.loops, "N_loop", big)? as i64) * normalized_w_r::<R>(big, p);
    }
    Ok(s + tail_loops_r::<R>(15, p)? / R::int(p.m as i64 + 1))
}

fn walk_tail_norm<R: Real>(p: &WeightParams, kind: WalkTail) -> Result<R, CriterionError> {
    Ok(tail_walks_r::<R>(21, p, kind)? / R::int(p.m as i64 + 1))
}

fn hex_cells<R: Real>(
    class: FixedClass,
    p: &WeightParams,
    t: &HexTables,
    opts: &HexOptions,
) -> Result<Vec<(SummedClass, R)>, CriterionError> {
    let l = class.reference_length();
    let li = R::int(l as i64);
    let a = p.a.eval_r::<R>(l);
    let w = |lp: usize| normalized_w_r::<R>(lp, p);
    let mut cells = Vec::with_capacity(13);

    if let Some(col) = class.s_column() {
        let s = t
            .s
            .columns
            .get(&col)
            .ok_or_else(|| CriterionError::MissingTable(format!("S column {}", col.label())))?;
        if s.telescoped.len() < 18 {
            return Err(CriterionError::MissingTable(format!("S column {} up to l' = 20", col.label())));
        }
        let term = |lp: usize| R::int(s.at(lp) as i64) * w(lp);
        for lp in 3..=10 {
            cells.push((SummedClass::Walks(lp as u32), term(lp) / a));
        }
        let mid = (11..=20).fold(R::int(0), |acc, lp| acc + term(lp));
        cells.push((SummedClass::Walks11To20, mid / a));
        let interior = walk_tail_norm::<R>(p, WalkTail::Interior)?;
        let (over20, loop_mult) = if class.is_loop() {
            (li * interior, li)
        } else {
            let m = R::int(l as i64 - 2);
            (walk_tail_norm::<R>(p, WalkTail::Boundary)? + m * interior, m)
        };
        cells.push((SummedClass::WalksOver20, over20 / a));
        cells.push((SummedClass::Loops6, R::int(s.loops6 as i64) * w(6) / a));
        cells.push((SummedClass::Loops10, R::int(s.loops10 as i64) * w(10) / a));
        cells.push((SummedClass::LoopsOver10, loop_mult * long_loops::<R>(p, t)? / a));
    } else {
        let (kappa, rule) = if class.is_loop() {
            (R::decimal(KAPPA_LOOP), Some(opts.loop_even_rule))
        } else {
            (R::int(1) / R::int(7), None)
        };
        let term = |lp: usize| -> Result<R, CriterionError> {
            let count = if lp % 2 == 0 {
                even_multiplier::<R>(l, lp, t.r.get(&lp).copied(), rule)?
            } else {
                kappa * li * R::int(lookup(&t.q, "Q", lp)? as i64)
            };
            Ok(count * w(lp))
        };
        for lp in 3..=10 {
            cells.push((SummedClass::Walks(lp as u32), term(lp)? / a));
        }
        let mut mid = R::int(0);
        for lp in 11..=20 {
            mid = mid + term(lp)?;
        }
        cells.push((SummedClass::Walks11To20, mid / a));
        cells.push((SummedClass::WalksOver20, li * walk_tail_norm::<R>(p, WalkTail::Interior)? / a));
        let n6 = R::int(lookup(&t.loops, "N_loop", 6)? as i64);
        let n10 = R::int(lookup(&t.loops, "N_loop", 10)? as i64);
        cells.push((SummedClass::Loops6, li * n6 * w(6) / a));
        cells.push((SummedClass::Loops10, li * n10 * w(10) / a));
        cells.push((SummedClass::LoopsOver10, li * long_loops::<R>(p, t)? / a));
    }
    Ok(cells)
}

/// One cell of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Cell {
    pub row: String,
    pub value: f64,
}

/// One column of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ColumnReport {
    pub column: String,
    pub cells: Vec<Cell>,
    pub total: f64,
    /// The column passes iff `total < threshold`.
    pub threshold: f64,
    /// `threshold − total`.
    pub margin: f64,
    /// Whether the total was recomputed in double-double precision.
    pub extended_precision: bool,
}

impl ColumnReport {
    fn build<R: Real>(column: String, cells: Vec<(String, R)>, threshold: f64, extended: bool) -> Self {
        let total = cells.iter().fold(R::int(0), |acc, (_, v)| acc + *v);
        let margin = R::decimal(threshold) - total;
        Self {
            column,
            cells: cells.into_iter().map(|(row, v)| Cell { row, value: v.to_f64() }).collect(),
            total: total.to_f64(),
            threshold,
            margin: margin.to_f64(),
            extended_precision: extended,
        }
    }

    pub fn passes(&self) -> bool {
        self.margin > 0.0
    }

    pub fn cell(&self, row: &str) -> Option<f64> {
        self.cells.iter().find(|c| c.row == row).map(|c| c.value)
    }
}

/// Difference between a `K = 0` cell and the corresponding annulus cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct CellDeviation {
    pub column: String,
    pub row: String,
    pub ball: f64,
    pub annulus: f64,
}

/// Outcome of a convergence verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct KpuReport {
    pub lattice: LatticeKind,
    pub m: u32,
    #[serde(rename = "K")]
    pub k: i64,
    #[serde(rename = "N")]
    pub n: i64,
    pub columns: Vec<ColumnReport>,
    /// `true` iff every column total is below its threshold.
    pub pass: bool,
    /// Smallest margin over all columns.
    pub min_margin: f64,
    /// Smallest `d_min(l')` over `3 ≤ l' ≤ 19` (honeycomb only).
    pub dmin: Option<i64>,
    /// For `K = 0`: cells that differ from the `K ≥ 25` evaluation.
    pub ball_deviations: Vec<CellDeviation>,
    pub notes: Vec<String>,
}

impl KpuReport {
    pub fn column(&self, label: &str) -> Option<&ColumnReport> {
        self.columns.iter().find(|c| c.column == label)
    }

    pub fn totals(&self) -> Vec<f64> {
        self.columns.iter().map(|c| c.total).collect()
    }

    fn assemble(lattice: LatticeKind, m: u32, k: i64, n: i64, columns: Vec<ColumnReport>) -> Self {
        let pass = columns.iter().all(ColumnReport::passes);
        let min_margin = columns.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
        Self { lattice, m, k, n, columns, pass, min_margin, dmin: None, ball_deviations: vec![], notes: vec![] }
    }
}

/// Cells of one honeycomb column, in `f64`.
pub fn column_cells(
    class: FixedClass,
    params: &WeightParams,
    tables: &HexTables,
    opts: &HexOptions,
) -> Result<Vec<(SummedClass, f64)>, CriterionError> {
    check_hex(params)?;
    hex_cells::<f64>(class, params, tables, opts)
}

/// Total of one honeycomb column.
pub fn column_total(
    class: FixedClass,
    params: &WeightParams,
    tables: &HexTables,
    opts: &HexOptions,
) -> Result<f64, CriterionError> {
    Ok(column_cells(class, params, tables, opts)?.iter().map(|(_, v)| v).sum())
}

fn label_cells<R>(cells: Vec<(SummedClass, R)>) -> Vec<(String, R)> {
    cells.into_iter().map(|(c, v)| (c.label(), v)).collect()
}

fn hex_column_report(
    class: FixedClass,
    p: &WeightParams,
    t: &HexTables,
    opts: &HexOptions,
) -> Result<ColumnReport, CriterionError> {
    let col = ColumnReport::build(class.label().into(), label_cells(hex_cells::<f64>(class, p, t, opts)?), 1.0, false);
    if col.margin.abs() >= CERTIFIED_SLACK {
        return Ok(col);
    }
    let cells = label_cells(hex_cells::<TwoFloat>(class, p, t, opts)?);
    Ok(ColumnReport::build(class.label().into(), cells, 1.0, true))
}

/// `d_min(l') = min{2K − 2(l'−4), 2(N−K) − l' + 1}`: the smallest graph
/// distance between two boundary walks of length `l'` at different corners.
/// For `K = 0` only the outer term applies.
pub fn dmin(k: i64, n: i64, lp: i64) -> i64 {
    let outer = 2 * (n - k) - lp + 1;
    if k == 0 {
        outer
    } else {
        outer.min(2 * k - 2 * (lp - 4))
    }
}

fn check_hex_regime(k: i64, n: i64) -> Result<(), CriterionError> {
    let annulus = k >= K_MIN_HEX && n - k >= WIDTH_MIN_HEX;
    let ball = k == 0 && n >= WIDTH_MIN_HEX;
    if annulus || ball {
        Ok(())
    } else {
        Err(CriterionError::OutsideRegime(format!(
            "honeycomb bounds need K >= {K_MIN_HEX} and N - K >= {WIDTH_MIN_HEX}, or K = 0 and N >= {WIDTH_MIN_HEX} (got K = {k}, N = {n})"
        )))
    }
}

/// Verifies the honeycomb criterion for decoration `m` on `Λ_{N,K}`, loading
/// tables from the cache named by `KPU_CACHE_DIR` when set.
pub fn verify_kpu_hex(m: u32, k: i64, n: i64) -> Result<KpuReport, CriterionError> {
    verify_kpu_hex_with(m, k, n, &HexOptions::default(), TableCache::from_env().as_ref())
}

/// [`verify_kpu_hex`] with explicit options and cache.
pub fn verify_kpu_hex_with(
    m: u32,
    k: i64,
    n: i64,
    opts: &HexOptions,
    cache: Option<&TableCache>,
) -> Result<KpuReport, CriterionError> {
    check_hex_regime(k, n)?;
    let annulus = HexTables::load(&Corner::BOTH, cache)?;
    if k == 0 {
        let ball = HexTables::load(&[Corner::Outer], cache)?;
        verify_kpu_hex_tables(m, k, n, opts, &ball, Some(&annulus))
    } else {
        verify_kpu_hex_tables(m, k, n, opts, &annulus, None)
    }
}

/// Verification against explicitly supplied tables. For `K = 0` the tables
/// must be the outer-corner ones; `annulus` (if given) is evaluated too and
/// every differing cell is reported.
pub fn verify_kpu_hex_tables(
    m: u32,
    k: i64,
    n: i64,
    opts: &HexOptions,
    tables: &HexTables,
    annulus: Option<&HexTables>,
) -> Result<KpuReport, CriterionError> {
    check_hex_regime(k, n)?;
    let p = WeightParams::hex(m);
    let columns = FixedClass::ALL
        .par_iter()
        .map(|&c| hex_column_report(c, &p, tables, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let mut report = KpuReport::assemble(LatticeKind::Hexagonal, m, k, n, columns);
    report.dmin = (3..=19).map(|lp| dmin(k, n, lp)).min();
    if let Some(d) = report.dmin {
        if d < 20 {
            report.pass = false;
            report.notes.push(format!("d_min = {d} < 20: the kappa caps 1/7 and 1/10 are not justified"));
        }
    }
    if opts.loop_even_rule == LoopEvenRule::Tabulated {
        report.notes.push("long-loop column: even rows 8..20 use l/2 + 12 endpoints per R(l')".into());
    }
    if k == 0 {
        report.notes.push("K = 0: tables restricted to outer-corner windows".into());
        if let Some(ann) = annulus {
            for &class in &FixedClass::ALL {
                let ball_cells = hex_cells::<f64>(class, &p, tables, opts)?;
                let ann_cells = hex_cells::<f64>(class, &p, ann, opts)?;
                for ((row, b), (_, a)) in ball_cells.into_iter().zip(ann_cells) {
                    if (a - b).abs() > 1e-12 {
                        report.ball_deviations.push(CellDeviation {
                            column: class.label().into(),
                            row: row.label(),
                            ball: b,
                            annulus: a,
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

/// `C_2` for the square lattice: at most `1 + ⌊|γ|/(2(N−1))⌋ ≤ |γ|/2`
/// length-two walks meet `γ`.
pub const SQUARE_C2: f64 = 0.5;

/// `C_n = 4(n+1)3^{n−1}` for `n ≥ 8`.
pub fn square_cn_bound(n: usize) -> f64 {
    4.0 * (n as f64 + 1.0) * 3f64.powi(n as i32 - 1)
}

fn square_cells<R: Real>(m: u32, cn: &BTreeMap<usize, u64>) -> Result<Vec<(String, R)>, CriterionError> {
    let p = WeightParams::square(m);
    let mut cells = vec![("C2".to_string(), R::decimal(SQUARE_C2) * normalized_w_r::<R>(2, &p))];
    for n in 3..=7 {
        let c = lookup(cn, "C", n)?;
        cells.push((format!("C{n}"), R::int(c as i64) * normalized_w_r::<R>(n, &p)));
    }
    // C_n w_m(n) = 4(n+1)/(m+1) · z^n with z = e^{(a+ε)(m+1)}/3^m.
    let m1 = R::int(m as i64 + 1);
    let z = ((R::decimal(A_SQUARE) + R::decimal(EPSILON_SQUARE)) * m1).exp() / R::int(3).powi(m as i32);
    if z.to_f64() >= 1.0 {
        return Err(CriterionError::Divergent { ratio: z.to_f64() });
    }
    let (s0, s1) = power_sums(z, 8);
    cells.push(("n>=8".to_string(), R::int(4) / m1 * (s1 + s0)));
    Ok(cells)
}

/// Verifies the decorated square-lattice criterion `Σ_n C_n w_m(n) < a`.
pub fn verify_kpu_square(m: u32, k: i64, n: i64) -> Result<KpuReport, CriterionError> {
    verify_kpu_square_with(m, k, n, TableCache::from_env().as_ref())
}

pub fn verify_kpu_square_with(m: u32, k: i64, n: i64, cache: Option<&TableCache>) -> Result<KpuReport, CriterionError> {
    if m == 0 {
        return Err(CriterionError::UndecoratedSquare);
    }
    if k < 0 || n <= (k + 4).max(8) {
        return Err(CriterionError::OutsideRegime(format!(
            "square-lattice bounds need N > max(K + 4, 8) (got K = {k}, N = {n})"
        )));
    }
    let cn = compute_table(TableId::SquareCn, 7, cache)?.as_map();
    verify_kpu_square_tables(m, k, n, &cn)
}

/// Square-lattice verification with an explicit `C_3..C_7` table.
pub fn verify_kpu_square_tables(m: u32, k: i64, n: i64, cn: &BTreeMap<usize, u64>) -> Result<KpuReport, CriterionError> {
    if m == 0 {
        return Err(CriterionError::UndecoratedSquare);
    }
    let mut col = ColumnReport::build("sum C_n w_m(n)".into(), square_cells::<f64>(m, cn)?, A_SQUARE, false);
    if col.margin.abs() < CERTIFIED_SLACK {
        col = ColumnReport::build(col.column, square_cells::<TwoFloat>(m, cn)?, A_SQUARE, true);
    }
    let mut report = KpuReport::assemble(LatticeKind::Square, m, k, n, vec![col]);
    report.notes.push("C_2 = 1/2; C_n = 4(n+1)3^(n-1) for n >= 8".into());
    Ok(report)
}

// ---------------------------------------------------------------------------
// Correlation regime

/// One threshold of the two-hole regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ThresholdCheck {
    pub condition: String,
    pub reason: String,
    pub ok: bool,
}

/// Whether the two-hole expansion used for correlation decay converges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RegimeCheck {
    pub ok: bool,
    pub checks: Vec<ThresholdCheck>,
}

/// Checks the hypotheses of the correlation-decay bound for supports in
/// balls of radius `M/2` at lattice distance `d`.
pub fn corr_regime_check(lattice: LatticeKind, m_diam: i64, d: i64) -> RegimeCheck {
    let check = |condition: &str, reason: &str, ok: bool| ThresholdCheck {
        condition: condition.into(),
        reason: reason.into(),
        ok,
    };
    let checks = match lattice {
        LatticeKind::Hexagonal => vec![
            check("M even", "supports are balls of radius M/2", m_diam % 2 == 0),
            check("M/2 >= 25", "each hole is an annulus with K >= 25", m_diam >= 50),
            check("d > 6", "connecting walks leave the short-walk columns unchanged", d > 6),
            check("d >= 7", "connecting walks are longer than six", d >= 7),
            check("d >= 22", "the (2l'+95)2^(l'-10) bound still holds", d >= 22),
            check("d >= 50", "odd-length kappa bound and corridor argument", d >= 50),
        ],
        LatticeKind::Square => vec![check("d >= 8", "the C_n bounds are unchanged", d >= 8)],
    };
    RegimeCheck { ok: checks.iter().all(|c| c.ok), checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_function_values() {
        let p = WeightParams::hex(0);
        assert_eq!(p.a_of(3), 0.52);
        assert_eq!(p.a_of(6), 0.70);
        assert!((p.a_of(7) - 1.05).abs() < 1e-15);
        assert!((WeightParams::hex(2).a_m(4) - 1.68).abs() < 1e-12);
    }

    #[test]
    fn decimal_conversion_is_exact() {
        let x = <TwoFloat as Real>::decimal(0.0086);
        let back = x * TwoFloat::from(10000.0);
        assert!((back.hi() - 86.0).abs() < 1e-28 && back.lo().abs() < 1e-14);
    }

    #[test]
    fn extended_and_double_agree() {
        let p = WeightParams::hex(0);
        for l in 3..30 {
            let a = little_w_r::<f64>(l, &p);
            let b = little_w_r::<TwoFloat>(l, &p).to_f64();
            assert!((a - b).abs() <= 1e-14 * a);
        }
    }

    #[test]
    fn dmin_regime() {
        assert_eq!(dmin(25, 78, 19), 20);
        assert_eq!(dmin(0, 53, 19), 88);
    }

    #[test]
    fn summed_labels_round_trip() {
        for c in SummedClass::all() {
            assert_eq!(SummedClass::from_label(&c.label()), Some(c));
        }
        assert_eq!(SummedClass::from_label("W11"), None);
    }

    #[test]
    fn square_refuses_undecorated() {
        assert!(matches!(verify_kpu_square_tables(0, 2, 10, &BTreeMap::new()), Err(CriterionError::UndecoratedSquare)));
    }
}
