//! Independent numerical checks of the polymer representation.
//!
//! * Monte-Carlo estimates of the single-vertex sphere integrals behind the
//!   expansion: `∫dΩ_x (Ω_y·Ω_x)(Ω_x·Ω_z) = Ω_y·Ω_z/3` and the four-fold
//!   pairing formula with coefficient `1/15`.
//! * Brute-force partition functions `∫∏_{xy}(1 − Ω_x·Ω_y)/2` of tiny volumes
//!   compared against the polymer sum.
//! * A literal floating-point port of the reference enumerators
//!   ([`reference`]) diffed against the exact engine.
//!
//! Sampling is deterministic: batches of [`BATCH`] samples draw from
//! ChaCha8 streams indexed by the batch number, and batch sums are reduced
//! in batch order.

pub mod reference;

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{hexagon_vertices, square_neighbors, hex_neighbors, Edge, LatticeKind, Vertex};
use crate::polymer_hex::Loop;
use crate::polymer_square::{Trail, TrailKind};
use crate::tables::TableId;

/// Samples per deterministic batch.
pub const BATCH: u64 = 1 << 16;
/// Fewest samples accepted by the identity checks.
pub const MIN_SAMPLES: u64 = 10_000;
/// Width of the acceptance band, in standard errors.
pub const SIGMA_BAND: f64 = 4.0;
/// Largest honeycomb volume (in vertices) for brute-force integration.
pub const MAX_HEX_VERTICES: usize = 8;
/// Largest square-lattice volume (in vertices) for brute-force integration.
pub const MAX_SQUARE_VERTICES: usize = 9;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("at least {min} samples required (got {got})")]
    TooFewSamples { min: u64, got: u64 },
    #[error("volume has {got} vertices; at most {max} allowed for {lattice:?}")]
    VolumeTooLarge { lattice: LatticeKind, got: usize, max: usize },
    #[error("invalid sphere point: {0}")]
    InvalidPoint(String),
    #[error("invalid volume: {0}")]
    InvalidVolume(String),
    #[error("no reference port for table {0}")]
    Unsupported(String),
}

/// A point of the unit sphere `S²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SpherePoint([f64; 3]);

impl SpherePoint {
    /// Normalises a non-zero finite vector.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, OracleError> {
        let n = (x * x + y * y + z * z).sqrt();
        if !n.is_finite() || n == 0.0 {
            return Err(OracleError::InvalidPoint(format!("({x}, {y}, {z})")));
        }
        Ok(Self([x / n, y / n, z / n]))
    }

    /// Point with polar angle `theta` and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()])
    }

    pub fn north() -> Self {
        Self([0.0, 0.0, 1.0])
    }

    pub fn x_axis() -> Self {
        Self([1.0, 0.0, 0.0])
    }

    /// Uniform sample: `z` uniform on `[−1, 1]`, azimuth uniform.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let z: f64 = 2.0 * rng.gen::<f64>() - 1.0;
        let phi = std::f64::consts::TAU * rng.gen::<f64>();
        let r = (1.0 - z * z).max(0.0).sqrt();
        Self([r * phi.cos(), r * phi.sin(), z])
    }

    pub fn coords(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, o: &SpherePoint) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

/// Seed and sample count of a Monte-Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct McConfig {
    pub seed: u64,
    pub samples: u64,
}

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    /// `|mean − exact| ≤ 4·stderr` (with a tiny absolute floor for
    /// integrands that are exactly constant).
    pub fn agrees_with(&self, exact: f64) -> bool {
        (self.mean - exact).abs() <= SIGMA_BAND * self.stderr + 1e-12
    }
}

/// Mean of `f` over `cfg.samples` draws of `points` independent uniform
/// sphere points.
pub fn mc_mean<F>(cfg: &McConfig, points: usize, f: F) -> Estimate
where
    F: Fn(&[SpherePoint]) -> f64 + Sync,
{
    let batches = cfg.samples.div_ceil(BATCH);
    let sums: Vec<(f64, f64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b);
            let count = BATCH.min(cfg.samples - b * BATCH);
            let mut buf = vec![SpherePoint::north(); points];
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                for p in buf.iter_mut() {
                    *p = SpherePoint::sample(&mut rng);
                }
                let v = f(&buf);
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let n = cfg.samples as f64;
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    Estimate { mean, stderr: (var / n).sqrt() }
}

fn check_samples(cfg: &McConfig) -> Result<(), OracleError> {
    if cfg.samples < MIN_SAMPLES {
        return Err(OracleError::TooFewSamples { min: MIN_SAMPLES, got: cfg.samples });
    }
    Ok(())
}

/// Exact value `Ω_y·Ω_z/3` of the edge integral.
pub fn edge_identity_exact(omega_y: &SpherePoint, omega_z: &SpherePoint) -> f64 {
    omega_y.dot(omega_z) / 3.0
}

/// Estimates `∫dΩ_x (Ω_y·Ω_x)(Ω_x·Ω_z)`.
pub fn mc_edge_identity(omega_y: &SpherePoint, omega_z: &SpherePoint, cfg: &McConfig) -> Result<Estimate, OracleError> {
    check_samples(cfg)?;
    Ok(mc_mean(cfg, 1, |p| omega_y.dot(&p[0]) * p[0].dot(omega_z)))
}

/// Exact value `(1/15)Σ_{pairings}` of the degree-four integral.
pub fn degree4_identity_exact(o: &[SpherePoint; 4]) -> f64 {
    (o[0].dot(&o[1]) * o[2].dot(&o[3]) + o[0].dot(&o[2]) * o[1].dot(&o[3]) + o[0].dot(&o[3]) * o[1].dot(&o[2]))
        / 15.0
}

/// Estimates `∫dΩ_v ∏_{i=1}^4 (Ω_{x_i}·Ω_v)`.
pub fn mc_degree4_identity(omegas: &[SpherePoint; 4], cfg: &McConfig) -> Result<Estimate, OracleError> {
    check_samples(cfg)?;
    Ok(mc_mean(cfg, 1, |p| omegas.iter().map(|o| o.dot(&p[0])).product()))
}

// ---------------------------------------------------------------------------
// Tiny volumes

/// A small finite volume given by its edge set; every vertex is integrated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TinyVolume {
    pub lattice: LatticeKind,
    pub edges: BTreeSet<Edge>,
}

impl TinyVolume {
    pub fn new(lattice: LatticeKind, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self, OracleError> {
        let edges = edges
            .into_iter()
            .map(|(u, v)| Edge::new(u, v, lattice).map_err(|e| OracleError::InvalidVolume(e.to_string())))
            .collect::<Result<BTreeSet<_>, _>>()?;
        if edges.is_empty() {
            return Err(OracleError::InvalidVolume("no edges".into()));
        }
        Ok(Self { lattice, edges })
    }

    /// The six edges of the hexagon with lower-left cell corner `cell`.
    pub fn hexagon(cell: Vertex) -> Result<Self, OracleError> {
        let h = hexagon_vertices(cell);
        Self::new(LatticeKind::Hexagonal, (0..6).map(|i| (h[i], h[(i + 1) % 6])))
    }

    /// The four edges of the unit square with lower-left corner `corner`.
    pub fn unit_square(corner: Vertex) -> Result<Self, OracleError> {
        let c = |dx, dy| corner.shift(dx, dy);
        Self::new(
            LatticeKind::Square,
            [(c(0, 0), c(1, 0)), (c(1, 0), c(1, 1)), (c(1, 1), c(0, 1)), (c(0, 1), c(0, 0))],
        )
    }

    /// All nearest-neighbour edges of the `w × h` vertex rectangle.
    pub fn square_grid(w: i32, h: i32) -> Result<Self, OracleError> {
        let mut e = vec![];
        for x in 0..w {
            for y in 0..h {
                let v = Vertex::new(x, y);
                if x + 1 < w {
                    e.push((v, v.shift(1, 0)));
                }
                if y + 1 < h {
                    e.push((v, v.shift(0, 1)));
                }
            }
        }
        Self::new(LatticeKind::Square, e)
    }

    /// Union of two volumes of the same lattice.
    pub fn union(&self, other: &TinyVolume) -> Result<Self, OracleError> {
        if self.lattice != other.lattice {
            return Err(OracleError::InvalidVolume("mixed lattices".into()));
        }
        Ok(Self { lattice: self.lattice, edges: self.edges.union(&other.edges).copied().collect() })
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        let set: BTreeSet<Vertex> = self.edges.iter().flat_map(|e| {
            let (a, b) = e.endpoints();
            [a, b]
        }).collect();
        set.into_iter().collect()
    }

    fn neighbours(&self, v: Vertex) -> Vec<Vertex> {
        let all = match self.lattice {
            LatticeKind::Hexagonal => hex_neighbors(v).to_vec(),
            LatticeKind::Square => square_neighbors(v).to_vec(),
        };
        all.into_iter().filter(|&u| self.edges.contains(&Edge::between(u, v))).collect()
    }
}

/// A polymer of a tiny volume with its weight `(−1/3)^{|γ|−1}(3/5)^{|V⁴|}·∂γ`,
/// `∂γ = −1` for closed polymers.
#[derive(Debug, Clone)]
struct TinyPolymer {
    edges: BTreeSet<Edge>,
    vertices: BTreeSet<Vertex>,
    weight: f64,
}

fn loop_weight(len: usize, degree_four: usize) -> f64 {
    -(-1.0f64 / 3.0).powi(len as i32 - 1) * 0.6f64.powi(degree_four as i32)
}

/// Simple cycles of a honeycomb volume, as canonical [`Loop`]s.
fn hex_loops(vol: &TinyVolume) -> BTreeSet<Loop> {
    fn dfs(vol: &TinyVolume, path: &mut Vec<Vertex>, out: &mut BTreeSet<Loop>) {
        let last = *path.last().expect("non-empty path");
        for u in vol.neighbours(last) {
            if u == path[0] && path.len() >= 6 {
                if let Ok(l) = Loop::new(path.clone()) {
                    out.insert(l.canonical());
                }
            } else if u > path[0] && !path.contains(&u) {
                path.push(u);
                dfs(vol, path, out);
                path.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    for v in vol.vertices() {
        dfs(vol, &mut vec![v], &mut out);
    }
    out
}

/// Closed trails of a square-lattice volume, as canonical [`Trail`]s.
fn square_loops(vol: &TinyVolume) -> BTreeSet<Trail> {
    fn dfs(vol: &TinyVolume, path: &mut Vec<Vertex>, used: &mut BTreeSet<Edge>, out: &mut BTreeSet<Trail>) {
        let last = *path.last().expect("non-empty path");
        for u in vol.neighbours(last) {
            let e = Edge::between(last, u);
            if used.contains(&e) {
                continue;
            }
            if u == path[0] {
                if path.len() >= 4 {
                    if let Ok(t) = Trail::new(TrailKind::Loop, path.clone()) {
                        out.insert(t.canonical());
                    }
                }
                continue;
            }
            used.insert(e);
            path.push(u);
            dfs(vol, path, used, out);
            path.pop();
            used.remove(&e);
        }
    }
    let mut out = BTreeSet::new();
    for v in vol.vertices() {
        dfs(vol, &mut vec![v], &mut BTreeSet::new(), &mut out);
    }
    out
}

fn tiny_polymers(vol: &TinyVolume) -> Vec<TinyPolymer> {
    match vol.lattice {
        LatticeKind::Hexagonal => hex_loops(vol)
            .into_iter()
            .map(|l| TinyPolymer {
                edges: l.edges().into_iter().collect(),
                vertices: l.vertices().iter().copied().collect(),
                weight: loop_weight(l.len(), 0),
            })
            .collect(),
        LatticeKind::Square => square_loops(vol)
            .into_iter()
            .map(|t| TinyPolymer {
                edges: t.edges().into_iter().collect(),
                vertices: t.support(),
                weight: loop_weight(t.len(), t.degree_four_vertices().len()),
            })
            .collect(),
    }
}

/// Pair interaction: hard core on the honeycomb lattice (vertex-disjoint),
/// soft core on the square lattice (edge-disjoint, `3/5` per shared vertex).
fn interaction(lattice: LatticeKind, a: &TinyPolymer, b: &TinyPolymer) -> f64 {
    let shared = a.vertices.intersection(&b.vertices).count();
    match lattice {
        LatticeKind::Hexagonal => f64::from(u8::from(shared == 0)),
        LatticeKind::Square => {
            if a.edges.is_disjoint(&b.edges) {
                0.6f64.powi(shared as i32)
            } else {
                0.0
            }
        }
    }
}

/// `2^{−|E|} Σ_{Γ} ∏_{γ∈Γ} W(γ) ∏_{γ≠γ'∈Γ} δ(γ,γ')` over all finite sets of
/// polymers in the volume.
pub fn polymer_value(vol: &TinyVolume) -> f64 {
    let polys = tiny_polymers(vol);
    let n = polys.len();
    let delta: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| interaction(vol.lattice, &polys[i], &polys[j])).collect()).collect();

    fn sum_sets(i: usize, chosen: &mut Vec<usize>, acc: f64, polys: &[TinyPolymer], delta: &[Vec<f64>]) -> f64 {
        if i == polys.len() {
            return acc;
        }
        let skip = sum_sets(i + 1, chosen, acc, polys, delta);
        let factor: f64 = chosen.iter().map(|&j| delta[i][j]).product();
        if factor == 0.0 {
            return skip;
        }
        chosen.push(i);
        let take = sum_sets(i + 1, chosen, acc * polys[i].weight * factor, polys, delta);
        chosen.pop();
        skip + take
    }
    let z = sum_sets(0, &mut vec![], 1.0, &polys, &delta);
    z * 0.5f64.powi(vol.edges.len() as i32)
}

/// A brute-force partition function against the polymer sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct PartitionCheck {
    pub mc: Estimate,
    pub polymer_value: f64,
    pub agrees: bool,
}

/// Monte-Carlo estimate of `∫∏_{xy∈E}(1 − Ω_x·Ω_y)/2 dΩ` over all vertices of
/// a tiny volume, compared with [`polymer_value`].
pub fn brute_force_partition(vol: &TinyVolume, cfg: &McConfig) -> Result<PartitionCheck, OracleError> {
    check_samples(cfg)?;
    let verts = vol.vertices();
    let max = match vol.lattice {
        LatticeKind::Hexagonal => MAX_HEX_VERTICES,
        LatticeKind::Square => MAX_SQUARE_VERTICES,
    };
    if verts.len() > max {
        return Err(OracleError::VolumeTooLarge { lattice: vol.lattice, got: verts.len(), max });
    }
    let index: BTreeMap<Vertex, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let pairs: Vec<(usize, usize)> = vol
        .edges
        .iter()
        .map(|e| {
            let (a, b) = e.endpoints();
            (index[&a], index[&b])
        })
        .collect();
    let mc = mc_mean(cfg, verts.len(), |p| pairs.iter().map(|&(a, b)| 0.5 * (1.0 - p[a].dot(&p[b]))).product());
    let pv = polymer_value(vol);
    Ok(PartitionCheck { mc, polymer_value: pv, agrees: mc.agrees_with(pv) })
}

// ---------------------------------------------------------------------------
// Reference-port comparison

/// Engine versus reference-port values for one table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct PortDiff {
    pub table: TableId,
    pub max: usize,
    pub engine: BTreeMap<usize, u64>,
    pub port: BTreeMap<usize, u64>,
    /// `(length, engine, port)` for every disagreement.
    pub diffs: Vec<(usize, u64, u64)>,
    pub notes: Vec<String>,
}

impl PortDiff {
    pub fn is_empty(&self) -> bool {
        self.diffs.is_empty()
    }
}

/// Runs both the exact engine and the floating-point reference port on a
/// reduced range and lists every disagreement.
pub fn reference_port_compare(table: TableId, max: usize) -> Result<PortDiff, OracleError> {
    use crate::polymer_square::max_trails_through_vertex;
    use crate::tables::{loops_through_edge_table, q_table, r_table, walks_to_boundary_table};

    let wrap = |r: Result<crate::tables::TableResult, crate::tables::TableError>| {
        r.map(|t| t.as_map()).map_err(|e| OracleError::Unsupported(e.to_string()))
    };
    let mut notes = vec![];
    let (engine, port): (BTreeMap<usize, u64>, BTreeMap<usize, u64>) = match table {
        TableId::LoopsThroughEdge => {
            let port = reference::hex::loops_through_edge(max);
            (wrap(loops_through_edge_table(max))?, (6..=max).step_by(2).zip(port).collect())
        }
        TableId::WalksToBoundaryN => {
            let port = reference::hex::p(max);
            (wrap(walks_to_boundary_table(max))?, (1..=max).zip(port).collect())
        }
        TableId::RightEndpointR => {
            let port = reference::hex::r(max);
            (wrap(r_table(max))?, (4..=max).step_by(2).zip(port).collect())
        }
        TableId::OddCornerQ => {
            let port = reference::hex::q(max);
            (wrap(q_table(max))?, (3..=max).step_by(2).zip(port).collect())
        }
        TableId::SquareCn => {
            notes.push("the reference port counts walks only; compared against the walk part W_n".into());
            let engine = (3..=max).map(|n| (n, max_trails_through_vertex(n).0)).collect();
            let port = (3..=max).map(|n| (n, reference::square::maxes(n, 2 * n))).collect();
            (engine, port)
        }
        TableId::SupTableS => return Err(OracleError::Unsupported(table.short().into())),
    };
    let keys: BTreeSet<usize> = engine.keys().chain(port.keys()).copied().collect();
    let diffs = keys
        .into_iter()
        .filter_map(|k| {
            let (e, p) = (engine.get(&k).copied().unwrap_or(0), port.get(&k).copied().unwrap_or(0));
            (e != p).then_some((k, e, p))
        })
        .collect();
    Ok(PortDiff { table, max, engine, port, diffs, notes })
}

// ---------------------------------------------------------------------------
// The full suite

/// Number of random configurations per sphere identity in [`run_suite`].
pub const RANDOM_CONFIGURATIONS: usize = 20;

/// Outcome of one oracle check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct OracleCheck {
    pub name: String,
    pub pass: bool,
    /// Estimate or computed value.
    pub value: f64,
    /// Exact or reference value.
    pub expected: f64,
    /// Standard error of `value` (zero for exact comparisons).
    pub stderr: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl OracleCheck {
    fn from_estimate(name: String, est: Estimate, exact: f64) -> Self {
        Self { name, pass: est.agrees_with(exact), value: est.mean, expected: exact, stderr: est.stderr, detail: String::new() }
    }
}

/// Results of [`run_suite`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct OracleReport {
    pub seed: u64,
    pub samples: u64,
    pub checks: Vec<OracleCheck>,
    pub pass: bool,
}

impl OracleReport {
    pub fn failures(&self) -> impl Iterator<Item = &OracleCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Runs every oracle: the sphere identities on the analytic cases
/// (`1/3`, `0`, `1/5`) and on [`RANDOM_CONFIGURATIONS`] random
/// configurations each, the brute-force partition functions of a single
/// hexagon and a unit square, and the reference-port diffs (loops `l ≤ 14`,
/// `N` `l ≤ 8`, `R` `l ≤ 12`, `Q` `l ≤ 11`, square walks `n ≤ 5`).
///
/// Each Monte-Carlo check uses `samples` draws and its own seed derived
/// from `seed`, so the report is a deterministic function of the inputs.
pub fn run_suite(seed: u64, samples: u64) -> Result<OracleReport, OracleError> {
    let mut checks = Vec::new();
    let mut run = 0u64;
    let mut next_cfg = || {
        run += 1;
        McConfig { seed: seed.wrapping_add(run), samples }
    };
    let (n, x) = (SpherePoint::north(), SpherePoint::x_axis());

    let e = mc_edge_identity(&n, &n, &next_cfg())?;
    checks.push(OracleCheck::from_estimate("edge identity, parallel".into(), e, 1.0 / 3.0));
    let e = mc_edge_identity(&n, &x, &next_cfg())?;
    checks.push(OracleCheck::from_estimate("edge identity, orthogonal".into(), e, 0.0));
    let e = mc_degree4_identity(&[n; 4], &next_cfg())?;
    checks.push(OracleCheck::from_estimate("degree-4 identity, all parallel".into(), e, 0.2));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..RANDOM_CONFIGURATIONS {
        let (y, z) = (SpherePoint::sample(&mut rng), SpherePoint::sample(&mut rng));
        let e = mc_edge_identity(&y, &z, &next_cfg())?;
        checks.push(OracleCheck::from_estimate(format!("edge identity, random #{i}"), e, edge_identity_exact(&y, &z)));
    }
    for i in 0..RANDOM_CONFIGURATIONS {
        let o: [SpherePoint; 4] = std::array::from_fn(|_| SpherePoint::sample(&mut rng));
        let e = mc_degree4_identity(&o, &next_cfg())?;
        checks.push(OracleCheck::from_estimate(format!("degree-4 identity, random #{i}"), e, degree4_identity_exact(&o)));
    }

    for (name, vol) in [
        ("partition function, single hexagon", TinyVolume::hexagon(Vertex::new(0, 0))?),
        ("partition function, unit square", TinyVolume::unit_square(Vertex::new(0, 0))?),
    ] {
        let p = brute_force_partition(&vol, &next_cfg())?;
        let mut c = OracleCheck::from_estimate(name.into(), p.mc, p.polymer_value);
        c.detail = format!("volume with {} edges", vol.edges.len());
        checks.push(c);
    }

    for (table, max) in [
        (TableId::LoopsThroughEdge, 14),
        (TableId::WalksToBoundaryN, 8),
        (TableId::RightEndpointR, 12),
        (TableId::OddCornerQ, 11),
        (TableId::SquareCn, 5),
    ] {
        let d = reference_port_compare(table, max)?;
        checks.push(OracleCheck {
            name: format!("reference port, table {} up to {max}", table.short()),
            pass: d.is_empty(),
            value: d.diffs.len() as f64,
            expected: 0.0,
            stderr: 0.0,
            detail: d.diffs.iter().map(|(l, e, p)| format!("l={l}: engine {e}, port {p}")).collect::<Vec<_>>().join("; "),
        });
    }

    let pass = checks.iter().all(|c| c.pass);
    Ok(OracleReport { seed, samples, checks, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_points_are_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            assert!((SpherePoint::sample(&mut rng).norm() - 1.0).abs() < 1e-12);
        }
        assert!(SpherePoint::new(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn too_few_samples() {
        let cfg = McConfig { seed: 0, samples: 10 };
        assert!(mc_edge_identity(&SpherePoint::north(), &SpherePoint::north(), &cfg).is_err());
    }

    #[test]
    fn hexagon_polymer_value() {
        let v = polymer_value(&TinyVolume::hexagon(Vertex::new(0, 0)).unwrap());
        assert!((v - 244.0 / (64.0 * 243.0)).abs() < 1e-15);
    }

    #[test]
    fn figure_eight_trails() {
        // Two unit squares sharing a corner: three routings of the union.
        let a = TinyVolume::unit_square(Vertex::new(0, 0)).unwrap();
        let b = TinyVolume::unit_square(Vertex::new(1, 1)).unwrap();
        let v = a.union(&b).unwrap();
        assert_eq!(square_loops(&v).len(), 4);
        // Direct sum over even subgraphs: 1 + 2·(1/3)^3 + (1/3)^6.
        let exact = (1.0 + 2.0 / 27.0 + 1.0 / 729.0) / 256.0;
        assert!((polymer_value(&v) - exact).abs() < 1e-15);
    }
}
