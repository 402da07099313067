//! The combinatorial tables behind the convergence proof.
//!
//! | id | content |
//! |----|---------|
//! | `loops` | loops of length `l` through a fixed bond |
//! | `n` | walks of length `l` from a fixed vertex to the boundary |
//! | `s` | telescoped suprema of walks meeting a fixed short polymer |
//! | `r` | even walks returning to the boundary on one side of a bond |
//! | `q` | odd walks with endpoints on opposite sides of a corner |
//! | `cn` | square-lattice trails through a fixed vertex |
//!
//! All honeycomb tables are computed on finite boundary windows (see
//! [`crate::lattice::CornerWindow`]) and maximised over the two corner
//! types.  Results can be cached on disk as JSON, keyed by table, range and
//! generator version; cache writes go through a temporary file that is
//! renamed into place.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::lattice::{hex_corner_window, hex_start_arm, hexagon_vertices, Corner, DirectedEdge, Vertex};
use crate::polymer_hex::{
    count_walks_by_length, count_walks_grouped, firsts, generate_walks, loops_through_bond_by_length,
    loops_touching, tips, walks_from_bond_by_length, EnumerationConstraints,
};
use crate::polymer_square::max_trails_through_vertex;

/// Version tag stored with every computed table; bump when the enumeration
/// semantics change so stale cache entries are ignored.
pub const GENERATOR_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "+g1");

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "KPU_CACHE_DIR";

/// Identifies one table.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema,
)]
pub enum TableId {
    LoopsThroughEdge,
    WalksToBoundaryN,
    SupTableS,
    RightEndpointR,
    OddCornerQ,
    SquareCn,
}

impl TableId {
    pub const ALL: [TableId; 6] = [
        TableId::LoopsThroughEdge,
        TableId::WalksToBoundaryN,
        TableId::SupTableS,
        TableId::RightEndpointR,
        TableId::OddCornerQ,
        TableId::SquareCn,
    ];

    /// Short name used on the command line and in cache file names.
    pub fn short(self) -> &'static str {
        match self {
            TableId::LoopsThroughEdge => "loops",
            TableId::WalksToBoundaryN => "n",
            TableId::SupTableS => "s",
            TableId::RightEndpointR => "r",
            TableId::OddCornerQ => "q",
            TableId::SquareCn => "cn",
        }
    }

    pub fn from_short(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.short() == s)
    }

    /// Default (largest tabulated) range.
    pub fn default_max(self) -> usize {
        match self {
            TableId::LoopsThroughEdge => 28,
            TableId::WalksToBoundaryN => 10,
            TableId::SupTableS => 20,
            TableId::RightEndpointR => 20,
            TableId::OddCornerQ => 19,
            TableId::SquareCn => 7,
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

/// Columns of the S table: the fixed polymer is a walk of length 3–6 or a
/// hexagon.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema,
)]
pub enum SColumn {
    W3,
    W4,
    W5,
    W6,
    L6,
}

impl SColumn {
    pub const ALL: [SColumn; 5] = [SColumn::W3, SColumn::W4, SColumn::W5, SColumn::W6, SColumn::L6];

    /// Length of the fixed polymer.
    pub fn length(self) -> usize {
        match self {
            SColumn::W3 => 3,
            SColumn::W4 => 4,
            SColumn::W5 => 5,
            SColumn::W6 | SColumn::L6 => 6,
        }
    }

    pub fn is_loop(self) -> bool {
        self == SColumn::L6
    }

    pub fn label(self) -> &'static str {
        match self {
            SColumn::W3 => "w3",
            SColumn::W4 => "w4",
            SColumn::W5 => "w5",
            SColumn::W6 => "w6",
            SColumn::L6 => "l6",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.label() == s)
    }
}

/// Row index of a table: a length, or a cell of the S table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema)]
#[serde(untagged)]
pub enum RowIndex {
    Length(u32),
    Cell { column: String, row: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct TableRow {
    pub index: RowIndex,
    pub value: u64,
}

/// Parameters a table was computed with.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct TableParams {
    /// Largest length in the table.
    pub max: usize,
    /// Window arm length used for the enumeration.
    pub window: usize,
    /// Corner types maximised over.
    pub corners: Vec<Corner>,
}

/// A computed table (also the on-disk cache format).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct TableResult {
    pub table_id: TableId,
    pub params: TableParams,
    pub rows: Vec<TableRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub generator_version: String,
}

impl TableResult {
    fn new(table_id: TableId, params: TableParams, rows: Vec<TableRow>) -> Self {
        Self { table_id, params, rows, notes: Vec::new(), generator_version: GENERATOR_VERSION.into() }
    }

    fn from_lengths(table_id: TableId, params: TableParams, rows: impl IntoIterator<Item = (usize, u64)>) -> Self {
        let rows = rows
            .into_iter()
            .map(|(l, value)| TableRow { index: RowIndex::Length(l as u32), value })
            .collect();
        Self::new(table_id, params, rows)
    }

    /// Value at length `l`.
    pub fn get(&self, l: usize) -> Option<u64> {
        self.rows.iter().find_map(|r| match r.index {
            RowIndex::Length(i) if i as usize == l => Some(r.value),
            _ => None,
        })
    }

    /// Value of an S-table cell.
    pub fn cell(&self, column: SColumn, row: &str) -> Option<u64> {
        self.rows.iter().find_map(|r| match &r.index {
            RowIndex::Cell { column: c, row: rr } if c == column.label() && rr == row => Some(r.value),
            _ => None,
        })
    }

    /// Length-indexed rows as a map.
    pub fn as_map(&self) -> BTreeMap<usize, u64> {
        self.rows
            .iter()
            .filter_map(|r| match r.index {
                RowIndex::Length(i) => Some((i as usize, r.value)),
                _ => None,
            })
            .collect()
    }

    /// Comma-separated rendering with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        match self.rows.first().map(|r| &r.index) {
            Some(RowIndex::Cell { .. }) => s.push_str("column,row,value\n"),
            _ => s.push_str("index,value\n"),
        }
        for r in &self.rows {
            match &r.index {
                RowIndex::Length(l) => s.push_str(&format!("{l},{}\n", r.value)),
                RowIndex::Cell { column, row } => s.push_str(&format!("{column},{row},{}\n", r.value)),
            }
        }
        s
    }
}

/// Errors from table computation and caching.
#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("invalid range for table {table}: {reason}")]
    InvalidRange { table: TableId, reason: String },
    #[error("cache I/O error at {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cache entry {path} is not valid JSON: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

fn invalid(table: TableId, reason: impl Into<String>) -> TableError {
    TableError::InvalidRange { table, reason: reason.into() }
}

// ---------------------------------------------------------------------------
// Windows

/// All spokes of the honeycomb corner window with arms of `n + 1` spokes.
fn alls(n: usize, corner: Corner) -> Vec<DirectedEdge> {
    hex_corner_window(n, corner).all()
}

fn other(corner: Corner) -> Corner {
    match corner {
        Corner::Outer => Corner::Inner,
        Corner::Inner => Corner::Outer,
    }
}

/// The hexagons `(3 - i, -1 - i)`, `i < count`, lined up along the
/// straight arm of the corner windows.
pub fn hexagon_translates(count: usize) -> Vec<Vertex> {
    (0..count as i32).map(|i| Vertex::new(3 - i, -1 - i)).collect()
}

/// [`hexagon_translates`] together with `layers` further copies of each
/// hexagon stacked into the volume.
pub fn layered_hexagon_translates(count: usize, layers: usize) -> Vec<Vertex> {
    let base = hexagon_translates(count);
    let mut out = base.clone();
    for c in base {
        for j in 1..=layers as i32 {
            out.push(c.shift(2 * j, 0));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Individual tables

/// Loops through the bond at the tip of the straight arm, for every even
/// length `6 ≤ l ≤ l_max`.
pub fn loops_through_edge_table(l_max: usize) -> Result<TableResult, TableError> {
    let id = TableId::LoopsThroughEdge;
    if l_max < 6 || l_max % 2 == 1 {
        return Err(invalid(id, format!("l_max must be even and at least 6, got {l_max}")));
    }
    let counts = loops_through_bond_by_length(hex_start_arm(0)[0], l_max);
    let params = TableParams { max: l_max, window: 0, corners: vec![] };
    Ok(TableResult::from_lengths(id, params, (6..=l_max).step_by(2).map(|l| (l, counts[l]))))
}

/// Walks to the boundary: for every vertex `v` of the layered hexagon patch
/// next to the window, the walks of length `l` that start along one of the
/// patch's (cyclically oriented) hexagon bonds leaving `v` and end on the
/// boundary pool, interior avoiding the pool.  Maximised over `v`, then
/// over corner types.
pub fn walks_to_boundary_counts(l_max: usize, window: usize, corners: &[Corner]) -> Vec<u64> {
    let cells = layered_hexagon_translates(window, window);
    let mut out_bonds: BTreeMap<Vertex, Vec<DirectedEdge>> = BTreeMap::new();
    for c in cells {
        let h = hexagon_vertices(c);
        for i in 0..6 {
            out_bonds.entry(h[i]).or_default().push(DirectedEdge::new(h[i], h[(i + 1) % 6]));
        }
    }
    let mut best = vec![0u64; l_max + 1];
    for &corner in corners {
        let pool = firsts(&alls(window, corner));
        let bonds: Vec<DirectedEdge> = {
            let mut b: Vec<_> = out_bonds.values().flatten().copied().collect();
            b.sort();
            b.dedup();
            b
        };
        let per_bond: BTreeMap<DirectedEdge, Vec<u64>> = bonds
            .par_iter()
            .map(|&b| (b, walks_from_bond_by_length(b, &pool, l_max)))
            .collect();
        for bs in out_bonds.values() {
            for (l, slot) in best.iter_mut().enumerate().skip(1) {
                let total: u64 = bs.iter().map(|b| per_bond[b][l]).sum();
                *slot = (*slot).max(total);
            }
        }
    }
    best
}

/// The `N(l)` table for `1 ≤ l ≤ l_max` (window length `l_max`).
pub fn walks_to_boundary_table(l_max: usize) -> Result<TableResult, TableError> {
    let id = TableId::WalksToBoundaryN;
    if l_max < 1 {
        return Err(invalid(id, "l_max must be at least 1"));
    }
    let counts = walks_to_boundary_counts(l_max, l_max, &Corner::BOTH);
    let params = TableParams { max: l_max, window: l_max, corners: Corner::BOTH.to_vec() };
    Ok(TableResult::from_lengths(id, params, (1..=l_max).map(|l| (l, counts[l]))))
}

/// Walks from the middle bond of a straight arm of `window + 1` bonds back
/// to the arm strictly on one side, with the interior avoiding the other
/// side (and the start vertex); index `k` is length `k`.
pub fn right_endpoint_counts(l_max: usize, window: usize) -> Vec<u64> {
    let arm = hex_start_arm(window);
    let z = arm.len() / 2;
    let c = EnumerationConstraints {
        length: l_max,
        start_edges: vec![arm[z]],
        end_edges: arm[..z].to_vec(),
        must_intersect: firsts(&arm),
        avoid: firsts(&arm[z..]),
    };
    count_walks_by_length(&c, l_max)
}

/// The `R(l)` table for even `4 ≤ l ≤ l_max` (window length `l_max`).
pub fn r_table(l_max: usize) -> Result<TableResult, TableError> {
    let id = TableId::RightEndpointR;
    if l_max < 4 || l_max % 2 == 1 {
        return Err(invalid(id, format!("l_max must be even and at least 4, got {l_max}")));
    }
    let counts = right_endpoint_counts(l_max, l_max);
    let params = TableParams { max: l_max, window: l_max, corners: vec![] };
    Ok(TableResult::from_lengths(id, params, (4..=l_max).step_by(2).map(|l| (l, counts[l]))))
}

/// Walks from the straight arm to the turned arm of a corner window whose
/// interior avoids both arms, maximised over the given corner types.
pub fn corner_crossing_counts(l_max: usize, window: usize, corners: &[Corner]) -> Vec<u64> {
    let mut best = vec![0u64; l_max + 1];
    for &corner in corners {
        let w = hex_corner_window(window, corner);
        let c = EnumerationConstraints::between_pools(l_max, w.starts.clone(), w.ends.clone(), firsts(&w.ends));
        for (b, v) in best.iter_mut().zip(count_walks_by_length(&c, l_max)) {
            *b = (*b).max(v);
        }
    }
    best
}

/// The `Q(l)` table for odd `3 ≤ l ≤ l_max` (window length `l_max`).
pub fn q_table(l_max: usize) -> Result<TableResult, TableError> {
    q_table_for(l_max, &Corner::BOTH)
}

/// [`q_table`] restricted to the given corner types.
pub fn q_table_for(l_max: usize, corners: &[Corner]) -> Result<TableResult, TableError> {
    let id = TableId::OddCornerQ;
    if l_max < 3 || l_max % 2 == 0 {
        return Err(invalid(id, format!("l_max must be odd and at least 3, got {l_max}")));
    }
    let counts = corner_crossing_counts(l_max, l_max, corners);
    let params = TableParams { max: l_max, window: l_max, corners: corners.to_vec() };
    Ok(TableResult::from_lengths(id, params, (3..=l_max).step_by(2).map(|l| (l, counts[l]))))
}

/// The square-lattice `C_n` table for `3 ≤ n ≤ n_max`: the largest number
/// of walks plus the largest number of loops of length `n` through a vertex.
pub fn square_cn_table(n_max: usize) -> Result<TableResult, TableError> {
    let id = TableId::SquareCn;
    if n_max < 3 {
        return Err(invalid(id, "n_max must be at least 3"));
    }
    let rows: Vec<(usize, u64)> = (3..=n_max)
        .into_par_iter()
        .map(|n| {
            let (w, l) = max_trails_through_vertex(n);
            (n, w + l)
        })
        .collect();
    let params = TableParams { max: n_max, window: 2 * n_max, corners: Corner::BOTH.to_vec() };
    let mut t = TableResult::from_lengths(id, params, rows);
    t.notes.push(
        "n = 2 enters the criterion analytically with C_2 = 1/2: the only walks of length two straddle the four outer corners, 2(N-1) edges apart".into(),
    );
    Ok(t)
}

// ---------------------------------------------------------------------------
// The S table

/// One column of the S table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct SColumnValues {
    /// Telescoped suprema for `l' = 3..=l'_max` (the first entry is the
    /// supremum itself, `M(l, 3)`).
    pub telescoped: Vec<u64>,
    /// Largest number of hexagons sharing a vertex with the fixed polymer.
    pub loops6: u64,
    /// Same for loops of length 10.
    pub loops10: u64,
}

impl SColumnValues {
    /// Entry for `l' ≥ 3`.
    pub fn at(&self, lp: usize) -> u64 {
        self.telescoped[lp - 3]
    }
}

/// The full S table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct STable {
    pub lp_max: usize,
    pub corners: Vec<Corner>,
    pub columns: BTreeMap<SColumn, SColumnValues>,
}

impl STable {
    pub fn column(&self, c: SColumn) -> &SColumnValues {
        &self.columns[&c]
    }

    fn row_label(lp: usize) -> String {
        if lp == 3 {
            "M3".into()
        } else {
            format!("S{lp}")
        }
    }

    pub fn to_result(&self) -> TableResult {
        let mut rows = Vec::new();
        for (&c, v) in &self.columns {
            let cell = |row: String, value| TableRow {
                index: RowIndex::Cell { column: c.label().into(), row },
                value,
            };
            for lp in 3..=self.lp_max {
                rows.push(cell(Self::row_label(lp), v.at(lp)));
            }
            rows.push(cell("Mal6".into(), v.loops6));
            rows.push(cell("Mal10".into(), v.loops10));
        }
        let params = TableParams { max: self.lp_max, window: self.lp_max + 2, corners: self.corners.clone() };
        TableResult::new(TableId::SupTableS, params, rows)
    }

    pub fn from_result(t: &TableResult) -> Option<Self> {
        let lp_max = t.params.max;
        let mut columns = BTreeMap::new();
        for c in SColumn::ALL {
            let telescoped = (3..=lp_max)
                .map(|lp| t.cell(c, &Self::row_label(lp)))
                .collect::<Option<Vec<_>>>()?;
            columns.insert(
                c,
                SColumnValues { telescoped, loops6: t.cell(c, "Mal6")?, loops10: t.cell(c, "Mal10")? },
            );
        }
        Some(Self { lp_max, corners: t.params.corners.clone(), columns })
    }
}

/// The fixed polymers of one S column placed at a corner of the given type
/// (window arms of `ub + 1` bonds).
fn fixed_polymers(column: SColumn, ub: usize, corner: Corner) -> Vec<Vec<Vertex>> {
    if column.is_loop() {
        return hexagon_translates(ub).into_iter().map(|c| hexagon_vertices(c).to_vec()).collect();
    }
    let a = alls(ub, corner);
    let c = EnumerationConstraints::between_pools(column.length(), a.clone(), a, tips(&alls(ub, other(corner))));
    generate_walks(&c)
        .expect("positive length")
        .into_iter()
        .map(|w| w.vertices().to_vec())
        .collect()
}

/// Computes the S table for `3 ≤ l' ≤ lp_max`, taking suprema over fixed
/// polymers placed at the given corner types.
///
/// For each corner type every walk of length at most `lp_max` between two
/// spokes of the window (arms of `lp_max + 3` bonds) is enumerated once,
/// and tallied against every fixed polymer it meets.  Per polymer the
/// counts are summed cumulatively in `l'`; the column is the sequence of
/// differences of the suprema of these cumulative sums.
pub fn s_table_for(lp_max: usize, corners: &[Corner]) -> Result<STable, TableError> {
    let id = TableId::SupTableS;
    if !(3..=24).contains(&lp_max) {
        return Err(invalid(id, format!("l'_max must lie in 3..=24, got {lp_max}")));
    }
    let ub = lp_max;
    // per column: list of (corner, polymer index in that corner's group list)
    let mut cumulative: BTreeMap<SColumn, Vec<Vec<u64>>> = BTreeMap::new();
    let mut loops: BTreeMap<SColumn, (u64, u64)> = SColumn::ALL.iter().map(|&c| (c, (0, 0))).collect();
    for &corner in corners {
        let mut groups: Vec<Vec<Vertex>> = Vec::new();
        let mut owner: Vec<SColumn> = Vec::new();
        for c in SColumn::ALL {
            for g in fixed_polymers(c, ub, corner) {
                groups.push(g);
                owner.push(c);
            }
        }
        let wide = alls(ub + 2, corner);
        let pool = firsts(&wide);
        let c = EnumerationConstraints::between_pools(lp_max, wide.clone(), wide, vec![]);
        let counts = count_walks_grouped(&c, &groups, lp_max);
        let hex_counts: Vec<(u64, u64)> = groups
            .par_iter()
            .map(|g| (loops_touching(g, 6, &pool).len() as u64, loops_touching(g, 10, &pool).len() as u64))
            .collect();
        for (g, per_len) in counts.into_iter().enumerate() {
            let col = owner[g];
            let mut run = 0;
            let cum: Vec<u64> = (3..=lp_max)
                .map(|lp| {
                    run += per_len[lp];
                    run
                })
                .collect();
            cumulative.entry(col).or_default().push(cum);
            let e = loops.get_mut(&col).expect("column");
            e.0 = e.0.max(hex_counts[g].0);
            e.1 = e.1.max(hex_counts[g].1);
        }
    }
    // A hexagon away from the boundary meets the most hexagons and
    // decagons; the loop column includes it.
    let bulk = hexagon_vertices(Vertex::new(100, 0));
    let e = loops.get_mut(&SColumn::L6).expect("column");
    e.0 = e.0.max(loops_touching(&bulk, 6, &[]).len() as u64);
    e.1 = e.1.max(loops_touching(&bulk, 10, &[]).len() as u64);

    let mut columns = BTreeMap::new();
    for c in SColumn::ALL {
        let cums = cumulative.get(&c).cloned().unwrap_or_default();
        let mut prev = 0;
        let telescoped = (0..=lp_max - 3)
            .map(|i| {
                let sup = cums.iter().map(|v| v[i]).max().unwrap_or(0);
                let d = sup - prev;
                prev = sup;
                d
            })
            .collect();
        let (l6, l10) = loops[&c];
        columns.insert(c, SColumnValues { telescoped, loops6: l6, loops10: l10 });
    }
    Ok(STable { lp_max, corners: corners.to_vec(), columns })
}

/// The S table over both corner types.
pub fn s_table(lp_max: usize) -> Result<STable, TableError> {
    s_table_for(lp_max, &Corner::BOTH)
}

// ---------------------------------------------------------------------------
// Cache

/// On-disk cache of computed tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableCache {
    dir: PathBuf,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// Cache in `$KPU_CACHE_DIR`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).filter(|s| !s.is_empty()).map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, id: TableId, params: &TableParams) -> PathBuf {
        let corners: String = params
            .corners
            .iter()
            .map(|c| match c {
                Corner::Outer => 'o',
                Corner::Inner => 'i',
            })
            .collect();
        self.dir.join(format!(
            "{}-max{}-win{}-{}-{}.json",
            id.short(),
            params.max,
            params.window,
            if corners.is_empty() { "x" } else { &corners },
            GENERATOR_VERSION
        ))
    }

    /// Cached entry, if present and produced by this generator version.
    pub fn load(&self, id: TableId, params: &TableParams) -> Result<Option<TableResult>, TableError> {
        let path = self.path(id, params);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(source) => return Err(TableError::Io { path, source }),
        };
        let t: TableResult = serde_json::from_str(&text).map_err(|source| TableError::Json { path, source })?;
        Ok((t.generator_version == GENERATOR_VERSION && t.table_id == id && &t.params == params).then_some(t))
    }

    /// Atomically stores a table.
    pub fn store(&self, t: &TableResult) -> Result<(), TableError> {
        use std::io::Write;
        let io = |source| TableError::Io { path: self.dir.clone(), source };
        std::fs::create_dir_all(&self.dir).map_err(io)?;
        let path = self.path(t.table_id, &t.params);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io)?;
        let json = serde_json::to_string_pretty(t).expect("table serialises");
        tmp.write_all(json.as_bytes()).map_err(io)?;
        tmp.persist(&path).map_err(|e| TableError::Io { path, source: e.error })?;
        Ok(())
    }

    /// Loads the entry or computes and stores it.
    pub fn get_or_compute(
        &self,
        id: TableId,
        params: &TableParams,
        compute: impl FnOnce() -> Result<TableResult, TableError>,
    ) -> Result<TableResult, TableError> {
        if let Some(t) = self.load(id, params)? {
            return Ok(t);
        }
        let t = compute()?;
        self.store(&t)?;
        Ok(t)
    }
}

/// Computes (or loads from `cache`) the table `id` up to `max`.
pub fn compute_table(id: TableId, max: usize, cache: Option<&TableCache>) -> Result<TableResult, TableError> {
    let compute = || match id {
        TableId::LoopsThroughEdge => loops_through_edge_table(max),
        TableId::WalksToBoundaryN => walks_to_boundary_table(max),
        TableId::SupTableS => s_table(max).map(|s| s.to_result()),
        TableId::RightEndpointR => r_table(max),
        TableId::OddCornerQ => q_table(max),
        TableId::SquareCn => square_cn_table(max),
    };
    match cache {
        None => compute(),
        Some(c) => {
            let params = expected_params(id, max, &Corner::BOTH);
            c.get_or_compute(id, &params, compute)
        }
    }
}

fn expected_params(id: TableId, max: usize, corners: &[Corner]) -> TableParams {
    match id {
        TableId::LoopsThroughEdge => TableParams { max, window: 0, corners: vec![] },
        TableId::RightEndpointR => TableParams { max, window: max, corners: vec![] },
        TableId::SupTableS => TableParams { max, window: max + 2, corners: corners.to_vec() },
        TableId::SquareCn => TableParams { max, window: 2 * max, corners: Corner::BOTH.to_vec() },
        _ => TableParams { max, window: max, corners: corners.to_vec() },
    }
}

/// The honeycomb tables the convergence criterion needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HexTables {
    pub corners: Vec<Corner>,
    pub loops: BTreeMap<usize, u64>,
    pub r: BTreeMap<usize, u64>,
    pub q: BTreeMap<usize, u64>,
    pub s: STable,
}

impl HexTables {
    /// Computes (or loads) the tables at their full ranges, maximising over
    /// `corners` (both corner types for annuli, the outer one for balls).
    pub fn load(corners: &[Corner], cache: Option<&TableCache>) -> Result<Self, TableError> {
        let get = |id: TableId, max: usize, f: &dyn Fn() -> Result<TableResult, TableError>| match cache {
            None => f(),
            Some(c) => c.get_or_compute(id, &expected_params(id, max, corners), f),
        };
        let loops = get(TableId::LoopsThroughEdge, 28, &|| loops_through_edge_table(28))?;
        let r = get(TableId::RightEndpointR, 20, &|| r_table(20))?;
        let q = get(TableId::OddCornerQ, 19, &|| q_table_for(19, corners))?;
        let s = get(TableId::SupTableS, 20, &|| s_table_for(20, corners).map(|s| s.to_result()))?;
        let s = STable::from_result(&s).ok_or_else(|| invalid(TableId::SupTableS, "malformed cached S table"))?;
        Ok(Self { corners: corners.to_vec(), loops: loops.as_map(), r: r.as_map(), q: q.as_map(), s })
    }
}
