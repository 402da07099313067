//! Published reference values: the tables, the totals of the convergence
//! check and the quoted constants, each with a short citation.
//!
//! The data live in `data/golden.json` and are compiled into the crate.
//! The `check_*` functions compare computed results against them and return
//! every mismatch together with its citation; an empty vector means full
//! agreement.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::criterion::KpuReport;
use crate::tables::{RowIndex, TableId, TableResult};

const GOLDEN_JSON: &str = include_str!("../data/golden.json");

/// A table of integer reference values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct GoldenTable {
    pub citation: String,
    /// Keyed by length, or by `column:row` for the S table.
    pub values: BTreeMap<String, u64>,
}

/// A table of real reference values (4-decimal roundings).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct GoldenReals {
    pub citation: String,
    /// Keyed by `column:row`.
    pub values: BTreeMap<String, f64>,
}

/// A quoted scalar constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct GoldenConstant {
    pub value: f64,
    pub citation: String,
}

/// The full reference data set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Golden {
    pub version: u32,
    /// Keyed by [`TableId::short`].
    pub tables: BTreeMap<String, GoldenTable>,
    /// Cells and totals of the honeycomb convergence check at `m = 0`.
    pub totals: GoldenReals,
    /// `C_hex`, `C_square`, `square_total`, `square_a`.
    pub constants: BTreeMap<String, GoldenConstant>,
}

impl Golden {
    pub fn table(&self, id: TableId) -> Option<&GoldenTable> {
        self.tables.get(id.short())
    }

    /// Reference value of an integer table at length `l`.
    pub fn length_value(&self, id: TableId, l: usize) -> Option<u64> {
        self.table(id)?.values.get(&l.to_string()).copied()
    }

    /// Reference S-table cell (`column` as in [`crate::tables::SColumn::label`],
    /// `row` one of `M3`, `S4`..`S20`, `Mal6`, `Mal10`).
    pub fn s_cell(&self, column: &str, row: &str) -> Option<u64> {
        self.table(TableId::SupTableS)?.values.get(&format!("{column}:{row}")).copied()
    }

    /// Reference cell of the totals table (`row = "Total"` for the total).
    pub fn total_cell(&self, column: &str, row: &str) -> Option<f64> {
        self.totals.values.get(&format!("{column}:{row}")).copied()
    }

    pub fn constant(&self, name: &str) -> Option<&GoldenConstant> {
        self.constants.get(name)
    }
}

/// The compiled-in reference data.
pub fn golden() -> &'static Golden {
    static G: OnceLock<Golden> = OnceLock::new();
    G.get_or_init(|| serde_json::from_str(GOLDEN_JSON).expect("embedded reference data are valid"))
}

/// One disagreement between a computed value and its reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Mismatch {
    pub key: String,
    pub expected: f64,
    /// `None` if the computed result lacks the entry.
    pub actual: Option<f64>,
    pub citation: String,
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.actual {
            Some(a) => write!(f, "{}: computed {a}, reference {} ({})", self.key, self.expected, self.citation),
            None => write!(f, "{}: missing, reference {} ({})", self.key, self.expected, self.citation),
        }
    }
}

/// Compares a computed table with the reference values lying inside its
/// range.  Tables without reference data yield no mismatches.
pub fn check_table(t: &TableResult) -> Vec<Mismatch> {
    let Some(g) = golden().table(t.table_id) else {
        return Vec::new();
    };
    let computed: BTreeMap<String, u64> = t
        .rows
        .iter()
        .map(|r| match &r.index {
            RowIndex::Length(l) => (l.to_string(), r.value),
            RowIndex::Cell { column, row } => (format!("{column}:{row}"), r.value),
        })
        .collect();
    let in_range = |key: &str| match key.parse::<usize>() {
        Ok(l) => l <= t.params.max,
        Err(_) => s_row_in_range(key, t.params.max),
    };
    g.values
        .iter()
        .filter(|(k, _)| in_range(k))
        .filter_map(|(k, &expected)| {
            let actual = computed.get(k).copied();
            (actual != Some(expected)).then(|| Mismatch {
                key: k.clone(),
                expected: expected as f64,
                actual: actual.map(|a| a as f64),
                citation: format!("{}, entry {k}", g.citation),
            })
        })
        .collect()
}

fn s_row_in_range(key: &str, lp_max: usize) -> bool {
    let row = key.split_once(':').map_or(key, |(_, r)| r);
    match row.strip_prefix('S').and_then(|s| s.parse::<usize>().ok()) {
        Some(lp) => lp <= lp_max,
        None => true,
    }
}

/// Compares every cell and total of an `m = 0` honeycomb report with the
/// reference roundings, allowing an absolute deviation of `tol`.
pub fn check_totals(report: &KpuReport, tol: f64) -> Vec<Mismatch> {
    let g = &golden().totals;
    g.values
        .iter()
        .filter_map(|(key, &expected)| {
            let (column, row) = key.split_once(':')?;
            let col = report.column(column);
            let actual = col.and_then(|c| {
                if row == "Total" {
                    Some(c.total)
                } else {
                    c.cells.iter().find(|cell| cell.row == row).map(|cell| cell.value)
                }
            });
            let ok = actual.is_some_and(|a| (a - expected).abs() <= tol);
            (!ok).then(|| Mismatch {
                key: key.clone(),
                expected,
                actual,
                citation: format!("{}, cell {key}", g.citation),
            })
        })
        .collect()
}

/// Compares a scalar with the named reference constant.
pub fn check_constant(name: &str, actual: f64, tol: f64) -> Option<Mismatch> {
    let c = golden().constant(name)?;
    ((actual - c.value).abs() > tol).then(|| Mismatch {
        key: name.into(),
        expected: c.value,
        actual: Some(actual),
        citation: c.citation.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_data_parse() {
        let g = golden();
        assert_eq!(g.tables.len(), TableId::ALL.len());
        assert_eq!(g.length_value(TableId::LoopsThroughEdge, 6), Some(2));
        assert_eq!(g.s_cell("w5", "Mal10"), Some(11));
        assert_eq!(g.total_cell("W>6", "Total"), Some(0.9997));
        assert_eq!(g.totals.values.len(), 7 * 14);
        assert_eq!(g.table(TableId::SupTableS).unwrap().values.len(), 5 * 20);
    }

    #[test]
    fn s_rows_respect_range() {
        assert!(s_row_in_range("w3:S10", 10));
        assert!(!s_row_in_range("w3:S11", 10));
        assert!(s_row_in_range("w3:Mal6", 4));
        assert!(s_row_in_range("w3:M3", 4));
    }
}
