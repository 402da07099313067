//! Command-line front end: table generation, convergence-criterion
//! verification, bound evaluation and the oracle suite.
//!
//! Exit codes form a stable contract:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | a check failed (criterion not met, reference mismatch, oracle failure) |
//! | 2 | usage error (bad flag, invalid range) |
//! | 3 | parameters outside the proven regime |
//!
//! Structured output is JSON by default and deserialises back into the
//! `kpu-core` types it was produced from.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kpu_core::bounds::{
    correlation_bound, f_bound, indistinguishability_bound, ltqo_bound, BoundResult, BoundsError, BoundsReport,
};
use kpu_core::criterion::{
    verify_kpu_hex_with, verify_kpu_square_with, CriterionError, HexOptions, KpuReport, LoopEvenRule,
};
use kpu_core::golden::{check_table, check_totals};
use kpu_core::lattice::LatticeKind;
use kpu_core::oracle::{run_suite, OracleError, OracleReport};
use kpu_core::tables::{compute_table, TableCache, TableError, TableId, TableResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_OUT_OF_REGIME: i32 = 3;

/// Parsed command line.
#[derive(Debug, Parser)]
#[command(name = "kpu", version, about = "Lattice-polymer tables, cluster-expansion convergence checks and AKLT bounds")]
pub struct RunConfig {
    /// Directory for cached tables (overrides $KPU_CACHE_DIR).
    #[arg(long, global = true, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Lattice {
    #[value(alias = "hexagonal")]
    Hex,
    Square,
}

impl From<Lattice> for LatticeKind {
    fn from(l: Lattice) -> Self {
        match l {
            Lattice::Hex => LatticeKind::Hexagonal,
            Lattice::Square => LatticeKind::Square,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LoopRule {
    Tabulated,
    Corridor,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute (or load from the cache) one of the combinatorial tables.
    Tables(TablesArgs),
    /// Verify the cluster-expansion convergence criterion.
    Kpu(KpuArgs),
    /// Evaluate indistinguishability, LTQO and correlation bounds.
    Bounds(BoundsArgs),
    /// Run the Monte-Carlo and reference-port oracle suite.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// Table id: loops, n, s, r, q or cn.
    #[arg(long)]
    pub id: String,
    /// Largest length (defaults to the full published range).
    #[arg(long)]
    pub max: Option<usize>,
    /// Compare against the published values; exit 1 on any mismatch.
    #[arg(long = "check-golden", alias = "check-against-paper")]
    pub check: bool,
    /// Also write the JSON table to this file.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KpuArgs {
    #[arg(long, value_enum)]
    pub lattice: Lattice,
    /// Decoration level.
    #[arg(long, default_value_t = 0)]
    pub m: u32,
    /// Inner radius (default 25 on the honeycomb, 2 on the square lattice).
    #[arg(long = "K")]
    pub k: Option<i64>,
    /// Outer radius (default 78 on the honeycomb, 10 on the square lattice).
    #[arg(long = "N")]
    pub n: Option<i64>,
    /// Endpoint count used for long loops meeting even walks.
    #[arg(long, value_enum, default_value_t = LoopRule::Tabulated)]
    pub loop_rule: LoopRule,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub lattice: Lattice,
    /// Evaluate the LTQO bound.
    #[arg(long)]
    pub ltqo: bool,
    /// Evaluate the correlation-decay bound.
    #[arg(long)]
    pub corr: bool,
    /// Evaluate F_m(N, K).
    #[arg(long)]
    pub f: bool,
    /// Evaluate the ground-state indistinguishability bound.
    #[arg(long)]
    pub indist: bool,
    #[arg(long, default_value_t = 0)]
    pub m: u32,
    #[arg(long = "K")]
    pub k: Option<i64>,
    #[arg(long = "N")]
    pub n: Option<i64>,
    /// Diameter of the observable supports (correlation bound).
    #[arg(long = "M")]
    pub m_diam: Option<i64>,
    /// Lattice distance between the supports (correlation bound).
    #[arg(long)]
    pub d: Option<i64>,
    #[arg(long = "normA", default_value_t = 1.0)]
    pub norm_a: f64,
    #[arg(long = "normB", default_value_t = 1.0)]
    pub norm_b: f64,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Monte-Carlo samples per check.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
}

/// A failed command: exit code plus message for stderr.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

type CmdResult = Result<i32, Failure>;

/// Runs the tool with `args` (including the program name), writing to the
/// process's stdout/stderr; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let rendered = e.render();
            let _ = if code == EXIT_OK { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    let result = match &cfg.command {
        Command::Tables(a) => cmd_tables(&cfg, a, out, err),
        Command::Kpu(a) => cmd_kpu(&cfg, a, out, err),
        Command::Bounds(a) => cmd_bounds(&cfg, a, out),
        Command::Validate(a) => cmd_validate(&cfg, a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::new(EXIT_CHECK_FAILED, format!("output error: {e}"))
}

fn cache(cfg: &RunConfig) -> Option<TableCache> {
    cfg.cache_dir.clone().map(TableCache::new).or_else(TableCache::from_env)
}

fn emit_json<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("output types serialise");
    writeln!(out, "{text}").map_err(io_failure)
}

fn table_failure(e: TableError) -> Failure {
    match e {
        TableError::InvalidRange { .. } => Failure::new(EXIT_USAGE, e.to_string()),
        _ => Failure::new(EXIT_CHECK_FAILED, e.to_string()),
    }
}

fn cmd_tables(cfg: &RunConfig, a: &TablesArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let ids: Vec<&str> = TableId::ALL.iter().map(|t| t.short()).collect();
    let id = TableId::from_short(&a.id)
        .ok_or_else(|| Failure::new(EXIT_USAGE, format!("unknown table id {:?} (expected one of {})", a.id, ids.join(", "))))?;
    let max = a.max.unwrap_or(id.default_max());
    let table = compute_table(id, max, cache(cfg).as_ref()).map_err(table_failure)?;

    if let Some(path) = &a.output {
        let json = serde_json::to_string_pretty(&table).expect("tables serialise");
        std::fs::write(path, json).map_err(|e| Failure::new(EXIT_CHECK_FAILED, format!("{}: {e}", path.display())))?;
    }
    match cfg.format {
        Format::Json => emit_json(out, &table)?,
        Format::Csv => write!(out, "{}", table.to_csv()).map_err(io_failure)?,
        Format::Text => write_table_text(out, &table).map_err(io_failure)?,
    }

    if a.check {
        let mismatches = check_table(&table);
        for m in &mismatches {
            writeln!(err, "mismatch: {m}").map_err(io_failure)?;
        }
        if !mismatches.is_empty() {
            return Ok(EXIT_CHECK_FAILED);
        }
    }
    Ok(EXIT_OK)
}

fn write_table_text(out: &mut dyn Write, t: &TableResult) -> std::io::Result<()> {
    writeln!(out, "table {} (max {}, generator {})", t.table_id, t.params.max, t.generator_version)?;
    for line in t.to_csv().lines().skip(1) {
        writeln!(out, "  {}", line.replace(',', "\t"))?;
    }
    for n in &t.notes {
        writeln!(out, "note: {n}")?;
    }
    Ok(())
}

fn criterion_failure(e: CriterionError) -> Failure {
    let code = match e {
        CriterionError::OutsideRegime(_) | CriterionError::UndecoratedSquare => EXIT_OUT_OF_REGIME,
        CriterionError::InvalidArgument(_) => EXIT_USAGE,
        _ => EXIT_CHECK_FAILED,
    };
    Failure::new(code, e.to_string())
}

fn cmd_kpu(cfg: &RunConfig, a: &KpuArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let cache = cache(cfg);
    let report = match a.lattice {
        Lattice::Hex => {
            let opts = HexOptions {
                loop_even_rule: match a.loop_rule {
                    LoopRule::Tabulated => LoopEvenRule::Tabulated,
                    LoopRule::Corridor => LoopEvenRule::Corridor,
                },
            };
            verify_kpu_hex_with(a.m, a.k.unwrap_or(25), a.n.unwrap_or(78), &opts, cache.as_ref())
        }
        Lattice::Square => verify_kpu_square_with(a.m, a.k.unwrap_or(2), a.n.unwrap_or(10), cache.as_ref()),
    }
    .map_err(criterion_failure)?;

    match cfg.format {
        Format::Json => emit_json(out, &report)?,
        Format::Csv => write_kpu_csv(out, &report).map_err(io_failure)?,
        Format::Text => write_kpu_text(out, &report).map_err(io_failure)?,
    }
    if report.lattice == LatticeKind::Hexagonal && report.m == 0 && report.k >= 25 {
        for m in check_totals(&report, 5e-4) {
            writeln!(err, "note: {m}").map_err(io_failure)?;
        }
    }
    Ok(if report.pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn write_kpu_csv(out: &mut dyn Write, r: &KpuReport) -> std::io::Result<()> {
    writeln!(out, "column,row,value")?;
    for c in &r.columns {
        for cell in &c.cells {
            writeln!(out, "{},{},{}", c.column, cell.row, cell.value)?;
        }
        writeln!(out, "{},Total,{}", c.column, c.total)?;
    }
    Ok(())
}

fn write_kpu_text(out: &mut dyn Write, r: &KpuReport) -> std::io::Result<()> {
    writeln!(out, "{:?} lattice, m = {}, K = {}, N = {}", r.lattice, r.m, r.k, r.n)?;
    for c in &r.columns {
        writeln!(
            out,
            "  {:<16} total {:.6}  threshold {:.4}  margin {:+.6}  {}",
            c.column,
            c.total,
            c.threshold,
            c.margin,
            if c.passes() { "ok" } else { "FAIL" }
        )?;
    }
    if let Some(d) = r.dmin {
        writeln!(out, "  d_min = {d}")?;
    }
    for d in &r.ball_deviations {
        writeln!(out, "  ball deviation {}/{}: {:.6} (annulus {:.6})", d.column, d.row, d.ball, d.annulus)?;
    }
    for n in &r.notes {
        writeln!(out, "  note: {n}")?;
    }
    writeln!(out, "{} (worst margin {:+.6})", if r.pass { "PASS" } else { "FAIL" }, r.min_margin)
}

fn bounds_failure(e: BoundsError) -> Failure {
    Failure::new(EXIT_USAGE, e.to_string())
}

fn required<T: Copy>(v: Option<T>, flag: &str, bound: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::new(EXIT_USAGE, format!("--{bound} requires --{flag}")))
}

fn cmd_bounds(cfg: &RunConfig, a: &BoundsArgs, out: &mut dyn Write) -> CmdResult {
    if !(a.ltqo || a.corr || a.f || a.indist) {
        return Err(Failure::new(EXIT_USAGE, "select at least one of --ltqo, --corr, --f, --indist"));
    }
    let lattice = LatticeKind::from(a.lattice);
    let mut results: Vec<BoundResult> = Vec::new();
    let nk = |bound: &str| -> Result<(i64, i64), Failure> { Ok((required(a.n, "N", bound)?, required(a.k, "K", bound)?)) };
    if a.f {
        let (n, k) = nk("f")?;
        results.push(f_bound(lattice, a.m, n, k));
    }
    if a.indist {
        let (n, k) = nk("indist")?;
        results.push(indistinguishability_bound(lattice, a.m, n, k, a.norm_a).map_err(bounds_failure)?);
    }
    if a.ltqo {
        let (n, k) = nk("ltqo")?;
        results.push(ltqo_bound(lattice, a.m, n, k, a.norm_a).map_err(bounds_failure)?);
    }
    if a.corr {
        let m_diam = required(a.m_diam, "M", "corr")?;
        let d = required(a.d, "d", "corr")?;
        results.push(correlation_bound(lattice, m_diam, d, a.norm_a, a.norm_b).map_err(bounds_failure)?);
    }
    let report = BoundsReport::new(lattice, results);
    match cfg.format {
        Format::Json => emit_json(out, &report)?,
        Format::Csv => write_bounds_csv(out, &report).map_err(io_failure)?,
        Format::Text => write_bounds_text(out, &report).map_err(io_failure)?,
    }
    Ok(if report.regime_ok() { EXIT_OK } else { EXIT_OUT_OF_REGIME })
}

fn write_bounds_csv(out: &mut dyn Write, r: &BoundsReport) -> std::io::Result<()> {
    writeln!(out, "bound,value,regime_ok")?;
    for b in &r.results {
        writeln!(out, "{},{},{}", b.bound, b.value, b.regime_ok)?;
    }
    Ok(())
}

fn write_bounds_text(out: &mut dyn Write, r: &BoundsReport) -> std::io::Result<()> {
    let c = &r.c_gamma;
    writeln!(
        out,
        "C_Gamma: quoted {:.4}, recomputed {:.4}{}",
        c.quoted,
        c.recomputed,
        if c.discrepancy { "  (DISCREPANCY)" } else { "" }
    )?;
    for b in &r.results {
        writeln!(out, "{}: {:.6e}  regime_ok = {}", b.bound, b.value, b.regime_ok)?;
        for v in &b.violations {
            writeln!(out, "  violated: {v}")?;
        }
        for n in &b.notes {
            writeln!(out, "  note: {n}")?;
        }
    }
    Ok(())
}

fn oracle_failure(e: OracleError) -> Failure {
    match e {
        OracleError::TooFewSamples { .. } => Failure::new(EXIT_USAGE, e.to_string()),
        _ => Failure::new(EXIT_CHECK_FAILED, e.to_string()),
    }
}

fn cmd_validate(cfg: &RunConfig, a: &ValidateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let report: OracleReport = run_suite(a.seed, a.samples).map_err(oracle_failure)?;
    match cfg.format {
        Format::Json => emit_json(out, &report)?,
        Format::Csv | Format::Text => {
            for c in &report.checks {
                writeln!(
                    out,
                    "{} {}: {:.7} vs {:.7} (stderr {:.1e}) {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.expected,
                    c.stderr,
                    c.detail
                )
                .map_err(io_failure)?;
            }
        }
    }
    for c in report.failures() {
        writeln!(err, "failed: {} ({} vs {})", c.name, c.value, c.expected).map_err(io_failure)?;
    }
    Ok(if report.pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}
