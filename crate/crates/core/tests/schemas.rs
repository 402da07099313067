//! The JSON schemas in `docs/schemas/` must match the serialised types.
//! Regenerate them with `KPU_BLESS_SCHEMAS=1 cargo test --test schemas`.

use std::path::PathBuf;

use schemars::schema_for;

use kpu_core::bounds::{BoundResult, BoundsReport};
use kpu_core::criterion::KpuReport;
use kpu_core::golden::Golden;
use kpu_core::oracle::{OracleReport, PortDiff};
use kpu_core::tables::TableResult;

fn schemas() -> Vec<(&'static str, schemars::schema::RootSchema)> {
    vec![
        ("table_result", schema_for!(TableResult)),
        ("kpu_report", schema_for!(KpuReport)),
        ("bound_result", schema_for!(BoundResult)),
        ("bounds_report", schema_for!(BoundsReport)),
        ("oracle_report", schema_for!(OracleReport)),
        ("port_diff", schema_for!(PortDiff)),
        ("golden", schema_for!(Golden)),
    ]
}

#[test]
fn documented_schemas_are_current() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas");
    let bless = std::env::var_os("KPU_BLESS_SCHEMAS").is_some();
    if bless {
        std::fs::create_dir_all(&dir).unwrap();
    }
    for (name, schema) in schemas() {
        let text = serde_json::to_string_pretty(&schema).unwrap() + "\n";
        let path = dir.join(format!("{name}.schema.json"));
        if bless {
            std::fs::write(&path, &text).unwrap();
        } else {
            let on_disk = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(on_disk, text, "{} is stale; rerun with KPU_BLESS_SCHEMAS=1", path.display());
        }
    }
}

#[test]
fn golden_data_validate_against_their_type() {
    let g = kpu_core::golden::golden();
    let text = serde_json::to_string(g).unwrap();
    let back: Golden = serde_json::from_str(&text).unwrap();
    assert_eq!(&back, g);
}
