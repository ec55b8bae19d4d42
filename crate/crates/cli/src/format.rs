//! Output rendering: CSV and JSON with shortest round-trip floats.

use qtm_core::search::SearchOutcome;
use qtm_core::sweep::{MapCell, SweepResult};
use qtm_core::transistor::TransistorScan;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{CliError, Result};

/// Output file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Shortest decimal string that parses back to `x`; `NaN`, `inf` and `-inf`
/// for non-finite values.
pub fn fmt_f64(x: f64) -> String {
    ryu::Buffer::new().format(x).to_string()
}

/// JSON number, or the [`fmt_f64`] string when `x` is not finite.
pub fn json_f64(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(fmt_f64(x)), Value::Number)
}

fn csv_string(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(runtime)?;
    for row in rows {
        w.write_record(&row).map_err(runtime)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    String::from_utf8(bytes).map_err(runtime)
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn sweep_columns(with_transistor: bool) -> Vec<&'static str> {
    let mut cols = vec![
        "axis1",
        "axis2",
        "j_hot",
        "j_cold",
        "j_mid",
        "power",
        "entropy_rate",
        "mode",
        "phi",
    ];
    if with_transistor {
        cols.extend(["r", "g"]);
    }
    cols
}

fn sweep_row(c: &MapCell, with_transistor: bool) -> Vec<(f64, Option<&'static str>)> {
    let mut row = vec![
        (c.axis1, None),
        (c.axis2.unwrap_or(f64::NAN), None),
        (c.point.j_hot, None),
        (c.point.j_cold, None),
        (c.point.j_mid, None),
        (c.point.power, None),
        (c.point.entropy_rate, None),
        (f64::NAN, Some(c.label())),
        (c.phi, None),
    ];
    if with_transistor {
        row.push((c.r.unwrap_or(f64::NAN), None));
        row.push((c.g.unwrap_or(f64::NAN), None));
    }
    row
}

fn has_transistor(result: &SweepResult) -> bool {
    result.spec.outputs.contains(&qtm_core::sweep::Output::Transistor)
}

/// One CSV row per cell in row-major order. Single-axis sweeps leave `axis2` empty.
pub fn sweep_csv(result: &SweepResult) -> Result<String> {
    let t = has_transistor(result);
    let one_axis = result.spec.axis2.is_none();
    let rows = result.cells.iter().map(|c| {
        sweep_row(c, t)
            .into_iter()
            .enumerate()
            .map(|(i, (x, label))| match label {
                Some(l) => l.to_string(),
                None if i == 1 && one_axis => String::new(),
                None => fmt_f64(x),
            })
            .collect()
    });
    csv_string(&sweep_columns(t), rows)
}

/// The CSV columns as JSON records under a metadata header.
pub fn sweep_json(result: &SweepResult, version: &str) -> Result<String> {
    let t = has_transistor(result);
    let cols = sweep_columns(t);
    let rows: Vec<Value> = result
        .cells
        .iter()
        .map(|c| {
            let mut obj = Map::new();
            for (name, (x, label)) in cols.iter().zip(sweep_row(c, t)) {
                let v = match label {
                    Some(l) => Value::String(l.to_string()),
                    None if *name == "axis2" && c.axis2.is_none() => Value::Null,
                    None => json_f64(x),
                };
                obj.insert(name.to_string(), v);
            }
            if let Some(e) = &c.error {
                obj.insert("error".into(), Value::String(e.clone()));
            }
            Value::Object(obj)
        })
        .collect();
    let doc = json!({
        "metadata": {
            "version": version,
            "spec": result.spec,
            "columns": cols,
        },
        "rows": rows,
    });
    pretty(&doc)
}

const TRANSISTOR_COLUMNS: [&str; 8] = ["omega_drive", "j_hot", "j_cold", "j_mid", "power", "r", "g", "in_window"];

pub fn transistor_csv(scan: &TransistorScan) -> Result<String> {
    let rows = scan.points.iter().map(|p| {
        vec![
            fmt_f64(p.omega_drive),
            fmt_f64(p.point.j_hot),
            fmt_f64(p.point.j_cold),
            fmt_f64(p.point.j_mid),
            fmt_f64(p.point.power),
            fmt_f64(p.r),
            fmt_f64(p.g),
            u8::from(scan.in_window(p.omega_drive)).to_string(),
        ]
    });
    csv_string(&TRANSISTOR_COLUMNS, rows)
}

pub fn transistor_json(scan: &TransistorScan, metadata: Value) -> Result<String> {
    let rows: Vec<Value> = scan
        .points
        .iter()
        .map(|p| {
            json!({
                "omega_drive": json_f64(p.omega_drive),
                "j_hot": json_f64(p.point.j_hot),
                "j_cold": json_f64(p.point.j_cold),
                "j_mid": json_f64(p.point.j_mid),
                "power": json_f64(p.point.power),
                "r": json_f64(p.r),
                "g": json_f64(p.g),
                "in_window": scan.in_window(p.omega_drive),
                "g_reliable": p.g_reliable,
            })
        })
        .collect();
    let windows: Vec<Value> = scan
        .windows
        .iter()
        .map(|w| {
            json!({
                "omega_min": json_f64(w.omega_min),
                "omega_max": json_f64(w.omega_max),
                "width": json_f64(w.width()),
                "min_r": json_f64(w.min_r),
                "min_g": json_f64(w.min_g),
                "max_g": json_f64(w.max_g),
                "has_unreliable_gain": w.has_unreliable_gain,
            })
        })
        .collect();
    pretty(&json!({ "metadata": metadata, "rows": rows, "windows": windows }))
}

pub fn search_json(outcome: &SearchOutcome, metadata: Value) -> Result<String> {
    pretty(&json!({ "metadata": metadata, "outcome": outcome }))
}

pub fn pretty(v: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(runtime)?;
    s.push('\n');
    Ok(s)
}
