//! Deterministic table emission. Every number is printed with 17
//! significant digits so that parsing and re-emitting a file reproduces it
//! byte for byte.

use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const SWEEP_COLUMNS: [&str; 7] = [
    "x_over_kappa",
    "out_norm_L",
    "out_norm_R",
    "cavity_norm",
    "mech_norm",
    "phi_plus_norm",
    "phi_minus_norm",
];

pub const TRAJECTORY_COLUMNS: [&str; 7] = [
    "t_kappa", "re_db", "im_db", "re_dc", "im_dc", "out_L_sq", "out_R_sq",
];

/// Full round-trip float format (17 significant digits).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_table(columns: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn json_table(columns: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::from("{\n  \"columns\": [");
    out.push_str(
        &columns
            .iter()
            .map(|c| format!("\"{c}\""))
            .collect::<Vec<_>>()
            .join(", "),
    );
    out.push_str("],\n  \"rows\": [\n");
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str("    [");
        out.push_str(&cells.join(", "));
        out.push(']');
        if i + 1 != rows.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]\n}\n");
    out
}

/// Rebuild the canonical JSON table from parsed JSON; used to verify that
/// emitted files round-trip byte for byte.
pub fn reemit_json_table(value: &Value) -> CliResult<String> {
    let columns: Vec<&str> = value
        .get("columns")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Config("json table lacks columns".into()))?
        .iter()
        .map(|c| {
            c.as_str()
                .ok_or_else(|| CliError::Config("non-string column".into()))
        })
        .collect::<CliResult<_>>()?;
    let rows: Vec<Vec<f64>> = value
        .get("rows")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Config("json table lacks rows".into()))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| CliError::Config("non-array row".into()))?
                .iter()
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| CliError::Config("non-number cell".into()))
                })
                .collect::<CliResult<Vec<f64>>>()
        })
        .collect::<CliResult<_>>()?;
    Ok(json_table(&columns, &rows))
}

/// Write to a file, or to stdout when the path is absent or "-".
pub fn write_output(path: Option<&str>, contents: &str) -> CliResult<()> {
    match path {
        None | Some("-") => {
            use std::io::Write;
            std::io::stdout()
                .write_all(contents.as_bytes())
                .map_err(|e| CliError::Config(format!("stdout: {e}")))
        }
        Some(p) => std::fs::write(p, contents)
            .map_err(|e| CliError::Config(format!("cannot write {p}: {e}"))),
    }
}
