//! CSV and JSON serialization of sweep results.
//!
//! Floats are written as `{:.16e}` (17 significant digits) in CSV and with
//! the shortest round-trip representation in JSON. Lines end in `\n`. CSV
//! output gets a `<path>.provenance.json` sidecar; JSON output embeds the
//! provenance.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::config::OutputFormat;
use super::runner::SweepResult;
use crate::error::{Error, Result};

pub const KEY_COLUMNS: [&str; 6] = ["B", "phi", "t", "init_id", "site_i", "site_j"];

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn header(result: &SweepResult) -> Vec<String> {
    KEY_COLUMNS
        .iter()
        .map(|c| c.to_string())
        .chain(result.columns.iter().cloned())
        .collect()
}

pub fn to_csv_string(result: &SweepResult) -> String {
    let mut out = header(result).join(",");
    out.push('\n');
    for row in &result.rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            format_float(row.b),
            format_float(row.phi),
            format_float(row.t),
            row.init_id,
            row.pair.0,
            row.pair.1
        );
        for v in &row.values {
            out.push(',');
            out.push_str(&format_float(*v));
        }
        out.push('\n');
    }
    out
}

pub fn provenance_json(result: &SweepResult) -> Result<Value> {
    serde_json::to_value(&result.provenance)
        .map_err(|e| Error::numerical("experiment", format!("provenance not serializable: {e}")))
}

pub fn to_json_string(result: &SweepResult) -> Result<String> {
    let rows: Vec<Value> = result
        .rows
        .iter()
        .map(|r| {
            let mut cells = vec![
                json!(r.b),
                json!(r.phi),
                json!(r.t),
                json!(r.init_id),
                json!(r.pair.0),
                json!(r.pair.1),
            ];
            cells.extend(r.values.iter().map(|v| json!(v)));
            Value::Array(cells)
        })
        .collect();
    let doc = json!({
        "provenance": provenance_json(result)?,
        "columns": header(result),
        "rows": rows,
    });
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::numerical("experiment", format!("result not serializable: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Path of the provenance sidecar written next to CSV output.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".provenance.json");
    PathBuf::from(name)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| Error::Io {
            path: parent.display().to_string(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes the result and returns every file produced.
pub fn write_result(
    result: &SweepResult,
    path: &Path,
    format: OutputFormat,
) -> Result<Vec<PathBuf>> {
    match format {
        OutputFormat::Csv => {
            write_file(path, &to_csv_string(result))?;
            let sidecar = sidecar_path(path);
            let mut prov = serde_json::to_string_pretty(&provenance_json(result)?)
                .map_err(|e| Error::numerical("experiment", e.to_string()))?;
            prov.push('\n');
            write_file(&sidecar, &prov)?;
            Ok(vec![path.to_path_buf(), sidecar])
        }
        OutputFormat::Json => {
            write_file(path, &to_json_string(result)?)?;
            Ok(vec![path.to_path_buf()])
        }
    }
}
