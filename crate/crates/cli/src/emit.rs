//! CSV and JSON rendering of sweep results.
//!
//! Values are rounded to the configured number of significant digits before
//! printing, so the bytes depend only on the configuration and version.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::sweep::{Metadata, Row, SweepResult};

/// Rounds to `digits` significant digits.
pub fn round_sig(v: f64, digits: usize) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", digits.saturating_sub(1), v)
        .parse()
        .unwrap_or(v)
}

fn number(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    let r = round_sig(v, digits);
    let a = r.abs();
    if r == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) || s.starts_with(' ') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn to_csv(r: &SweepResult, digits: usize) -> String {
    let mut s = String::new();
    let m = &r.metadata;
    let _ = writeln!(s, "# pshe {} {}", m.version, m.command);
    let _ = writeln!(s, "# config_sha256 {}", m.config_sha256);
    for u in &r.units {
        let _ = writeln!(s, "# {u}");
    }
    let mut header = r.columns.clone();
    header.push("error".into());
    let _ = writeln!(s, "{}", header.join(", "));
    for row in &r.rows {
        let mut cells: Vec<String> = row.values.iter().map(|&v| number(v, digits)).collect();
        cells.push(row.error.as_deref().map(quote).unwrap_or_default());
        let _ = writeln!(s, "{}", cells.join(", "));
    }
    s
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    values: Vec<Option<f64>>,
    error: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct JsonResult {
    metadata: Metadata,
    units: Vec<String>,
    columns: Vec<String>,
    rows: Vec<JsonRow>,
}

pub fn to_json(r: &SweepResult, digits: usize) -> String {
    let doc = JsonResult {
        metadata: r.metadata.clone(),
        units: r.units.clone(),
        columns: r.columns.clone(),
        rows: r
            .rows
            .iter()
            .map(|row| JsonRow {
                values: row
                    .values
                    .iter()
                    .map(|&v| v.is_finite().then(|| round_sig(v, digits)))
                    .collect(),
                error: row.error.clone(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("result serializes");
    s.push('\n');
    s
}

/// Reads a document written by [`to_json`]; null values become NaN.
pub fn from_json(text: &str) -> serde_json::Result<SweepResult> {
    let doc: JsonResult = serde_json::from_str(text)?;
    Ok(SweepResult {
        metadata: doc.metadata,
        units: doc.units,
        columns: doc.columns,
        rows: doc
            .rows
            .into_iter()
            .map(|r| Row {
                values: r
                    .values
                    .into_iter()
                    .map(|v| v.unwrap_or(f64::NAN))
                    .collect(),
                error: r.error,
            })
            .collect(),
    })
}

pub fn render(r: &SweepResult, format: Format, digits: usize) -> String {
    match format {
        Format::Csv => to_csv(r, digits),
        Format::Json => to_json(r, digits),
    }
}

/// Writes to `path`, or to stdout when `path` is None.
pub fn emit(r: &SweepResult, format: Format, digits: usize, path: Option<&Path>) -> io::Result<()> {
    let text = render(r, format, digits);
    match path {
        Some(p) => std::fs::write(p, text),
        None => io::Write::write_all(&mut io::stdout().lock(), text.as_bytes()),
    }
}
