//! Report envelope and JSON/CSV rendering.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Format;
use crate::error::{CliError, CliResult};

#[derive(Debug, Serialize)]
pub struct Envelope<'a> {
    pub tool_version: &'static str,
    pub seed: Option<u64>,
    pub argv: &'a [String],
    pub command: &'static str,
    pub result: Value,
}

/// What a command hands back: the result document, the part of it rendered
/// as CSV rows, and the exit status.
pub struct Report {
    pub command: &'static str,
    pub seed: Option<u64>,
    pub result: Value,
    /// Pointer into `result` for the CSV table; empty for the whole result.
    pub csv_rows: &'static str,
    pub exit: u8,
}

pub fn to_value<T: Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|source| CliError::Json { context: "serializing report".into(), source })
}

pub fn render(report: &Report, argv: &[String], format: Format) -> CliResult<Vec<u8>> {
    match format {
        Format::Json => {
            let env = Envelope {
                tool_version: env!("CARGO_PKG_VERSION"),
                seed: report.seed,
                argv,
                command: report.command,
                result: report.result.clone(),
            };
            let mut out = serde_json::to_vec_pretty(&env)
                .map_err(|source| CliError::Json { context: "serializing report".into(), source })?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let table = report.result.pointer(report.csv_rows).unwrap_or(&report.result);
            csv_table(table)
        }
    }
}

pub fn emit(bytes: &[u8], out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source }),
        None => std::io::stdout().write_all(bytes).map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

/// One row per array element (or a single row for an object). Nested
/// objects become dotted columns; nested arrays are left out.
fn csv_table(table: &Value) -> CliResult<Vec<u8>> {
    let rows: Vec<Vec<(String, String)>> = match table {
        Value::Array(items) => items.iter().map(flatten).collect(),
        other => vec![flatten(other)],
    };
    let mut header: Vec<String> = Vec::new();
    for row in &rows {
        for (k, _) in row {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for row in &rows {
        w.write_record(header.iter().map(|h| row.iter().find(|(k, _)| k == h).map_or("", |(_, v)| v.as_str())))?;
    }
    w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))
}

fn flatten(v: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    match v {
        Value::Object(map) => flatten_into("", map, &mut out),
        other => out.push(("value".into(), scalar(other))),
    }
    out
}

fn flatten_into(prefix: &str, map: &Map<String, Value>, out: &mut Vec<(String, String)>) {
    for (k, v) in map {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(inner) => flatten_into(&key, inner, out),
            Value::Array(_) => {}
            other => out.push((key, scalar(other))),
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
