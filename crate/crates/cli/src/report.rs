//! Schema-versioned reports with byte-stable JSON and CSV output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use degenlab_core::grid::fmt_sig;
use degenlab_core::sharpness::{Curve, SharpnessVerdict};

use crate::error::CliError;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => fmt_sig(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// A CSV file: `name.csv` with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn from_curve(prefix: &str, curve: &Curve) -> Self {
        Self {
            name: format!("{prefix}_{}", curve.name),
            columns: curve.columns.clone(),
            rows: curve.rows.iter().map(|r| r.iter().map(|v| Cell::Num(*v)).collect()).collect(),
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| CliError::Io(e.to_string()))?;
        for row in &self.rows {
            if row.len() != self.columns.len() {
                return Err(CliError::Schema(format!(
                    "{}: row width {} != {}",
                    self.name,
                    row.len(),
                    self.columns.len()
                )));
            }
            if row.iter().any(|c| matches!(c, Cell::Num(v) if !v.is_finite())) {
                return Err(CliError::Schema(format!("{}: non-finite value", self.name)));
            }
            w.write_record(row.iter().map(Cell::render)).map_err(|e| CliError::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub version: String,
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub rows: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u64,
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub metrics: BTreeMap<String, f64>,
    pub verdicts: Vec<SharpnessVerdict>,
    pub pass: bool,
    pub provenance: Provenance,
    pub files: Vec<FileEntry>,
}

impl Report {
    /// JSON with sorted keys, two-space indentation and floats at 12 significant digits.
    pub fn to_json(&self) -> Result<String, CliError> {
        let value = serde_json::to_value(self).map_err(|e| CliError::Schema(e.to_string()))?;
        let mut out = String::new();
        write_value(&value, 0, "", &mut out)?;
        out.push('\n');
        Ok(out)
    }
}

fn write_value(v: &Value, indent: usize, path: &str, out: &mut String) -> Result<(), CliError> {
    let pad = "  ".repeat(indent + 1);
    let close = "  ".repeat(indent);
    match v {
        // Non-finite floats serialize as null.
        Value::Null => return Err(CliError::Schema(format!("non-finite number at `{path}`"))),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else {
                out.push_str(&fmt_sig(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).map_err(|e| CliError::Schema(e.to_string()))?),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return Ok(());
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad);
                write_value(item, indent + 1, &format!("{path}[{k}]"), out)?;
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&close);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return Ok(());
            }
            out.push_str("{\n");
            let n = map.len();
            for (k, (key, item)) in map.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&serde_json::to_string(key).map_err(|e| CliError::Schema(e.to_string()))?);
                out.push_str(": ");
                write_value(item, indent + 1, &format!("{path}.{key}"), out)?;
                out.push_str(if k + 1 < n { ",\n" } else { "\n" });
            }
            out.push_str(&close);
            out.push('}');
        }
    }
    Ok(())
}

/// Writes every table and then `report.json` into `dir`.
pub fn emit(report: &mut Report, tables: &[Table], dir: &Path) -> Result<(), CliError> {
    let rendered: Vec<(String, String)> =
        tables.iter().map(|t| Ok((t.file_name(), t.to_csv()?))).collect::<Result<_, CliError>>()?;
    report.files = tables.iter().map(|t| FileEntry { name: t.file_name(), rows: t.rows.len() as u64 }).collect();
    let json = report.to_json()?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    for (name, body) in rendered {
        std::fs::write(dir.join(&name), body).map_err(|e| CliError::Io(format!("{name}: {e}")))?;
    }
    std::fs::write(dir.join("report.json"), json).map_err(|e| CliError::Io(format!("report.json: {e}")))?;
    Ok(())
}
