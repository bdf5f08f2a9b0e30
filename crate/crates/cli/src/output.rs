use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use padic_dyn::analysis::SCHEMA_VERSION;

use crate::config::{ExperimentConfig, Format};
use crate::error::{CliError, ExitStatus};

/// What a command produced: the authoritative JSON report, optional per-sample
/// rows for CSV, and the exit status it implies.
pub struct Report {
    pub command: String,
    pub status: ExitStatus,
    pub body: Value,
    pub rows: Vec<BTreeMap<String, String>>,
}

impl Report {
    pub fn new(command: &str, status: ExitStatus, body: impl Serialize) -> Result<Self, CliError> {
        Ok(Report { command: command.to_string(), status, body: serde_json::to_value(body)?, rows: Vec::new() })
    }

    pub fn with_rows(mut self, rows: Vec<BTreeMap<String, String>>) -> Self {
        self.rows = rows;
        self
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut BTreeMap<String, String>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        Value::String(s) => {
            out.insert(prefix.to_string(), s.clone());
        }
        Value::Null => {
            out.insert(prefix.to_string(), String::new());
        }
        other => {
            out.insert(prefix.to_string(), other.to_string());
        }
    }
}

pub fn emit(config: &ExperimentConfig, report: &Report) -> Result<(), CliError> {
    let mut sink: Box<dyn Write> = match &config.output {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    match config.format {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": report.command,
                "status": report.status.label(),
                "config": config,
                "report": report.body,
            });
            serde_json::to_writer_pretty(&mut sink, &doc)?;
            writeln!(sink)?;
        }
        Format::Csv => {
            let rows = if report.rows.is_empty() {
                let mut row = BTreeMap::new();
                flatten("", &report.body, &mut row);
                vec![row]
            } else {
                report.rows.clone()
            };
            let mut header: Vec<String> = Vec::new();
            for row in &rows {
                for k in row.keys() {
                    if !header.contains(k) {
                        header.push(k.clone());
                    }
                }
            }
            let mut w = csv::Writer::from_writer(sink);
            w.write_record(&header)?;
            for row in &rows {
                w.write_record(header.iter().map(|k| row.get(k).map(String::as_str).unwrap_or("")))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// A CSV row from `(column, value)` pairs.
pub fn row<const N: usize>(cells: [(&str, String); N]) -> BTreeMap<String, String> {
    cells.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
