//! Report tables and the run manifest.

use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{Format, Resolved};
use crate::error::CliError;

/// Column-oriented report written as CSV or as a JSON array of records.
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Writes `<stem>.csv` or `<stem>.json` into `dir` and returns the file name.
    pub fn write(&self, dir: &Path, stem: &str, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => {
                let name = format!("{stem}.csv");
                let mut w = csv::Writer::from_path(dir.join(&name))?;
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(cell_text))?;
                }
                w.flush()?;
                Ok(name)
            }
            Format::Json => {
                let name = format!("{stem}.json");
                let records: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let map: Map<String, Value> =
                            self.columns.iter().map(|c| c.to_string()).zip(row.iter().cloned()).collect();
                        Value::Object(map)
                    })
                    .collect();
                write_json(dir, &name, &records)?;
                Ok(name)
            }
        }
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn write_json<T: Serialize + ?Sized>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(dir.join(name), text)?;
    Ok(())
}

/// Record of one run. Everything except `wall_time_seconds` is a function of
/// the resolved configuration.
#[derive(Serialize)]
pub struct Manifest<'a> {
    pub command: &'a str,
    pub config: &'a Resolved,
    pub versions: Versions,
    pub space: Option<Value>,
    pub grids: Map<String, Value>,
    pub tolerances: Map<String, Value>,
    pub outputs: Vec<String>,
    pub wall_time_seconds: f64,
}

#[derive(Serialize)]
pub struct Versions {
    pub rankone: &'static str,
    pub cli: &'static str,
}

impl Versions {
    pub fn current() -> Self {
        Versions { rankone: rankone::VERSION, cli: env!("CARGO_PKG_VERSION") }
    }
}
