//! Tables with a provenance header, rendered as CSV or JSON.

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub struct Provenance {
    pub command: &'static str,
    pub config_json: String,
    pub config_sha256: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(command: &'static str, config: &Config) -> Result<Self> {
        let config_json = serde_json::to_string(config).map_err(|e| CliError::Output(e.to_string()))?;
        let digest = Sha256::digest(config_json.as_bytes());
        Ok(Self {
            command,
            config_sha256: format!("{digest:x}"),
            config_json,
            seed: config.seed(),
        })
    }
}

pub fn render(table: &Table, prov: &Provenance, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => render_csv(table, prov),
        Format::Json => render_json(table, prov),
    }
}

fn render_csv(table: &Table, prov: &Provenance) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let header = format!(
        "# tool: sykmix {}\n# command: {}\n# config-sha256: {}\n# seed: {}\n# config: {}\n",
        env!("CARGO_PKG_VERSION"),
        prov.command,
        prov.config_sha256,
        prov.seed,
        prov.config_json
    );
    out.extend_from_slice(header.as_bytes());
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let err = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(&table.columns).map_err(err)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv)).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Output(e.to_string()))
}

fn render_json(table: &Table, prov: &Provenance) -> Result<Vec<u8>> {
    let config: Value = serde_json::from_str(&prov.config_json).map_err(|e| CliError::Output(e.to_string()))?;
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (c, v) in table.columns.iter().zip(row) {
                obj.insert((*c).to_owned(), serde_json::to_value(v).unwrap_or(Value::Null));
            }
            Value::Object(obj)
        })
        .collect();
    let doc = json!({
        "provenance": {
            "tool": "sykmix",
            "version": env!("CARGO_PKG_VERSION"),
            "command": prov.command,
            "config_sha256": prov.config_sha256,
            "seed": prov.seed,
        },
        "config": config,
        "columns": table.columns,
        "rows": rows,
    });
    let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Output(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}
