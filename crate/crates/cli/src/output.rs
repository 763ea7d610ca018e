//! Result tables and the files they are written to.
//!
//! Every run writes `results.csv`, `results.json` and `effective_config`
//! into the output directory. The CSV starts with `#` lines carrying the
//! schema version, command, seed and the SHA-256 of the effective config.
//! The JSON holds the same header fields and the same rows; non-finite
//! numbers are written as the strings `NaN`, `inf` and `-inf`.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: &str = "overlaynet-results/1";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
    Int(u64),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(x) => x.to_string(),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(x) => Value::String(x.to_string()),
            Cell::Int(n) => json!(n),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<u32> for Cell {
    fn from(n: u32) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        Cell::Num(x.unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Table {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }
}

pub struct Header<'a> {
    pub command: &'a str,
    pub seed: u64,
    pub effective_config: &'a str,
}

impl Header<'_> {
    pub fn config_hash(&self) -> String {
        hex::encode(Sha256::digest(self.effective_config.as_bytes()))
    }

    /// `#` lines carrying schema, command, seed and config hash; they
    /// open the CSV, the config snapshot and the run log.
    pub fn provenance(&self) -> String {
        format!(
            "# schema = {SCHEMA_VERSION}\n# command = {}\n# seed = {}\n# config_sha256 = {}\n",
            self.command,
            self.seed,
            self.config_hash()
        )
    }
}

/// Writes the config snapshot. The hash covers the text after the
/// provenance lines, so the snapshot parses back to the same hash.
pub fn write_effective_config(dir: &Path, header: &Header) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("effective_config"), format!("{}{}", header.provenance(), header.effective_config))
}

pub fn write_results(dir: &Path, header: &Header, table: &Table, summary: Option<Value>) -> std::io::Result<()> {
    write_effective_config(dir, header)?;
    let hash = header.config_hash();
    let mut file = fs::File::create(dir.join("results.csv"))?;
    file.write_all(header.provenance().as_bytes())?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv))?;
    }
    w.flush()?;

    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            let mut m = Map::new();
            for (c, v) in table.columns.iter().zip(r) {
                m.insert((*c).into(), v.json());
            }
            Value::Object(m)
        })
        .collect();
    let mut doc = json!({
        "schema": SCHEMA_VERSION,
        "command": header.command,
        "seed": header.seed,
        "config_sha256": hash,
        "columns": table.columns,
        "rows": rows,
    });
    if let Some(s) = summary {
        doc["summary"] = s;
    }
    let mut text = serde_json::to_string_pretty(&doc).map_err(std::io::Error::other)?;
    text.push('\n');
    fs::write(dir.join("results.json"), text)
}
