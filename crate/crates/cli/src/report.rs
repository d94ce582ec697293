//! Report tables and their CSV and JSON renderings.
//!
//! Both renderings are pure functions of the report, which holds no
//! timestamps or host details, so identical runs give identical bytes.

use respat::Convention;
use serde::{Serialize, Serializer};

use crate::config::ConfigDocument;
use crate::error::CliError;

/// Version of the column layout. Bumped whenever columns change.
pub const REPORT_SCHEMA: &str = "1";
pub const TOOLKIT: &str = concat!("respat ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Structured,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Num)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(n) => Some(*n as f64),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(x) => x.to_string(),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Num(x) if x.is_finite() => s.serialize_f64(*x),
            // JSON has no inf or NaN
            Cell::Num(x) => s.serialize_str(&x.to_string()),
            Cell::Int(n) => s.serialize_u64(*n),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Empty => s.serialize_none(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub toolkit: &'static str,
    pub report_schema: &'static str,
    pub command: String,
    pub convention: Convention,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    pub config: ConfigDocument,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub diagnostics: Vec<String>,
}

impl ReportDocument {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Cells of column `name`, top to bottom.
    pub fn column_values(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.column(name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    /// `#` provenance lines, one header row, then data rows.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = String::new();
        out.push_str(&format!("# {TOOLKIT} report_schema={REPORT_SCHEMA}\n"));
        out.push_str(&format!("# command: {}\n", self.command));
        out.push_str(&format!("# convention: {}\n", self.convention));
        if let Some(seed) = self.master_seed {
            out.push_str(&format!("# master_seed: {seed}\n"));
        }
        if let Some(n) = self.trials {
            out.push_str(&format!("# trials: {n}\n"));
        }
        let config = serde_json::to_string(&self.config).map_err(|e| CliError::Runtime(e.to_string()))?;
        out.push_str(&format!("# config: {config}\n"));
        for d in &self.diagnostics {
            out.push_str(&format!("# diagnostic: {}\n", d.replace('\n', " ")));
        }

        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(csv_err)?;
        }
        let body = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
        out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Runtime(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Structured => self.to_json(),
        }
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Runtime(e.to_string())
}
