//! Columnar figure data with CSV and JSON encodings.
//!
//! CSV layout:
//!
//! ```text
//! # figure: fig3
//! # meta.code_version: 0.1.0
//! # column: tau [atomic] arrival time
//! tau[atomic],right[atomic]
//! 0,1.25e-9
//! ```
//!
//! Numbers are written in shortest round-trip form, so parsing an emitted
//! bundle reproduces it exactly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
    pub description: String,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: &str, description: impl Into<String>) -> Self {
        Self { name: name.into(), unit: unit.to_string(), description: description.into() }
    }

    pub fn header(&self) -> String {
        format!("{}[{}]", self.name, self.unit)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureBundle {
    pub id: String,
    pub columns: Vec<Column>,
    pub metadata: BTreeMap<String, String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("missing figure id")]
    MissingId,
    #[error("json: {0}")]
    Json(String),
}

fn malformed(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Malformed { line: line + 1, message: message.into() }
}

fn number(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl FigureBundle {
    pub fn new(id: &str, columns: Vec<Column>) -> Self {
        Self { id: id.to_string(), columns, metadata: BTreeMap::new(), rows: Vec::new() }
    }

    /// Build from equal-length columns of values.
    pub fn from_columns(id: &str, columns: Vec<(Column, Vec<f64>)>) -> Self {
        let n = columns.first().map_or(0, |(_, v)| v.len());
        assert!(columns.iter().all(|(_, v)| v.len() == n), "ragged columns in {id}");
        let rows = (0..n).map(|i| columns.iter().map(|(_, v)| v[i]).collect()).collect();
        Self { id: id.to_string(), columns: columns.into_iter().map(|(c, _)| c).collect(), metadata: BTreeMap::new(), rows }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        let value = value.to_string();
        assert!(!value.contains('\n') && !key.contains(':'), "metadata {key} must be a single line");
        self.metadata.insert(key.to_string(), value);
        self
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("# figure: {}\n", self.id);
        for (k, v) in &self.metadata {
            s += &format!("# meta.{k}: {v}\n");
        }
        for c in &self.columns {
            s += &format!("# column: {} [{}] {}\n", c.name, c.unit, c.description);
        }
        s += &self.columns.iter().map(Column::header).collect::<Vec<_>>().join(",");
        s.push('\n');
        for row in &self.rows {
            s += &row.iter().map(|x| number(*x)).collect::<Vec<_>>().join(",");
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self, ParseError> {
        let mut id = None;
        let mut metadata = BTreeMap::new();
        let mut columns = Vec::new();
        let mut header_seen = false;
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if let Some(rest) = line.strip_prefix("# ") {
                if let Some(v) = rest.strip_prefix("figure: ") {
                    id = Some(v.to_string());
                } else if let Some(kv) = rest.strip_prefix("meta.") {
                    let (k, v) = kv.split_once(": ").ok_or_else(|| malformed(i, "metadata without value"))?;
                    metadata.insert(k.to_string(), v.to_string());
                } else if let Some(c) = rest.strip_prefix("column: ") {
                    let (name, rest) = c.split_once(" [").ok_or_else(|| malformed(i, "column without unit"))?;
                    let (unit, desc) = rest.split_once("] ").ok_or_else(|| malformed(i, "unterminated unit"))?;
                    columns.push(Column::new(name, unit, desc));
                } else {
                    return Err(malformed(i, "unknown comment"));
                }
            } else if !header_seen {
                let expected: Vec<String> = columns.iter().map(Column::header).collect();
                let got: Vec<&str> = line.split(',').collect();
                if got != expected {
                    return Err(malformed(i, format!("header {got:?} does not match columns {expected:?}")));
                }
                header_seen = true;
            } else {
                let row = line
                    .split(',')
                    .map(|v| v.parse::<f64>().map_err(|e| malformed(i, format!("{v}: {e}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                if row.len() != columns.len() {
                    return Err(malformed(i, format!("{} values for {} columns", row.len(), columns.len())));
                }
                rows.push(row);
            }
        }
        Ok(Self { id: id.ok_or(ParseError::MissingId)?, columns, metadata, rows })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))
    }
}
