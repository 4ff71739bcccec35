//! Row-oriented result tables and their CSV/JSON serialization.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Real(f64),
    Text(String),
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x as i64)
    }
}

impl From<u32> for Value {
    fn from(x: u32) -> Self {
        Value::Int(i64::from(x))
    }
}

impl From<i32> for Value {
    fn from(x: i32) -> Self {
        Value::Int(i64::from(x))
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_owned())
    }
}

impl Value {
    fn write_csv(&self, out: &mut String) {
        match self {
            // Debug formatting of f64 is the shortest string that parses back
            // to the same value.
            Value::Real(x) => write!(out, "{x:?}").unwrap(),
            Value::Int(i) => write!(out, "{i}").unwrap(),
            Value::Text(s) if s.contains([',', '"', '\n']) => {
                write!(out, "\"{}\"", s.replace('"', "\"\"")).unwrap()
            }
            Value::Text(s) => out.push_str(s),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Real(x) => Some(*x),
            Value::Int(i) => Some(*i as f64),
            Value::Text(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidArgument(format!(
                "unknown output format {other:?} (expected csv or json)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                expected: self.columns.len(),
                got: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a named column, in row order.
    pub fn column_f64(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.column_index(name)?;
        self.rows.iter().map(|r| r[idx].as_f64()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                v.write_csv(&mut out);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("tables always serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Writes a nonempty table; nothing is created for an empty one.
pub fn write_table(table: &Table, path: &Path, format: Format) -> Result<()> {
    if table.is_empty() {
        return Err(Error::EmptyInput);
    }
    std::fs::write(path, table.render(format))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["replicate", "x", "label"]);
        t.push(vec![0u64.into(), 0.1.into(), "a,b".into()]).unwrap();
        t.push(vec![1u64.into(), 1e-300.into(), "c".into()])
            .unwrap();
        assert_eq!(t.to_csv(), "replicate,x,label\n0,0.1,\"a,b\"\n1,1e-300,c\n");
        assert!(t.push(vec![1u64.into()]).is_err());
    }

    #[test]
    fn reals_round_trip() {
        let mut t = Table::new(["x"]);
        let xs = [1.0 / 3.0, 2.0f64.sqrt() * 1e17, 5e-324, 123456.0];
        for &x in &xs {
            t.push(vec![x.into()]).unwrap();
        }
        let csv = t.to_csv();
        let parsed: Vec<f64> = csv.lines().skip(1).map(|l| l.parse().unwrap()).collect();
        assert_eq!(parsed, xs);
    }

    #[test]
    fn empty_table_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let t = Table::new(["a"]);
        assert_eq!(write_table(&t, &path, Format::Csv), Err(Error::EmptyInput));
        assert!(!path.exists());
    }

    #[test]
    fn one_row_table() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut t = Table::new(["a", "b"]);
        t.push(vec![1u64.into(), 2.5.into()]).unwrap();
        write_table(&t, &path, Format::Csv).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "a,b\n1,2.5\n");
        let json_path = dir.path().join("t.json");
        write_table(&t, &json_path, Format::Json).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(json_path).unwrap()).unwrap();
        assert_eq!(v["columns"][1], "b");
        assert_eq!(v["rows"][0][1], 2.5);
    }
}
