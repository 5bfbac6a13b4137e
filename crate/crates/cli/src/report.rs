use std::io::{self, Write};

use ginibre_core::logprob::UNDERFLOW_LOG;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::params::Params;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Str(String),
    Null,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Null, Cell::Num)
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

impl From<Option<usize>> for Cell {
    fn from(v: Option<usize>) -> Self {
        v.map_or(Cell::Null, |x| Cell::Int(x as u64))
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Str(v.to_owned())
    }
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => Value::from(*v),
            // JSON has no infinities; spell them out.
            Cell::Num(v) if v.is_nan() => Value::from("nan"),
            Cell::Num(v) => Value::from(if *v > 0.0 { "inf" } else { "-inf" }),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(b) => Value::from(*b),
            Cell::Str(s) => Value::from(s.as_str()),
            Cell::Null => Value::Null,
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Cell::Num(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Num(v) if v.is_nan() => "nan".into(),
            Cell::Num(v) => (if *v > 0.0 { "inf" } else { "-inf" }).into(),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Str(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }
}

/// One output row: ordered `(column, value)` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row(pub Vec<(String, Cell)>);

impl Row {
    pub fn push(&mut self, key: &str, value: impl Into<Cell>) -> &mut Self {
        self.0.push((key.to_owned(), value.into()));
        self
    }

    /// `{key}_log`, `{key}` (0 below the underflow threshold) and
    /// `{key}_underflow`.
    pub fn prob(&mut self, key: &str, log_value: f64) -> &mut Self {
        let under = log_value < UNDERFLOW_LOG;
        self.push(&format!("{key}_log"), log_value);
        self.push(key, if under { 0.0 } else { log_value.exp() });
        self.push(&format!("{key}_underflow"), under)
    }

    fn to_json(&self) -> Value {
        Value::Object(self.0.iter().map(|(k, v)| (k.clone(), v.to_json())).collect::<Map<_, _>>())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorEntry {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<f64>,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub est_error: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub params: Params,
    pub rows: Vec<Row>,
    pub errors: Vec<ErrorEntry>,
}

impl Report {
    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("command".into(), Value::from(self.command.as_str()));
        obj.insert("params".into(), serde_json::to_value(&self.params).expect("params serialize"));
        obj.insert("results".into(), Value::Array(self.rows.iter().map(Row::to_json).collect()));
        obj.insert("errors".into(), serde_json::to_value(&self.errors).expect("errors serialize"));
        obj.insert("seed".into(), self.params.seed.map_or(Value::Null, Value::from));
        obj.insert("version".into(), Value::from(ginibre_core::VERSION));
        Value::Object(obj)
    }

    pub fn write_json(&self, out: &mut impl Write) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut *out, &self.to_json())?;
        writeln!(out)
    }

    /// Header from the first row, then one line per row. Errors go to stderr.
    pub fn write_csv(&self, out: &mut impl Write) -> io::Result<()> {
        if let Some(first) = self.rows.first() {
            let header: Vec<&str> = first.0.iter().map(|(k, _)| k.as_str()).collect();
            writeln!(out, "{}", header.join(","))?;
        }
        for row in &self.rows {
            let cells: Vec<String> = row.0.iter().map(|(_, v)| v.to_csv()).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_numbers_carry_17_digits() {
        assert_eq!(Cell::Num(0.1).to_csv(), "1.0000000000000001e-1");
        assert_eq!(Cell::Num(f64::NEG_INFINITY).to_csv(), "-inf");
        assert_eq!(Cell::Null.to_csv(), "");
    }

    #[test]
    fn underflow_flag() {
        let mut r = Row::default();
        r.prob("p", -800.0);
        assert_eq!(r.0[1].1, Cell::Num(0.0));
        assert_eq!(r.0[2].1, Cell::Bool(true));
    }
}
