//! Tables with a parameter header, written as CSV or JSON.

use serde::Serialize;
use serde_json::{json, Map, Value};

/// Scientific notation with 12 digits after the point.
pub fn format_float(x: f64) -> String {
    format!("{x:.12e}")
}

/// `x` rounded to the precision written by [`format_float`], `None` for
/// non-finite values.
pub fn rounded(x: f64) -> Option<f64> {
    if x.is_finite() {
        format_float(x).parse().ok()
    } else {
        None
    }
}

/// A float as JSON, rounded like the CSV output; non-finite values become null.
pub fn json_float(x: f64) -> Value {
    rounded(x).map(Value::from).unwrap_or(Value::Null)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) => json_float(*x),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<i32> for Cell {
    fn from(i: i32) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Parameter header in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Header(pub Vec<(String, String)>);

impl Header {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        debug_assert!(self.0.iter().all(|(k, _)| k != key), "duplicate header key {key}");
        self.0.push((key.to_string(), value.to_string()));
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (k, v) in &self.0 {
            map.insert(k.clone(), Value::from(v.as_str()));
        }
        Value::Object(map)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Header,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Header, columns: &[&str]) -> Self {
        Self { header, columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header.0 {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Value> =
            self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        json!({
            "parameters": self.header.to_json(),
            "columns": self.columns,
            "rows": rows,
        })
    }

    pub fn to_json(&self) -> String {
        pretty(&self.to_json_value())
    }
}

pub fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}
