//! Deterministic text output: CSV with round-trippable floats and pretty JSON.

use serde::Serialize;

use crate::error::{Error, Result};

/// 17 significant digits, enough to round-trip any binary64 value.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Column-ordered table rendered as CSV with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// One CSV cell.
pub enum Cell<'a> {
    F(f64),
    I(i64),
    U(usize),
    S(&'a str),
    B(bool),
}

impl Cell<'_> {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => fmt_float(*x),
            Cell::I(i) => i.to_string(),
            Cell::U(u) => u.to_string(),
            Cell::S(s) => s.to_string(),
            Cell::B(b) => b.to_string(),
        }
    }
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, cells: &[Cell<'_>]) {
        assert_eq!(cells.len(), self.header.len(), "row width must match the header");
        self.rows.push(cells.iter().map(Cell::render).collect());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Config(format!("JSON encoding: {e}")))?;
    s.push('\n');
    Ok(s)
}
