//! CSV tables with a `#` metadata block.

use std::fmt::Write as _;

/// Bumped whenever a column set changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Table {
            meta: Vec::new(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.meta.push((key.into(), value.into()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn render(&self, precision: usize) -> String {
        let mut out = String::new();
        writeln!(out, "# schema_version: {SCHEMA_VERSION}").unwrap();
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {v}").unwrap();
        }
        writeln!(out, "{}", self.header.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| format_cell(c, precision)).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }
}

/// `precision` significant digits in scientific notation.
pub fn format_number(x: f64, precision: usize) -> String {
    if x.is_finite() {
        format!("{:.*e}", precision.saturating_sub(1), x)
    } else {
        x.to_string()
    }
}

fn format_cell(c: &Cell, precision: usize) -> String {
    match c {
        Cell::Num(x) => format_number(*x, precision),
        Cell::Int(n) => n.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Empty => String::new(),
    }
}
