//! Columnar text output shared by every exported table.
//!
//! Numbers are written with 17 significant digits in scientific notation,
//! fields are separated by single spaces or commas, and lines end with LF.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// 17 significant digits, round-trip exact for f64.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// In-memory table rendered to text in one go.
#[derive(Debug, Clone)]
pub struct Table {
    header: Vec<String>,
    sep: char,
    body: String,
    rows: usize,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S], sep: char) -> Self {
        Self {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            sep,
            body: String::new(),
            rows: 0,
        }
    }

    pub fn columns(&self) -> usize {
        self.header.len()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Appends a numeric row.
    pub fn push(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.header.len());
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                self.body.push(self.sep);
            }
            self.body.push_str(&fmt17(*v));
        }
        self.body.push('\n');
        self.rows += 1;
    }

    /// Appends a row of preformatted cells.
    pub fn push_cells<S: AsRef<str>>(&mut self, row: &[S]) {
        debug_assert_eq!(row.len(), self.header.len());
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                self.body.push(self.sep);
            }
            self.body.push_str(v.as_ref());
        }
        self.body.push('\n');
        self.rows += 1;
    }

    pub fn render(&self) -> String {
        let mut out = String::with_capacity(self.body.len() + 64);
        let sep = self.sep.to_string();
        let _ = writeln!(out, "{}", self.header.join(&sep));
        out.push_str(&self.body);
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.render())
            .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
    }
}

/// Parses a whitespace- or comma-separated numeric table with one header line.
pub fn read_numeric(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Io("empty table".into()))?
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect::<Vec<_>>();
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| Error::Io(format!("row {}: cannot parse `{s}`: {e}", n + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != header.len() {
            return Err(Error::Io(format!(
                "row {} has {} fields, header has {}",
                n + 1,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok((header, rows))
}
