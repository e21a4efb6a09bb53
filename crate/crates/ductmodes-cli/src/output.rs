//! Serialization: JSON with 17-significant-digit floats (lossless
//! round-trip) and CSV with unit-annotated headers.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

/// serde_json formatter that writes every f64 with 17 significant digits.
pub struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{}", format_float(value))
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{}", format_float(value as f64))
    }
}

/// 17 significant digits, scientific notation.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        return "null".into();
    }
    format!("{v:.16e}")
}

/// Serialize a value as pretty JSON with the 17-digit float convention.
pub fn to_json_string<T: Serialize>(value: &T) -> io::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    let mut s = String::from_utf8(out).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    s.push('\n');
    Ok(s)
}

/// Complex value as a {"re": ..., "im": ...} JSON object.
pub fn complex_json(z: Complex64) -> Value {
    serde_json::json!({ "re": z.re, "im": z.im })
}

/// One CSV table: a header row (with units) and float/string cells.
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&self.header.join(","));
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

pub fn cell(v: f64) -> String {
    format_float(v)
}

pub fn cell_int(v: usize) -> String {
    v.to_string()
}
