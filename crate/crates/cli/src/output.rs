//! Deterministic CSV and JSON emission.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::args::Format;
use crate::error::CliError;

pub const DEFAULT_DIGITS: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Self::Int(x as i64)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Self::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Self::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Self::Text(x.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, headers: &[&'static str]) -> Self {
        Self {
            name,
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// Everything a subcommand produces.
#[derive(Debug, Clone, Default)]
pub struct Report {
    /// The first table is the primary CSV output.
    pub tables: Vec<Table>,
    /// Extra top-level JSON fields.
    pub meta: Map<String, Value>,
    /// Secondary tables written to their own CSV file: (table index, path).
    pub side_files: Vec<(usize, PathBuf)>,
    /// Set when a requested check ran and failed; output is still written.
    pub failure: Option<String>,
}

/// `x` to `digits` significant digits, plain decimal notation for moderate
/// magnitudes and exponent notation otherwise, trailing zeros removed.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // Exponent notation rounds to significant digits, including carries.
    let s = format!("{:.*e}", digits.max(1) - 1, x);
    let (mantissa, exponent) = s.split_once('e').expect("exponent notation");
    let exp: i32 = exponent.parse().expect("integer exponent");
    if !(-5..15).contains(&exp) {
        return format!("{}e{exponent}", trim_fraction(mantissa.to_string()));
    }
    let sign = if x < 0.0 { "-" } else { "" };
    let figures: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let plain = if exp >= 0 {
        let int_len = exp as usize + 1;
        let padded = format!("{figures:0<int_len$}");
        let (int, frac) = padded.split_at(int_len);
        format!("{sign}{int}.{frac}")
    } else {
        format!("{sign}0.{}{figures}", "0".repeat((-exp - 1) as usize))
    };
    trim_fraction(plain)
}

fn trim_fraction(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" { "0".into() } else { t.into() }
}

fn cell_text(cell: &Cell, digits: usize) -> String {
    match cell {
        Cell::Int(i) => i.to_string(),
        Cell::Num(x) => format_sig(*x, digits),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => if *b { "PASS" } else { "FAIL" }.into(),
    }
}

/// A number rounded as in CSV output, `null` when not finite.
pub fn json_number(x: f64, digits: usize) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format_sig(x, digits).parse().expect("formatted number parses");
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

fn cell_json(cell: &Cell, digits: usize) -> Value {
    match cell {
        Cell::Int(i) => Value::from(*i),
        Cell::Num(x) => json_number(*x, digits),
        Cell::Text(s) => Value::from(s.clone()),
        Cell::Bool(b) => Value::from(*b),
    }
}

pub fn csv_bytes(table: &Table, digits: usize) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(&table.headers).map_err(io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|c| cell_text(c, digits))).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

pub fn json_bytes(report: &Report, digits: usize) -> Result<Vec<u8>, CliError> {
    let mut doc = report.meta.clone();
    for table in &report.tables {
        let rows = table
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = table
                    .headers
                    .iter()
                    .zip(row)
                    .map(|(h, c)| (h.to_string(), cell_json(c, digits)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        doc.insert(table.name.to_string(), Value::Array(rows));
    }
    let mut bytes = serde_json::to_vec_pretty(&Value::Object(doc)).map_err(|e| CliError::Io(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn write_to(path: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => File::create(p)
            .and_then(|mut f| f.write_all(bytes))
            .map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => out.write_all(bytes).map_err(|e| CliError::Io(e.to_string())),
    }
}

pub fn emit(
    report: &Report,
    format: Format,
    digits: usize,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    match format {
        Format::Json => write_to(path, &json_bytes(report, digits)?, out),
        Format::Csv => {
            if let Some(primary) = report.tables.first() {
                write_to(path, &csv_bytes(primary, digits)?, out)?;
            }
            for (index, side) in &report.side_files {
                write_to(Some(side), &csv_bytes(&report.tables[*index], digits)?, out)?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(1.562_411_234_567, 9), "1.56241123");
        assert_eq!(format_sig(-0.015_48, 9), "-0.01548");
        assert_eq!(format_sig(31.415_926_535_897_93, 6), "31.4159");
        assert_eq!(format_sig(1.0, 9), "1");
        assert_eq!(format_sig(0.0, 9), "0");
        assert_eq!(format_sig(1234.5, 2), "1200");
        assert_eq!(format_sig(9.9999999996, 9), "10");
        assert_eq!(format_sig(0.000123456, 3), "0.000123");
        assert_eq!(format_sig(-2.0, 9), "-2");
        assert_eq!(format_sig(2.5e-9, 3), "2.5e-9");
        assert_eq!(format_sig(-1e20, 9), "-1e20");
        assert_eq!(format_sig(-1e-30, 3), "-1e-30");
        assert_eq!(format_sig(f64::NAN, 9), "NaN");
    }

    #[test]
    fn header_only_csv() {
        let t = Table::new("rows", &["a", "b"]);
        assert_eq!(csv_bytes(&t, 9).unwrap(), b"a,b\n");
    }

    #[test]
    fn json_keys_are_sorted() {
        let mut t = Table::new("rows", &["z", "a"]);
        t.push(vec![Cell::from(1.0), Cell::from(2usize)]);
        let mut r = Report::default();
        r.meta.insert("version".into(), Value::from(1));
        r.tables.push(t);
        let s = String::from_utf8(json_bytes(&r, 9).unwrap()).unwrap();
        assert!(s.find("\"a\"").unwrap() < s.find("\"z\"").unwrap());
        assert!(s.find("\"rows\"").unwrap() < s.find("\"version\"").unwrap());
    }

    #[test]
    fn json_numbers_are_rounded() {
        assert_eq!(json_number(1.234_567_891_23, 4), Value::from(1.235));
        assert_eq!(json_number(f64::INFINITY, 4), Value::Null);
    }
}
