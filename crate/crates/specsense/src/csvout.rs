//! CSV emission with fixed column order and 6-significant-digit floats.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::Result;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    UInt(u64),
    Float(f64),
    Text(String),
    /// Rendered as an empty field.
    Missing,
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::UInt(v as u64)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

/// Decimal form with six significant digits; values far from unit scale
/// fall back to scientific notation with the same precision.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..15).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}

fn render(value: &Value) -> String {
    match value {
        Value::Int(v) => v.to_string(),
        Value::UInt(v) => v.to_string(),
        Value::Float(v) if v.is_nan() => String::new(),
        Value::Float(v) => fmt_sig(*v),
        Value::Missing => String::new(),
        Value::Text(v) => {
            if v.contains([',', '"', '\n']) {
                format!("\"{}\"", v.replace('"', "\"\""))
            } else {
                v.clone()
            }
        }
    }
}

/// Renders a header row plus records, newline-terminated.
pub fn render_csv(columns: &[&str], rows: &[Vec<Value>]) -> Result<String> {
    let mut out = String::new();
    out.push_str(&columns.join(","));
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        if row.len() != columns.len() {
            return Err(crate::CliError::Runtime(format!(
                "csv row {i} has {} fields, expected {}",
                row.len(),
                columns.len()
            )));
        }
        let mut first = true;
        for value in row {
            if !first {
                out.push(',');
            }
            first = false;
            let _ = write!(out, "{}", render(value));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Writes a CSV file with the fixed column order.
pub fn emit_csv<P: AsRef<Path>>(path: P, columns: &[&str], rows: &[Vec<Value>]) -> Result<()> {
    fs::write(path, render_csv(columns, rows)?)?;
    Ok(())
}
