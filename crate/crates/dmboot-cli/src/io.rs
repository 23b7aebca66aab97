//! CSV ingestion and report output.

use std::fs;
use std::path::Path;

use dmboot::Sample;

use crate::Failure;

/// Reads a numeric CSV file into a sample: comma-separated, one observation
/// per row, all rows the same width, decimal points only. A non-numeric
/// first line is treated as a header. Errors carry 1-based line numbers.
pub fn read_sample(path: &Path) -> Result<Sample, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::data(format!("cannot read {}: {e}", path.display())))?;
    let mut data: Vec<f64> = Vec::new();
    let mut width: Option<usize> = None;
    let mut saw_first = false;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let mut values = Vec::with_capacity(fields.len());
        let mut bad_field: Option<&str> = None;
        for field in &fields {
            match field.parse::<f64>() {
                Ok(v) => values.push(v),
                Err(_) => {
                    bad_field = Some(field);
                    break;
                }
            }
        }
        if let Some(field) = bad_field {
            if !saw_first {
                // non-numeric first line: header
                saw_first = true;
                continue;
            }
            return Err(Failure::data(format!(
                "{}: line {lineno}: not a number: `{field}`",
                path.display()
            )));
        }
        saw_first = true;
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Failure::data(format!(
                "{}: line {lineno}: non-finite value `{v}`",
                path.display()
            )));
        }
        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => {
                return Err(Failure::data(format!(
                    "{}: line {lineno}: expected {w} columns, found {}",
                    path.display(),
                    values.len()
                )));
            }
            _ => {}
        }
        data.extend_from_slice(&values);
    }
    let width = width.ok_or_else(|| {
        Failure::data(format!("{}: no data rows found", path.display()))
    })?;
    Sample::new(data, width).map_err(Failure::from)
}

/// Writes a rendered report to stdout or to `--output`.
pub fn write_report(output: Option<&Path>, body: &str) -> Result<(), Failure> {
    match output {
        None => {
            print!("{body}");
            Ok(())
        }
        Some(path) => fs::write(path, body).map_err(|e| {
            Failure::internal(format!("cannot write {}: {e}", path.display()))
        }),
    }
}
