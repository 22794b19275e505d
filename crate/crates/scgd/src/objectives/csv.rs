//! Dataset CSV export/import for cross-checking against other implementations.
//!
//! Schema: header `x1,…,xp,y`, one row per sample, LF line endings. Values are
//! written as shortest round-trip decimals, so import reproduces the original
//! f64 bits exactly.

use super::Dataset;
use crate::{Result, ScgdError};
use nalgebra::{DMatrix, DVector};
use std::fmt::Write as _;
use std::path::Path;

/// Write `dataset` to `path` in the `x1,…,xp,y` schema.
pub fn export_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    let mut out = String::new();
    for j in 0..dataset.p() {
        let _ = write!(out, "x{},", j + 1);
    }
    out.push_str("y\n");
    for i in 0..dataset.n() {
        for j in 0..dataset.p() {
            let _ = write!(out, "{},", dataset.features()[(i, j)]);
        }
        let _ = writeln!(out, "{}", dataset.labels()[i]);
    }
    std::fs::write(path, out).map_err(|e| ScgdError::io(path, e))
}

/// Read a dataset written by [`export_csv`] (or any conforming file).
pub fn import_csv(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(|e| ScgdError::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| ScgdError::parse(path, 1, "empty file; expected an x1,…,xp,y header"))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < 2 || columns.last() != Some(&"y") {
        return Err(ScgdError::parse(path, 1, "header must end with the label column y"));
    }
    let p = columns.len() - 1;
    for (j, name) in columns[..p].iter().enumerate() {
        let expected = format!("x{}", j + 1);
        if *name != expected {
            return Err(ScgdError::parse(path, 1, format!("expected column {expected}, got {name}")));
        }
    }

    let mut rows: Vec<f64> = Vec::new();
    let mut labels: Vec<f64> = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != p + 1 {
            return Err(ScgdError::parse(
                path,
                idx + 1,
                format!("expected {} fields, got {}", p + 1, fields.len()),
            ));
        }
        for field in &fields[..p] {
            rows.push(parse_f64(path, idx + 1, field)?);
        }
        labels.push(parse_f64(path, idx + 1, fields[p])?);
    }
    if labels.is_empty() {
        return Err(ScgdError::parse(path, 2, "no data rows"));
    }
    let n = labels.len();
    let features = DMatrix::from_row_iterator(n, p, rows);
    Dataset::new(features, DVector::from_vec(labels))
}

fn parse_f64(path: &Path, line: usize, field: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| ScgdError::parse(path, line, format!("not a number: '{field}'")))
}
