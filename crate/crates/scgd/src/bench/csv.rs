//! CSV emission and strict parsing for run and aggregate records.
//!
//! Schemas (LF line endings, no quoting — method names never contain commas):
//!
//! ```text
//! method,seed,step,queries,passes,gap,wall_ms
//! method,passes,gap_mean,gap_median,gap_std
//! ```
//!
//! Floats are printed with Rust's shortest round-trip formatting, so parsing
//! a file back yields bit-identical values.

use super::{AggregateRecord, RunRecord};
use crate::{Result, ScgdError};
use std::path::Path;

pub const RUNS_HEADER: &str = "method,seed,step,queries,passes,gap,wall_ms";
pub const AGGREGATE_HEADER: &str = "method,passes,gap_mean,gap_median,gap_std";

/// Render run records as CSV text.
pub fn runs_to_csv(records: &[RunRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(RUNS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.method, r.seed, r.step, r.queries, r.passes, r.gap, r.wall_ms
        ));
    }
    out
}

/// Render aggregate records as CSV text.
pub fn aggregate_to_csv(records: &[AggregateRecord]) -> String {
    let mut out = String::with_capacity(48 * (records.len() + 1));
    out.push_str(AGGREGATE_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.method, r.passes, r.gap_mean, r.gap_median, r.gap_std
        ));
    }
    out
}

fn split_line<'a>(
    path: &Path,
    number: usize,
    line: &'a str,
    expected: usize,
) -> Result<Vec<&'a str>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != expected {
        return Err(ScgdError::parse(
            path,
            number,
            format!("expected {expected} fields, found {}", fields.len()),
        ));
    }
    Ok(fields)
}

fn field<T: std::str::FromStr>(path: &Path, number: usize, name: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| ScgdError::parse(path, number, format!("bad {name}: '{raw}'")))
}

/// Parse run-record CSV text. `path` is used only for error messages.
pub fn runs_from_csv(path: &Path, text: &str) -> Result<Vec<RunRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == RUNS_HEADER => {}
        Some((_, header)) => {
            return Err(ScgdError::parse(path, 1, format!("expected header '{RUNS_HEADER}', found '{header}'")))
        }
        None => return Err(ScgdError::parse(path, 1, "empty file")),
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let number = idx + 1;
        let f = split_line(path, number, line, 7)?;
        records.push(RunRecord {
            method: f[0].to_string(),
            seed: field(path, number, "seed", f[1])?,
            step: field(path, number, "step", f[2])?,
            queries: field(path, number, "queries", f[3])?,
            passes: field(path, number, "passes", f[4])?,
            gap: field(path, number, "gap", f[5])?,
            wall_ms: field(path, number, "wall_ms", f[6])?,
        });
    }
    Ok(records)
}

/// Parse aggregate CSV text. `path` is used only for error messages.
pub fn aggregate_from_csv(path: &Path, text: &str) -> Result<Vec<AggregateRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == AGGREGATE_HEADER => {}
        Some((_, header)) => {
            return Err(ScgdError::parse(
                path,
                1,
                format!("expected header '{AGGREGATE_HEADER}', found '{header}'"),
            ))
        }
        None => return Err(ScgdError::parse(path, 1, "empty file")),
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let number = idx + 1;
        let f = split_line(path, number, line, 5)?;
        records.push(AggregateRecord {
            method: f[0].to_string(),
            passes: field(path, number, "passes", f[1])?,
            gap_mean: field(path, number, "gap_mean", f[2])?,
            gap_median: field(path, number, "gap_median", f[3])?,
            gap_std: field(path, number, "gap_std", f[4])?,
        });
    }
    Ok(records)
}

/// Read and parse a runs CSV file.
pub fn read_runs(path: &Path) -> Result<Vec<RunRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| ScgdError::io(path, e))?;
    runs_from_csv(path, &text)
}

/// Read and parse an aggregate CSV file.
pub fn read_aggregate(path: &Path) -> Result<Vec<AggregateRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| ScgdError::io(path, e))?;
    aggregate_from_csv(path, &text)
}
