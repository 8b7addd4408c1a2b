//! Artifact files: `solution.csv`, `estimate.csv`, `ks_report.csv` and
//! JSON diagnostics.
//!
//! Numbers are written in the shortest form that reads back to the same
//! `f64`, so re-running a configuration reproduces files byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use drawdown_core::{FeedbackPolicy, Retention, Solution};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionRow {
    pub z: f64,
    pub v: f64,
    pub b_star: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub z0: f64,
    pub mean: f64,
    pub std_err: f64,
    pub n_paths: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsRow {
    pub b: f64,
    pub z: f64,
    pub t: f64,
    pub ks_stat: f64,
    pub n_paths: usize,
    pub dt: f64,
    pub pass: bool,
}

fn write_error(path: &Path, err: impl Into<std::io::Error>) -> CliError {
    CliError::Write {
        path: path.to_path_buf(),
        source: err.into(),
    }
}

fn csv_error(path: &Path, err: csv::Error) -> CliError {
    write_error(path, std::io::Error::other(err))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| write_error(dir, e))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut out = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for row in rows {
        out.serialize(row).map_err(|e| csv_error(path, e))?;
    }
    out.flush().map_err(|e| write_error(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| write_error(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| write_error(path, e))
}

pub fn solution_rows(solution: &Solution) -> Vec<SolutionRow> {
    solution
        .z
        .iter()
        .zip(&solution.v)
        .zip(&solution.b_star)
        .map(|((&z, &v), b)| SolutionRow { z, v, b_star: b.value() })
        .collect()
}

pub fn write_solution(path: &Path, solution: &Solution) -> Result<(), CliError> {
    write_csv(path, &solution_rows(solution))
}

pub fn read_solution(path: &Path) -> Result<Vec<SolutionRow>, CliError> {
    let malformed = |reason: String| CliError::Solution {
        path: path.to_path_buf(),
        reason,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => CliError::Read {
            path: path.to_path_buf(),
            source: std::io::Error::other(e),
        },
        _ => malformed(e.to_string()),
    })?;
    let header = reader.headers().map_err(|e| malformed(e.to_string()))?;
    if header != vec!["z", "v", "b_star"] {
        return Err(malformed(format!("expected header z,v,b_star, found {}", header.iter().collect::<Vec<_>>().join(","))));
    }
    let rows = reader
        .deserialize()
        .collect::<Result<Vec<SolutionRow>, _>>()
        .map_err(|e| malformed(e.to_string()))?;
    if rows.is_empty() {
        return Err(malformed("no rows".into()));
    }
    Ok(rows)
}

/// Feedback policy stored in a solution file.
pub fn read_policy(path: &Path) -> Result<FeedbackPolicy, CliError> {
    let rows = read_solution(path)?;
    let malformed = |reason: String| CliError::Solution {
        path: path.to_path_buf(),
        reason,
    };
    let b = rows
        .iter()
        .map(|r| Retention::new(r.b_star))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| malformed(e.to_string()))?;
    FeedbackPolicy::new(rows.iter().map(|r| r.z).collect(), b).map_err(|e| malformed(e.to_string()))
}

/// `dir/name`, as an owned path.
pub fn artifact(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
