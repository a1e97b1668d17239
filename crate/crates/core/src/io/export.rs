use super::IoResult;
use crate::timestepper::TimeSeries;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// Fixed float format of every CSV cell: round-trip exact.
pub fn format_float(x: f64) -> String {
    format!("{x:.17e}")
}

/// Writes a time series; the `step` column is written as an integer.
pub fn write_series_csv(path: &Path, series: &TimeSeries) -> IoResult<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{}", series.columns.join(","))?;
    for row in &series.rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&series.columns)
            .map(|(x, c)| {
                if c == "step" {
                    format!("{}", *x as u64)
                } else {
                    format_float(*x)
                }
            })
            .collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_table_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> IoResult<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> IoResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    /// SHA-256 of the canonical spec text.
    pub spec_hash: String,
    pub spec: String,
    pub code_version: String,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub wall_time_s: f64,
    pub exit_code: i32,
    pub error: Option<String>,
    pub artifacts: Vec<String>,
}
