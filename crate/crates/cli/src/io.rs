//! CSV tables and covariance files.

use std::fs::{self, File};
use std::io::Write;
use std::path::Path;

use gdtransfer::sweep::{format_sig, SweepTable};
use gdtransfer::TwoModeCovariance;

use crate::error::CliError;

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_table<W: Write>(table: &SweepTable, sink: W) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|&x| format_sig(x)))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_table_file(table: &SweepTable, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    write_table(table, file)
}

/// Four rows of four whitespace-separated reals; `#` lines are comments.
pub fn parse_covariance(text: &str) -> Result<TwoModeCovariance, CliError> {
    let rows: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    if rows.len() != 4 {
        return Err(CliError::Usage(format!(
            "covariance file needs 4 rows, found {}",
            rows.len()
        )));
    }
    let mut m = [[0.0; 4]; 4];
    for (i, line) in rows.iter().enumerate() {
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| CliError::Usage(format!("bad number '{s}' in row {}", i + 1))))
            .collect::<Result<_, _>>()?;
        if vals.len() != 4 {
            return Err(CliError::Usage(format!("row {} has {} entries, expected 4", i + 1, vals.len())));
        }
        m[i].copy_from_slice(&vals);
    }
    Ok(TwoModeCovariance::from_rows(m)?)
}

pub fn read_covariance(path: &Path) -> Result<TwoModeCovariance, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_covariance(&text)
}

pub fn format_covariance(sigma: &TwoModeCovariance) -> String {
    let m = sigma.matrix();
    (0..4)
        .map(|i| {
            (0..4)
                .map(|j| format_sig(m[(i, j)]))
                .collect::<Vec<_>>()
                .join(" ")
                + "\n"
        })
        .collect()
}

pub fn write_covariance(sigma: &TwoModeCovariance, path: &Path) -> Result<(), CliError> {
    let text = format!("# output covariance (X_a, Y_a, X_d, Y_d)\n{}", format_covariance(sigma));
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn ensure_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| io_err(path, e))
}
