//! File writers. Every artifact gets a `<stem>.config.json` sidecar holding
//! the effective configuration that produced it.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

/// Fixed float format: 9 significant digits in scientific notation.
pub fn num(v: f64) -> String {
    format!("{v:.8e}")
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn sidecar_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("output");
    path.with_file_name(format!("{stem}.config.json"))
}

fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_error(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_error(path, e))
}

fn prepare(dir: &Path, file: &str, cfg: &RunConfig) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let path = dir.join(file);
    write_json_file(&sidecar_path(&path), cfg)?;
    Ok(path)
}

pub fn write_json<T: Serialize>(
    dir: &Path,
    file: &str,
    value: &T,
    cfg: &RunConfig,
) -> Result<PathBuf, CliError> {
    let path = prepare(dir, file, cfg)?;
    write_json_file(&path, value)?;
    Ok(path)
}

/// Writes a header and string records with LF line endings.
pub fn write_csv(
    dir: &Path,
    file: &str,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
    cfg: &RunConfig,
) -> Result<PathBuf, CliError> {
    let path = prepare(dir, file, cfg)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(&path)
        .map_err(|e| io_error(&path, e))?;
    w.write_record(header).map_err(|e| io_error(&path, e))?;
    for r in rows {
        w.write_record(&r).map_err(|e| io_error(&path, e))?;
    }
    w.flush().map_err(|e| io_error(&path, e))?;
    Ok(path)
}
