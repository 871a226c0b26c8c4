//! Result files. Everything is rendered in memory first and then written
//! through a temporary file in the target directory, so a reader never sees a
//! partial file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use illusion_core::illusion::RunReport;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub const METRICS_HEADER: [&str; 12] = [
    "run",
    "mode",
    "k",
    "tau",
    "delay",
    "tv",
    "kl",
    "tv_vs_ideal",
    "best_energy",
    "wall_time_s",
    "energy_j",
    "messages",
];

/// One run in `report.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunEntry {
    pub run: usize,
    /// `sample`, `ideal`, `sync` or `async`.
    pub label: String,
    pub report: RunReport,
}

pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut tmp = NamedTempFile::new_in(&dir).map_err(|e| CliError::io(&dir, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(path, e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// Writes all files or none: nothing is touched until every file has been
/// rendered.
pub fn write_all(files: &[(PathBuf, Vec<u8>)]) -> Result<(), CliError> {
    for (path, bytes) in files {
        write_atomic(path, bytes)?;
    }
    Ok(())
}

pub fn json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::Contract(format!("serialising report: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Contract(format!("rendering csv: {e}"));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(row).map_err(fail)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Contract(format!("rendering csv: {e}")))
}

pub fn metrics_csv(runs: &[RunEntry]) -> Result<Vec<u8>, CliError> {
    let rows: Vec<Vec<String>> = runs
        .iter()
        .map(|e| {
            let r = &e.report;
            let c = r.comparison.as_ref();
            vec![
                e.run.to_string(),
                e.label.clone(),
                r.k.to_string(),
                r.exchange_interval.to_string(),
                r.delivery_delay.to_string(),
                opt(c.and_then(|c| c.tv)),
                opt(c.and_then(|c| c.kl)),
                opt(c.and_then(|c| c.tv_vs_ideal)),
                r.trace.best_energy.to_string(),
                r.accounting.wall_time_s.to_string(),
                r.accounting.energy_j.to_string(),
                r.messages.to_string(),
            ]
        })
        .collect();
    csv_bytes(&METRICS_HEADER, &rows)
}

/// Long format: one row per run and sweep.
pub fn sweep_energy_csv(runs: &[RunEntry]) -> Result<Vec<u8>, CliError> {
    let rows: Vec<Vec<String>> = runs
        .iter()
        .flat_map(|e| {
            e.report
                .trace
                .energies
                .iter()
                .enumerate()
                .map(move |(t, energy)| {
                    vec![
                        e.run.to_string(),
                        e.label.clone(),
                        (t + 1).to_string(),
                        energy.to_string(),
                    ]
                })
        })
        .collect();
    csv_bytes(&["run", "mode", "sweep", "energy"], &rows)
}
