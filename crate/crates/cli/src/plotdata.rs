//! Tidy tables for plotting, derived from a results directory.

use std::cmp::Ordering;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::CliError;
use crate::output::{csv_bytes, write_all, RunEntry, METRICS_HEADER, SCHEMA_VERSION};

#[derive(Deserialize)]
struct StoredReport {
    schema_version: u32,
    runs: Vec<RunEntry>,
}

#[derive(Debug, Clone)]
struct MetricsRow {
    run: usize,
    mode: String,
    k: usize,
    tau: u64,
    delay: u64,
    fields: Vec<String>,
}

impl MetricsRow {
    fn get(&self, column: &str) -> String {
        let i = METRICS_HEADER
            .iter()
            .position(|&c| c == column)
            .expect("known column");
        self.fields[i].clone()
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn read_metrics(path: &Path) -> Result<Vec<MetricsRow>, CliError> {
    let text = read(path)?;
    let bad = |m: String| CliError::Data(format!("{}: {m}", path.display()));
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().ne(METRICS_HEADER.iter().copied()) {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let fields: Vec<String> = record.iter().map(str::to_owned).collect();
        let num = |i: usize| -> Result<u64, CliError> {
            fields[i]
                .parse()
                .map_err(|_| bad(format!("bad {} `{}`", METRICS_HEADER[i], fields[i])))
        };
        rows.push(MetricsRow {
            run: num(0)? as usize,
            mode: fields[1].clone(),
            k: num(2)? as usize,
            tau: num(3)?,
            delay: num(4)?,
            fields,
        });
    }
    Ok(rows)
}

fn read_report(path: &Path) -> Result<StoredReport, CliError> {
    let report: StoredReport = serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if report.schema_version != SCHEMA_VERSION {
        return Err(CliError::Data(format!(
            "{}: schema_version {} (expected {SCHEMA_VERSION})",
            path.display(),
            report.schema_version
        )));
    }
    Ok(report)
}

pub fn plotdata(results: &Path, out: &Path) -> Result<(), CliError> {
    // Both inputs are read before anything is written.
    let metrics = read_metrics(&results.join("metrics.csv"))?;
    let report = read_report(&results.join("report.json"))?;
    if metrics.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no runs",
            results.join("metrics.csv").display()
        )));
    }

    let mut by_tau = metrics.clone();
    by_tau.sort_by(|a, b| {
        (&a.mode, a.k, a.delay, a.tau, a.run).cmp(&(&b.mode, b.k, b.delay, b.tau, b.run))
    });
    let accuracy: Vec<Vec<String>> = by_tau
        .iter()
        .map(|r| {
            vec![
                r.mode.clone(),
                r.k.to_string(),
                r.delay.to_string(),
                r.tau.to_string(),
                r.run.to_string(),
                r.get("tv"),
                r.get("kl"),
                r.get("tv_vs_ideal"),
            ]
        })
        .collect();

    let mut by_k = metrics;
    by_k.sort_by(|a, b| {
        (&a.mode, a.tau, a.delay, a.k, a.run).cmp(&(&b.mode, b.tau, b.delay, b.k, b.run))
    });
    let walltime: Vec<Vec<String>> = by_k
        .iter()
        .map(|r| {
            vec![
                r.mode.clone(),
                r.tau.to_string(),
                r.delay.to_string(),
                r.k.to_string(),
                r.run.to_string(),
                r.get("wall_time_s"),
                r.get("energy_j"),
                r.get("messages"),
            ]
        })
        .collect();

    let mut sweeps = Vec::new();
    for entry in &report.runs {
        let r = &entry.report;
        let Some(c) = &r.comparison else { continue };
        let mut curve = c.tv_curve.clone();
        if let Some(tv) = c.tv {
            if curve.last().is_none_or(|&(s, _)| s != r.trace.sweeps) {
                curve.push((r.trace.sweeps, tv));
            }
        }
        curve.sort_by(|a, b| {
            a.0.cmp(&b.0)
                .then(a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
        });
        for (s, tv) in curve {
            sweeps.push(vec![
                entry.run.to_string(),
                entry.label.clone(),
                r.k.to_string(),
                r.exchange_interval.to_string(),
                r.delivery_delay.to_string(),
                s.to_string(),
                tv.to_string(),
            ]);
        }
    }

    write_all(&[
        (
            out.join("accuracy_vs_tau.csv"),
            csv_bytes(
                &[
                    "mode",
                    "k",
                    "delay",
                    "tau",
                    "run",
                    "tv",
                    "kl",
                    "tv_vs_ideal",
                ],
                &accuracy,
            )?,
        ),
        (
            out.join("walltime_vs_k.csv"),
            csv_bytes(
                &[
                    "mode",
                    "tau",
                    "delay",
                    "k",
                    "run",
                    "wall_time_s",
                    "energy_j",
                    "messages",
                ],
                &walltime,
            )?,
        ),
        (
            out.join("tv_vs_sweeps.csv"),
            csv_bytes(
                &["run", "mode", "k", "tau", "delay", "sweeps", "tv"],
                &sweeps,
            )?,
        ),
    ])
}
