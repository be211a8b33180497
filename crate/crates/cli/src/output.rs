//! Serialized artifacts: JSONL/CSV sample streams, JSON reports.
//!
//! Sample rows are newline-delimited JSON with a **fixed key order** (the
//! declaration order of [`SampleRow`]); the byte stream is part of the
//! determinism contract, so the field list below must not be reordered.
//! Floats are written in shortest round-trip form and parsed exactly, so a
//! serialize → parse cycle is the identity on every value.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use binsim_core::metrics::MetricsSample;

use crate::config::ExperimentConfig;
use crate::report::RunReport;

/// Failure while writing an artifact.
#[derive(Debug, Error)]
pub enum OutputError {
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
    #[error("serialization failure: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv failure: {0}")]
    Csv(#[from] csv::Error),
}

/// One line of the sample stream: the replica index followed by the metric
/// snapshot fields, flattened. Key order = declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRow {
    pub replica: u64,
    pub step: u64,
    pub total_load: u64,
    pub max_total_load: u64,
    pub min_load: u64,
    pub max_load: u64,
    pub average: f64,
    pub disc: f64,
    pub adisc: f64,
    pub overload: f64,
    pub nonempty_bins: u64,
}

impl SampleRow {
    /// Stamp a metric snapshot with its replica index.
    #[must_use]
    pub fn new(replica: u64, sample: &MetricsSample) -> Self {
        Self {
            replica,
            step: sample.step,
            total_load: sample.total_load,
            max_total_load: sample.max_total_load,
            min_load: sample.min_load,
            max_load: sample.max_load,
            average: sample.average,
            disc: sample.disc,
            adisc: sample.adisc,
            overload: sample.overload,
            nonempty_bins: sample.nonempty_bins,
        }
    }
}

/// Render rows as one JSONL document (one row per line, trailing newline).
pub fn samples_jsonl(rows: &[SampleRow]) -> Result<String, OutputError> {
    let mut out = String::new();
    for row in rows {
        out.push_str(&serde_json::to_string(row)?);
        out.push('\n');
    }
    Ok(out)
}

/// Write rows as JSONL to `path`.
pub fn write_samples_jsonl(path: &Path, rows: &[SampleRow]) -> Result<(), OutputError> {
    let mut w = BufWriter::new(File::create(path)?);
    for row in rows {
        serde_json::to_writer(&mut w, row)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Write rows as CSV (header from the field names, same order as JSONL).
pub fn write_samples_csv(path: &Path, rows: &[SampleRow]) -> Result<(), OutputError> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Write the run report as pretty-printed JSON.
pub fn write_report_json(path: &Path, report: &RunReport) -> Result<(), OutputError> {
    write_pretty(path, report)
}

/// Write the executed configuration (after flag overrides) as pretty JSON.
pub fn write_config_json(path: &Path, config: &ExperimentConfig) -> Result<(), OutputError> {
    write_pretty(path, config)
}

/// Write any serializable value as pretty-printed JSON with a trailing
/// newline.
pub fn write_pretty<T: Serialize>(path: &Path, value: &T) -> Result<(), OutputError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}
