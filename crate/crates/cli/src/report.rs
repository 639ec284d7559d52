//! Result serialization: the regression-diffable CSV and the run
//! manifest.
//!
//! The CSV is the reproducibility contract — a header row plus data rows,
//! RFC-style quoting, every float printed at exactly 12 significant
//! digits — so identical config and seed produce byte-identical files.
//! Run-varying data (timings, tool versions) go to the manifest instead.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

/// Fixed float formatting: 12 significant digits, scientific form.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.11e}")
    }
}

/// What a subcommand hands back for serialization.
pub struct CommandOutput {
    pub headers: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
    /// Fully resolved inputs, echoed into the manifest.
    pub inputs: Value,
    /// Command-specific summary values (verdicts, extrema).
    pub summary: Value,
    /// Named phase durations in seconds.
    pub timings: Vec<(&'static str, f64)>,
}

impl CommandOutput {
    /// Renders the CSV exactly as written to disk.
    pub fn csv_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.headers)
            .and_then(|()| self.rows.iter().try_for_each(|r| w.write_record(r)))
            .map_err(|e| CliError::config(format!("csv encoding: {e}")))?;
        w.into_inner()
            .map_err(|e| CliError::config(format!("csv encoding: {e}")))
    }
}

/// Files produced by a run.
#[derive(Debug, Serialize)]
pub struct RunPaths {
    pub results: PathBuf,
    pub manifest: PathBuf,
}

/// Writes results.csv and manifest.json under `out_dir` and returns the
/// CSV bytes (the caller mirrors them to stdout).
pub fn write_run(
    out_dir: &Path,
    command: &str,
    output: &CommandOutput,
    workers: usize,
    seed: u64,
    started: Instant,
) -> Result<(RunPaths, Vec<u8>), CliError> {
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::config(format!("cannot create {}: {e}", out_dir.display())))?;
    let results = out_dir.join("results.csv");
    let manifest = out_dir.join("manifest.json");

    let bytes = output.csv_bytes()?;
    fs::write(&results, &bytes)
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", results.display())))?;

    let mut timings: serde_json::Map<String, Value> = output
        .timings
        .iter()
        .map(|(k, v)| ((*k).to_string(), json!(v)))
        .collect();
    timings.insert("total_seconds".into(), json!(started.elapsed().as_secs_f64()));

    let doc = json!({
        "tool": {
            "name": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "core_version": pslab_core::VERSION,
        },
        "command": command,
        "workers": workers,
        "seed": seed,
        "inputs": output.inputs,
        "summary": output.summary,
        "rows": output.rows.len(),
        "results": results,
        "timings": Value::Object(timings),
    });
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::config(format!("manifest encoding: {e}")))?;
    fs::write(&manifest, text)
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", manifest.display())))?;

    Ok((RunPaths { results, manifest }, bytes))
}
