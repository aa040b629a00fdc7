//! Experiment reports and their JSON / CSV serialization.
//!
//! Reports are reproducible artifacts: identical invocation and seed must
//! produce byte-identical JSON. Diagnostics therefore live in a `BTreeMap`
//! (stable key order) and the wall time, which varies between runs, is kept
//! out of the serialized form.

use grassde::de::DEConfig;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

/// Manifold dimensions attached to a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeDims {
    pub n: usize,
    pub k: usize,
    pub d: usize,
}

/// One experiment's outcome: the engine configuration it ran with, the raw
/// and sign-adjusted optima, named diagnostic values, and the per-generation
/// best-fitness trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub config: DEConfig,
    pub shape: ShapeDims,
    pub best_fitness: f64,
    /// `best_fitness` with the sign flipped where the benchmark reports a
    /// maximum (captured variance); otherwise equal to `best_fitness`.
    pub reported_value: f64,
    pub diagnostics: BTreeMap<String, f64>,
    pub history: Vec<f64>,
    /// Seconds spent in the optimizer; excluded from serialization so that
    /// emitted reports are deterministic.
    #[serde(skip)]
    pub wall_time: f64,
    pub seed: u64,
}

/// Output format for [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Serializes reports as a pretty-printed JSON array.
pub fn to_json(reports: &[ExperimentReport]) -> String {
    let mut text = serde_json::to_string_pretty(reports).expect("reports contain finite floats");
    text.push('\n');
    text
}

fn fmt_float(value: f64) -> String {
    format!("{value:.12e}")
}

/// Builds the one-row-per-experiment summary CSV. Diagnostic keys across all
/// reports form the trailing columns; a report without a given key leaves
/// the cell empty.
pub fn summary_csv(reports: &[ExperimentReport]) -> String {
    let mut diag_keys: Vec<String> = Vec::new();
    for report in reports {
        for key in report.diagnostics.keys() {
            if !diag_keys.contains(key) {
                diag_keys.push(key.clone());
            }
        }
    }
    diag_keys.sort();

    let mut out = String::from(
        "experiment_id,seed,n,k,d,np,max_generations,f_init,cr_init,f_l,f_u,tau1,tau2,\
         stagnation_window,stagnation_tol,generations,best_fitness,reported_value,wall_time_s",
    );
    for key in &diag_keys {
        out.push(',');
        out.push_str(key);
    }
    out.push('\n');

    for report in reports {
        let config = &report.config;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            report.experiment_id,
            report.seed,
            report.shape.n,
            report.shape.k,
            report.shape.d,
            config.np,
            config.max_generations,
            fmt_float(config.f_init),
            fmt_float(config.cr_init),
            fmt_float(config.f_l),
            fmt_float(config.f_u),
            fmt_float(config.tau1),
            fmt_float(config.tau2),
            config.stagnation_window,
            fmt_float(config.stagnation_tol),
            report.history.len(),
            fmt_float(report.best_fitness),
            fmt_float(report.reported_value),
            fmt_float(report.wall_time),
        ));
        for key in &diag_keys {
            out.push(',');
            if let Some(value) = report.diagnostics.get(key) {
                out.push_str(&fmt_float(*value));
            }
        }
        out.push('\n');
    }
    out
}

/// Builds the per-generation trace CSV for one report.
pub fn trace_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("generation,best_fitness\n");
    for (idx, best) in report.history.iter().enumerate() {
        out.push_str(&format!("{},{}\n", idx + 1, fmt_float(*best)));
    }
    out
}

/// Path of the trace file accompanying `summary_path` for one experiment.
pub fn trace_path(summary_path: &Path, experiment_id: &str) -> PathBuf {
    let stem = summary_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("report");
    summary_path.with_file_name(format!("{stem}.{experiment_id}.trace.csv"))
}

/// Writes reports to `path`. JSON produces a single document; CSV produces
/// the summary at `path` plus one trace file per experiment next to it.
/// Returns every path written.
pub fn emit_report(
    reports: &[ExperimentReport],
    format: ReportFormat,
    path: &Path,
) -> io::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    match format {
        ReportFormat::Json => {
            write_file(path, to_json(reports).as_bytes())?;
            written.push(path.to_path_buf());
        }
        ReportFormat::Csv => {
            write_file(path, summary_csv(reports).as_bytes())?;
            written.push(path.to_path_buf());
            for report in reports {
                let trace = trace_path(path, &report.experiment_id);
                write_file(&trace, trace_csv(report).as_bytes())?;
                written.push(trace);
            }
        }
    }
    Ok(written)
}

fn write_file(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(bytes)?;
    file.flush()
}
