//! CSV output for benchmark records and their summaries.

use std::io::Write;
use std::path::Path;

use projtomo::experiments::{ExperimentRecord, Stats, SummaryRow};

use crate::error::CliError;

pub const RESULTS_HEADER: [&str; 12] = [
    "task",
    "method",
    "qubits",
    "noise_p",
    "sample",
    "seed",
    "dist_to_oracle",
    "dist_to_input",
    "feasibility_residual",
    "iterations",
    "converged",
    "wall_time_ns",
];

/// First field of the row appended when a sweep was interrupted.
pub const TRUNCATION_MARKER: &str = "#truncated";

const SUMMARY_METRICS: [&str; 5] = ["dist_to_oracle", "dist_to_input", "feasibility_residual", "iterations", "wall_time_ns"];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Shortest decimal that parses back to the same `f64`, with an exponent
/// for very large or small magnitudes.
pub fn real(v: f64) -> String {
    format!("{v:?}")
}

pub fn record_fields(r: &ExperimentRecord) -> [String; 12] {
    [
        r.task.to_string(),
        r.method.to_string(),
        r.qubits.to_string(),
        real(r.noise_p),
        r.sample.to_string(),
        r.seed.to_string(),
        r.dist_to_oracle.map(real).unwrap_or_default(),
        real(r.dist_to_input),
        real(r.feasibility_residual),
        opt(r.iterations),
        opt(r.converged),
        r.wall_time_ns.to_string(),
    ]
}

pub fn write_results<W: Write>(out: W, records: &[ExperimentRecord], truncated: bool) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(RESULTS_HEADER).map_err(io)?;
    for r in records {
        w.write_record(record_fields(r)).map_err(io)?;
    }
    if truncated {
        let mut marker = vec![TRUNCATION_MARKER.to_string()];
        marker.resize(RESULTS_HEADER.len(), String::new());
        w.write_record(&marker).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn summary_header() -> Vec<String> {
    let mut h: Vec<String> = ["task", "method", "qubits", "noise_p", "count", "failures"].map(String::from).to_vec();
    for m in SUMMARY_METRICS {
        for s in ["median", "q25", "q75"] {
            h.push(format!("{m}_{s}"));
        }
    }
    h
}

fn stats_fields(s: Option<Stats>) -> [String; 3] {
    match s {
        Some(s) => [real(s.median), real(s.q25), real(s.q75)],
        None => Default::default(),
    }
}

pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(summary_header()).map_err(io)?;
    for r in rows {
        let mut fields = vec![
            r.task.to_string(),
            r.method.to_string(),
            r.qubits.to_string(),
            real(r.noise_p),
            r.count.to_string(),
            r.failures.to_string(),
        ];
        for s in [r.dist_to_oracle, Some(r.dist_to_input), Some(r.feasibility_residual), r.iterations, Some(r.wall_time_ns)] {
            fields.extend(stats_fields(s));
        }
        w.write_record(&fields).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_file(path: &Path, write: impl FnOnce(&mut Vec<u8>) -> Result<(), CliError>) -> Result<(), CliError> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    std::fs::write(path, buf).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}
