//! CSV traces and summaries.
//!
//! Every number is written in Rust's shortest round-trip form and missing
//! quantities are empty fields, so equal runs give byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use graal::solvers::Trace;

use crate::experiment::{ExperimentOutput, SummaryRow};

pub const TRACE_HEADER: [&str; 9] =
    ["k", "lambda", "theta", "residual", "energy", "dist_opt", "fevals", "proxevals", "elapsed_s"];

pub const SUMMARY_HEADER: [&str; 16] = [
    "seed",
    "method",
    "status",
    "iterations",
    "iterations_to_tol",
    "fevals_to_tol",
    "total_fevals",
    "final_residual",
    "final_norm",
    "final_energy",
    "energy_star",
    "iterations_to_energy_tol",
    "fevals_to_energy_tol",
    "wall_s",
    "success",
    "error",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

pub fn write_trace<W: Write>(trace: &Trace, out: W) -> csv::Result<()> {
    let mut w = writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in &trace.records {
        w.write_record([
            r.k.to_string(),
            opt(r.lambda),
            opt(r.theta),
            r.residual.to_string(),
            opt(r.energy),
            opt(r.dist_opt),
            r.fevals.to_string(),
            r.proxevals.to_string(),
            opt(r.elapsed_s),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], errors: &[Option<String>], out: W) -> csv::Result<()> {
    let mut w = writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for (r, e) in rows.iter().zip(errors) {
        w.write_record([
            r.seed.to_string(),
            r.method.to_string(),
            r.status.clone(),
            r.iterations.to_string(),
            opt(r.iterations_to_tol),
            opt(r.fevals_to_tol),
            r.total_fevals.to_string(),
            opt(r.final_residual),
            opt(r.final_norm),
            opt(r.final_energy),
            opt(r.energy_star),
            opt(r.iterations_to_energy_tol),
            opt(r.fevals_to_energy_tol),
            opt(r.wall_seconds),
            r.success.to_string(),
            e.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn trace_file_name(experiment: &str, method: &str, seed: u64) -> String {
    format!("{experiment}_{method}_seed{seed}.csv")
}

pub fn summary_file_name(experiment: &str) -> String {
    format!("{experiment}_summary.csv")
}

/// Writes one trace per cell and the summary into `dir`, returning the paths written.
pub fn write_outputs(output: &ExperimentOutput, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let name = &output.config.name;
    let mut written = Vec::new();
    for cell in &output.cells {
        let Some(trace) = &cell.trace else { continue };
        let path = dir.join(trace_file_name(name, cell.method.name(), cell.seed));
        let mut buf = Vec::new();
        write_trace(trace, &mut buf).map_err(std::io::Error::other)?;
        fs::write(&path, buf)?;
        written.push(path);
    }
    let errors: Vec<Option<String>> = output.cells.iter().map(|c| c.error.clone()).collect();
    let mut buf = Vec::new();
    write_summary(&output.summary, &errors, &mut buf).map_err(std::io::Error::other)?;
    let path = dir.join(summary_file_name(name));
    fs::write(&path, buf)?;
    written.push(path);
    Ok(written)
}
