use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use radial_core::RunTrace;

const FIXED_COLUMNS: [&str; 8] = [
    "iter",
    "z",
    "f_x",
    "alpha",
    "subgrad_norm",
    "gamma_residual",
    "rel_accuracy",
    "lemma34_slack",
];

pub fn trace_header(dimension: usize) -> Vec<String> {
    FIXED_COLUMNS
        .iter()
        .map(|s| s.to_string())
        .chain((0..dimension).map(|i| format!("x{i}")))
        .collect()
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn optional(v: Option<f64>) -> String {
    v.map(format_real).unwrap_or_default()
}

pub fn write_trace<W: Write>(trace: &RunTrace, dimension: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trace_header(dimension))?;
    for r in &trace.records {
        let mut row = vec![
            r.iter.to_string(),
            format_real(r.z),
            format_real(r.f_x),
            optional(r.alpha),
            optional(r.subgrad_norm),
            format_real(r.gamma_residual),
            optional(r.rel_accuracy),
            optional(r.lemma34_slack),
        ];
        row.extend(r.x.iter().map(|&v| format_real(v)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace_csv(trace: &RunTrace, dimension: usize, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).with_context(|| format!("cannot create trace file {}", path.display()))?;
    write_trace(trace, dimension, file).with_context(|| format!("cannot write trace file {}", path.display()))
}
