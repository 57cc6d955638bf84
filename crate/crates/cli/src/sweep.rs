//! Parameter sweeps: every combination of the axis values runs in its own
//! subdirectory; a failing point is recorded and the others continue.

use std::path::{Path, PathBuf};

use alarmtaxis::grid::fmt_f64;
use serde::Serialize;

use crate::config::SweepPoint;
use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, write_atomic, write_json};
use crate::simulate::{simulate, RunSummary};

pub const SUMMARY_CSV: &str = "summary.csv";
pub const SUMMARY_JSON: &str = "summary.json";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTotals {
    pub points: usize,
    pub completed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone)]
pub struct PointResult {
    pub point: SweepPoint,
    pub outcome: Result<RunSummary, String>,
}

pub fn point_dir(out: &Path, index: usize) -> PathBuf {
    out.join(format!("point_{index:04}"))
}

fn format_value(v: &toml::Value) -> String {
    match v {
        toml::Value::Float(x) => fmt_f64(*x),
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Runs every point on a pool of `workers` threads. Results come back in
/// point order whatever the completion order.
pub fn run_sweep(points: Vec<SweepPoint>, out: &Path, workers: usize) -> CliResult<Vec<PointResult>> {
    use rayon::prelude::*;

    ensure_dir(out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {workers} workers: {e}")))?;
    let results = pool.install(|| {
        points
            .into_par_iter()
            .map(|point| {
                let dir = point_dir(out, point.index);
                let outcome = simulate(&point.config, &dir).map_err(|e| e.to_string());
                PointResult { point, outcome }
            })
            .collect::<Vec<_>>()
    });
    Ok(results)
}

/// Writes `summary.csv` (one row per point) and `summary.json` (totals).
pub fn write_summary(keys: &[String], results: &[PointResult], out: &Path) -> CliResult<SweepTotals> {
    let path = out.join(SUMMARY_CSV);
    write_atomic(&path, |w| {
        let mut csv = csv::Writer::from_writer(w);
        let mut header = vec!["point".to_string()];
        header.extend(keys.iter().cloned());
        header.extend(
            [
                "status",
                "final_F",
                "sigma",
                "C",
                "r_squared",
                "checks_passed",
                "checks_failed",
                "checks_not_applicable",
                "note",
            ]
            .map(String::from),
        );
        csv.write_record(&header)?;
        let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        for r in results {
            let mut row = vec![r.point.index.to_string()];
            row.extend(r.point.values.iter().map(format_value));
            match &r.outcome {
                Ok(s) => {
                    let fit = s.fit.as_ref();
                    row.extend([
                        s.status.clone(),
                        opt(s.final_dissipation),
                        opt(fit.map(|f| f.sigma)),
                        opt(fit.map(|f| f.c)),
                        opt(fit.map(|f| f.r_squared)),
                        s.checks_passed.to_string(),
                        s.checks_failed.to_string(),
                        s.checks_not_applicable.to_string(),
                        s.fit_error.clone().unwrap_or_default(),
                    ]);
                }
                Err(msg) => {
                    row.push("failed".into());
                    row.extend(std::iter::repeat_n(String::new(), 7));
                    row.push(msg.clone());
                }
            }
            csv.write_record(&row)?;
        }
        csv.flush()
    })?;
    let failed = results.iter().filter(|r| r.outcome.is_err()).count();
    let totals = SweepTotals {
        points: results.len(),
        completed: results.len() - failed,
        failed,
    };
    write_json(&out.join(SUMMARY_JSON), &totals)?;
    Ok(totals)
}
