//! Commands that need no time integration: steady-state catalog, region
//! scan and decay-rate fits of existing diagnostics.

use std::path::Path;

use alarmtaxis::{catalog, fit_decay_rate, region_scan, DecayFit, ModelParams, RegionScan, SteadyState};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::output::write_atomic;

#[derive(Debug, Clone, Serialize)]
pub struct SteadyCatalog {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub c3: f64,
    pub states: Vec<SteadyState>,
}

pub fn steady(b1: f64, b2: f64, b3: f64, c3: f64) -> CliResult<SteadyCatalog> {
    let p = ModelParams {
        b1,
        b2,
        b3,
        c3,
        ..ModelParams::default()
    };
    p.validate().map_err(|e| CliError::from_core("", e))?;
    let states = catalog(&p).map_err(|e| CliError::from_core("", e))?;
    Ok(SteadyCatalog { b1, b2, b3, c3, states })
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionSummary {
    pub rows: usize,
    pub admissible: usize,
    pub components: usize,
}

pub fn region(b1_range: (f64, f64), b2_range: (f64, f64), resolution: usize, path: &Path) -> CliResult<RegionSummary> {
    let scan: RegionScan =
        region_scan(b1_range, b2_range, resolution).map_err(|e| CliError::from_core("", e))?;
    write_atomic(path, |w| scan.write_csv(w))?;
    Ok(RegionSummary {
        rows: scan.points.len(),
        admissible: scan.admissible_count(),
        components: scan.admissible_components(),
    })
}

/// Reads `(t, column)` pairs with `t` in `window` from a diagnostics CSV.
pub fn read_series(path: &Path, column: &str, window: (f64, f64)) -> CliResult<Vec<(f64, f64)>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Domain(format!("{}: no column `{name}`", path.display())))
    };
    let t_col = find("t")?;
    let v_col = find(column)?;
    let parse = |cell: &str, what: &str, line: u64| -> CliResult<f64> {
        cell.trim().parse::<f64>().map_err(|_| {
            CliError::Domain(format!(
                "{}:{line}: cannot parse {what} `{cell}`",
                path.display()
            ))
        })
    };
    let mut series = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        let t = parse(&record[t_col], "t", line)?;
        if t >= window.0 && t <= window.1 {
            series.push((t, parse(&record[v_col], column, line)?));
        }
    }
    Ok(series)
}

pub fn rate(path: &Path, column: &str, window: (f64, f64)) -> CliResult<DecayFit> {
    let series = read_series(path, column, window)?;
    fit_decay_rate(&series, window).map_err(|e| CliError::Domain(e.to_string()))
}
