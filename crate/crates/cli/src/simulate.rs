//! Single runs: integrate, then write diagnostics and reports.

use std::path::Path;

use alarmtaxis::diagnostics::{sup_bound_u, write_records_csv};
use alarmtaxis::stability::DEFAULT_SMALL_BOX;
use alarmtaxis::stepper::SPECIES;
use alarmtaxis::{
    check_bounds, fit_decay_rate, run, stability_report, DecayFit, Flag, RunOptions, Trajectory,
    Triple,
};
use serde::{Deserialize, Serialize};

use crate::config::{FitSpec, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, write_atomic, write_json, write_string};

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const BOUNDS_FILE: &str = "bounds.json";
pub const STABILITY_FILE: &str = "stability.json";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CONFIG_FILE: &str = "config.toml";
pub const SNAPSHOT_DIR: &str = "snapshots";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    /// `ok` or `failed`.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub t_final: Option<f64>,
    pub steps: Option<usize>,
    pub samples: usize,
    pub reference: Option<Triple>,
    pub final_energy: Option<f64>,
    pub final_dissipation: Option<f64>,
    pub fit: Option<DecayFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_error: Option<String>,
    pub checks_passed: usize,
    pub checks_failed: usize,
    pub checks_not_applicable: usize,
}

impl RunSummary {
    fn failed(reference: Option<Triple>, err: &CliError) -> Self {
        Self {
            status: "failed".into(),
            error: Some(err.to_string()),
            t_final: None,
            steps: None,
            samples: 0,
            reference,
            final_energy: None,
            final_dissipation: None,
            fit: None,
            fit_error: None,
            checks_passed: 0,
            checks_failed: 0,
            checks_not_applicable: 0,
        }
    }
}

pub fn fit_column(traj: &Trajectory, fit: &FitSpec) -> alarmtaxis::Result<DecayFit> {
    let series: Vec<(f64, f64)> = traj
        .records
        .iter()
        .filter_map(|r| Some((r.t, r.column(&fit.column)?)))
        .collect();
    fit_decay_rate(&series, (fit.window[0], fit.window[1]))
}

/// Runs `cfg` and writes every output file under `out`. A numerical failure
/// still leaves `config.toml` and a `summary.json` marked failed.
pub fn simulate(cfg: &RunConfig, out: &Path) -> CliResult<RunSummary> {
    let prepared = cfg.prepare()?;
    ensure_dir(out)?;
    write_string(&out.join(CONFIG_FILE), &cfg.to_toml())?;

    let mut opts = RunOptions::new(cfg.t_end, cfg.sample_every);
    if let Some(r) = prepared.reference {
        opts = opts.with_reference(r);
    }
    if cfg.snapshots {
        opts = opts.with_snapshots();
    }
    let traj = match run(&prepared.initial, &cfg.params, &cfg.control, &opts) {
        Ok(t) => t,
        Err(e) => {
            let err = CliError::from_core("", e);
            for stale in [DIAGNOSTICS_FILE, BOUNDS_FILE, STABILITY_FILE] {
                let _ = std::fs::remove_file(out.join(stale));
            }
            write_json(&out.join(SUMMARY_FILE), &RunSummary::failed(prepared.reference, &err))?;
            return Err(err);
        }
    };

    write_atomic(&out.join(DIAGNOSTICS_FILE), |w| write_records_csv(&traj.records, w))?;
    let bounds = check_bounds(&traj.records, &prepared.initial, &cfg.params, &cfg.bounds);
    write_json(&out.join(BOUNDS_FILE), &bounds)?;

    if prepared.reference.is_some() {
        let u_sup = sup_bound_u(&prepared.initial);
        let v_sup = traj.records.iter().map(|r| r.linf_v).fold(0.0, f64::max);
        if let Ok(report) = stability_report(&cfg.params, u_sup, v_sup, DEFAULT_SMALL_BOX) {
            write_json(&out.join(STABILITY_FILE), &report)?;
        }
    }

    if cfg.snapshots {
        write_snapshots(&traj, &out.join(SNAPSHOT_DIR))?;
    }

    let (fit, fit_error) = match &cfg.fit {
        Some(spec) => match fit_column(&traj, spec) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        },
        None => (None, None),
    };
    let last = traj.records.last();
    let summary = RunSummary {
        status: "ok".into(),
        error: None,
        t_final: Some(traj.final_state.t),
        steps: Some(traj.steps),
        samples: traj.records.len(),
        reference: prepared.reference,
        final_energy: last.and_then(|r| r.energy),
        final_dissipation: last.and_then(|r| r.dissipation),
        fit,
        fit_error,
        checks_passed: bounds.count(Flag::Pass),
        checks_failed: bounds.count(Flag::Fail),
        checks_not_applicable: bounds.count(Flag::NotApplicable),
    };
    write_json(&out.join(SUMMARY_FILE), &summary)?;
    Ok(summary)
}

/// `snapshots/NNNNN_<species>.csv` per sample plus `times.csv` mapping the
/// index to the sample time.
fn write_snapshots(traj: &Trajectory, dir: &Path) -> CliResult<()> {
    ensure_dir(dir)?;
    for (k, state) in traj.snapshots.iter().enumerate() {
        for (name, field) in SPECIES.iter().zip(state.densities()) {
            write_atomic(&dir.join(format!("{k:05}_{name}.csv")), |w| field.write_csv(w))?;
        }
    }
    write_atomic(&dir.join("times.csv"), |w| {
        writeln!(w, "index,t")?;
        for (k, state) in traj.snapshots.iter().enumerate() {
            writeln!(w, "{k},{}", alarmtaxis::grid::fmt_f64(state.t))?;
        }
        Ok(())
    })
}
