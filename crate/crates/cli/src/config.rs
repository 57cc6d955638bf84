//! Run and sweep configuration files (TOML).

use std::fs;
use std::path::{Path, PathBuf};

use alarmtaxis::diagnostics::CSV_COLUMNS;
use alarmtaxis::{
    BoundsConfig, Domain, InitialCondition, ModelParams, SimState, SteadySelector, StepControl,
    Triple,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    #[serde(default = "default_dim")]
    pub dim: usize,
    pub lx: f64,
    pub nx: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ly: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
}

fn default_dim() -> usize {
    1
}

impl DomainSpec {
    pub fn build(&self) -> CliResult<Domain> {
        let domain = match (self.dim, self.ly, self.ny) {
            (1, None, None) => Domain::interval(self.lx, self.nx),
            (1, _, _) => {
                return Err(CliError::Config(
                    "`domain.ly` and `domain.ny` are only allowed with dim = 2".into(),
                ))
            }
            (2, Some(ly), Some(ny)) => Domain::rectangle(self.lx, ly, self.nx, ny),
            (2, _, _) => {
                return Err(CliError::Config(
                    "`domain.ly` and `domain.ny` are required with dim = 2".into(),
                ))
            }
            (d, _, _) => return Err(CliError::Config(format!("`domain.dim` must be 1 or 2, got {d}"))),
        };
        domain.map_err(|e| CliError::from_core("domain", e))
    }
}

/// Decay fit reported with a run: `column ≈ C·exp(-σ t)` over `window`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    #[serde(default = "default_fit_column")]
    pub column: String,
    pub window: [f64; 2],
}

fn default_fit_column() -> String {
    "dev_Linf_u".into()
}

impl FitSpec {
    pub fn validate(&self) -> CliResult<()> {
        if self.column == "t" || !CSV_COLUMNS.contains(&self.column.as_str()) {
            return Err(CliError::Config(format!(
                "`fit.column`: unknown diagnostics column `{}`",
                self.column
            )));
        }
        let [lo, hi] = self.window;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(CliError::Config(format!("`fit.window`: need lo < hi, got [{lo}, {hi}]")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub t_end: f64,
    #[serde(default = "default_sample_every")]
    pub sample_every: f64,
    /// Seed for randomized initial perturbations.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Write the full state at every sample time.
    #[serde(default)]
    pub snapshots: bool,
    pub domain: DomainSpec,
    #[serde(default)]
    pub params: ModelParams,
    #[serde(default)]
    pub control: StepControl,
    pub initial: InitialCondition,
    #[serde(default)]
    pub reference: SteadySelector,
    #[serde(default)]
    pub bounds: BoundsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSpec>,
}

fn default_sample_every() -> f64 {
    1.0
}

/// A validated config turned into solver inputs.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub reference: Option<Triple>,
    pub initial: SimState,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("run config serializes to toml")
    }

    /// Reads and validates `path`; relative file paths inside the config are
    /// taken relative to the config's directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        if let Some(dir) = path.parent() {
            cfg.rebase_paths(dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn rebase_paths(&mut self, dir: &Path) {
        if let InitialCondition::FromFile { u, v, w } = &mut self.initial {
            for p in [u, v, w] {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(CliError::Config(format!(
                "`t_end`: must be finite and >= 0, got {}",
                self.t_end
            )));
        }
        if !(self.sample_every.is_finite() && self.sample_every > 0.0) {
            return Err(CliError::Config(format!(
                "`sample_every`: must be finite and > 0, got {}",
                self.sample_every
            )));
        }
        self.domain.build()?;
        self.params.validate().map_err(|e| CliError::from_core("params", e))?;
        self.control.validate().map_err(|e| CliError::from_core("control", e))?;
        self.initial.validate().map_err(|e| CliError::from_core("initial", e))?;
        let b = &self.bounds;
        for (name, value) in [
            ("burn_in", b.burn_in),
            ("limsup_slack", b.limsup_slack),
            ("sup_tolerance", b.sup_tolerance),
            ("lower_bound_tolerance", b.lower_bound_tolerance),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(CliError::Config(format!(
                    "`bounds.{name}`: must be finite and >= 0, got {value}"
                )));
            }
        }
        if let Some(fit) = &self.fit {
            fit.validate()?;
        }
        Ok(())
    }

    /// Resolves the reference state and builds the initial data.
    pub fn prepare(&self) -> CliResult<Prepared> {
        self.validate()?;
        let domain = self.domain.build()?;
        let reference = self
            .reference
            .resolve_optional(&self.params)
            .map_err(|e| CliError::from_core("reference", e))?;
        let initial = self
            .initial
            .build(domain, reference, self.seed)
            .map_err(|e| CliError::from_core("initial", e))?;
        Ok(Prepared {
            reference,
            initial,
        })
    }
}

/// One swept key and its values, e.g. `key = "params.xi"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub key: String,
    pub values: Vec<toml::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axes: Vec<Axis>,
    pub base: toml::Table,
}

/// One point of a sweep: the axis values and the resulting run config.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub index: usize,
    pub values: Vec<toml::Value>,
    pub config: RunConfig,
}

impl SweepConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let cfg: SweepConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    /// Every combination of axis values, last axis varying fastest. Keys and
    /// value types are checked here; parameter ranges are checked per point.
    pub fn points(&self, config_dir: Option<&Path>) -> CliResult<Vec<SweepPoint>> {
        if self.axes.is_empty() {
            return Err(CliError::Config("`axes`: at least one axis is required".into()));
        }
        for (i, axis) in self.axes.iter().enumerate() {
            if axis.values.is_empty() {
                return Err(CliError::Config(format!("`axes[{i}].values` is empty")));
            }
            if self.axes[..i].iter().any(|a| a.key == axis.key) {
                return Err(CliError::Config(format!("`axes[{i}].key`: `{}` appears twice", axis.key)));
            }
        }
        let total: usize = self.axes.iter().map(|a| a.values.len()).product();
        let mut points = Vec::with_capacity(total);
        for index in 0..total {
            let mut rem = index;
            let mut values = vec![toml::Value::Boolean(false); self.axes.len()];
            for (k, axis) in self.axes.iter().enumerate().rev() {
                values[k] = axis.values[rem % axis.values.len()].clone();
                rem /= axis.values.len();
            }
            let mut table = self.base.clone();
            for (axis, value) in self.axes.iter().zip(&values) {
                set_key(&mut table, &axis.key, value.clone())?;
            }
            let mut config: RunConfig = toml::Value::Table(table)
                .try_into()
                .map_err(|e| CliError::Config(format!("sweep point {index}: {e}")))?;
            if let Some(dir) = config_dir {
                config.rebase_paths(dir);
            }
            points.push(SweepPoint { index, values, config });
        }
        Ok(points)
    }
}

/// Sets a dotted key such as `params.xi`, creating intermediate tables.
fn set_key(table: &mut toml::Table, key: &str, value: toml::Value) -> CliResult<()> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("axis key `{key}` is malformed")));
    }
    let (last, path) = parts.split_last().expect("split yields at least one part");
    let mut cur = table;
    for part in path {
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("axis key `{key}`: `{part}` is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}
