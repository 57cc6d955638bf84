//! Per-snapshot diagnostics: norms, the relative-entropy Lyapunov functional
//! and its quadratic dissipation, bound monitoring along trajectories, and
//! exponential decay-rate fitting.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{fmt_f64, gradient_centered, norms_of, Field};
use crate::model::{ModelParams, Triple};
use crate::stepper::SimState;

/// `x - ln(1 + x)` without cancellation for small `x`.
fn x_minus_log1p(x: f64) -> f64 {
    if x.abs() < 0.1 {
        // alternating series x²/2 - x³/3 + x⁴/4 - ...
        let mut sum = 0.0;
        let mut power = x * x;
        let mut k = 2.0;
        let mut sign = 1.0;
        loop {
            let term = sign * power / k;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() || k > 40.0 {
                break;
            }
            power *= x;
            k += 1.0;
            sign = -sign;
        }
        sum
    } else {
        x - x.ln_1p()
    }
}

/// Pointwise integrand `s - s* - s* ln(s/s*)`, evaluated from the deviation
/// `s - s*` so that tiny deviations keep full relative precision.
pub fn entropy_integrand_from_deviation(deviation: f64, s_star: f64) -> f64 {
    s_star * x_minus_log1p(deviation / s_star)
}

/// `∫ (s - s* - s* ln(s/s*))`; requires `s > 0` everywhere and `s* > 0`.
pub fn lyapunov_entropy(s: &Field, s_star: f64) -> Result<f64> {
    if !(s_star > 0.0 && s_star.is_finite()) {
        return Err(Error::Domain(format!("reference density must be > 0, got {s_star}")));
    }
    let mut total = 0.0;
    for (k, &value) in s.values().iter().enumerate() {
        if value <= 0.0 {
            return Err(Error::Domain(format!(
                "entropy needs a strictly positive density, cell {k} holds {value}"
            )));
        }
        total += entropy_integrand_from_deviation(value - s_star, s_star);
    }
    Ok(total * s.domain().cell_measure())
}

/// Deviations `s - s*` of each species, exact when the state is anchored at `steady`.
fn deviations(state: &SimState, steady: &Triple) -> [Vec<f64>; 3] {
    let anchor = state.anchor().as_array();
    let reference = steady.as_array();
    let offsets = state.offsets();
    std::array::from_fn(|s| {
        let shift = anchor[s] - reference[s];
        offsets[s].values().iter().map(|&d| shift + d).collect()
    })
}

/// The Lyapunov functional `Σ_s ∫ (s - s* - s* ln(s/s*))` about a positive
/// homogeneous steady state. Serves both the food-chain and the intraguild
/// coexistence states.
pub fn lyapunov_energy(state: &SimState, steady: &Triple) -> Result<f64> {
    if !steady.all_positive() {
        return Err(Error::Domain("energy needs a strictly positive steady state".into()));
    }
    let devs = deviations(state, steady);
    let stars = steady.as_array();
    let mut total = 0.0;
    for s in 0..3 {
        for (k, &d) in devs[s].iter().enumerate() {
            if stars[s] + d <= 0.0 {
                return Err(Error::Domain(format!(
                    "energy needs strictly positive densities, species {s} cell {k}"
                )));
            }
            total += entropy_integrand_from_deviation(d, stars[s]);
        }
    }
    Ok(total * state.domain().cell_measure())
}

/// `∫ (u-u*)² + (v-v*)² + (w-w*)²`.
pub fn dissipation(state: &SimState, steady: &Triple) -> f64 {
    let devs = deviations(state, steady);
    let sum: f64 = devs.iter().flatten().map(|d| d * d).sum();
    sum * state.domain().cell_measure()
}

/// `‖u-u*‖∞, ‖v-v*‖∞, ‖w-w*‖∞`.
pub fn deviation_linf(state: &SimState, steady: &Triple) -> Triple {
    let devs = deviations(state, steady);
    let sup = |v: &Vec<f64>| v.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    Triple::new(sup(&devs[0]), sup(&devs[1]), sup(&devs[2]))
}

/// Constants `(α1, α2)` with `α1·F ≤ E ≤ α2·F` once every density stays
/// within half of its steady value: `α1 = min 2/(9s*)`, `α2 = max 2/s*`.
pub fn sandwich_constants(steady: &Triple) -> (f64, f64) {
    let s = steady.as_array();
    let alpha1 = s.iter().map(|x| 2.0 / (9.0 * x)).fold(f64::INFINITY, f64::min);
    let alpha2 = s.iter().map(|x| 2.0 / x).fold(0.0, f64::max);
    (alpha1, alpha2)
}

/// True when `|s - s*| ≤ s*/2` in every cell for every species.
pub fn in_sandwich_regime(state: &SimState, steady: &Triple) -> bool {
    let stars = steady.as_array();
    deviations(state, steady)
        .iter()
        .zip(stars)
        .all(|(dev, star)| dev.iter().all(|d| d.abs() <= 0.5 * star))
}

/// Pointwise check of `2/(9s*)·(s-s*)² ≤ integrand ≤ 2/s*·(s-s*)²`.
pub fn pointwise_sandwich_holds(state: &SimState, steady: &Triple) -> bool {
    let stars = steady.as_array();
    deviations(state, steady).iter().zip(stars).all(|(dev, star)| {
        dev.iter().all(|&d| {
            let integrand = entropy_integrand_from_deviation(d, star);
            let q = d * d;
            let lo = 2.0 / (9.0 * star) * q;
            let hi = 2.0 / star * q;
            integrand >= lo * (1.0 - 1e-12) && integrand <= hi * (1.0 + 1e-12)
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    Pass,
    Fail,
    NotApplicable,
}

impl Flag {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Flag::Pass
        } else {
            Flag::Fail
        }
    }
}

/// Instantaneous bound checks attached to a record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordFlags {
    /// `‖u‖∞ ≤ max(1, ‖u0‖∞)`.
    pub sup_u: Flag,
    /// `‖v‖₁ ≤ K1`.
    pub l1_v: Flag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub linf_u: f64,
    pub linf_v: f64,
    pub linf_w: f64,
    pub l1_u: f64,
    pub l1_v: f64,
    pub l1_w: f64,
    pub l2_u: f64,
    pub l2_v: f64,
    pub l2_w: f64,
    pub grad_linf_u: f64,
    pub grad_linf_v: f64,
    pub min_u: f64,
    /// Lyapunov functional; absent without a reference or on non-positive states.
    pub energy: Option<f64>,
    pub dissipation: Option<f64>,
    pub deviation_linf: Option<Triple>,
    pub flags: RecordFlags,
}

/// Column order of the diagnostics CSV.
pub const CSV_COLUMNS: [&str; 16] = [
    "t",
    "Linf_u",
    "Linf_v",
    "Linf_w",
    "L1_v",
    "L1_w",
    "L2_u",
    "L2_v",
    "L2_w",
    "grad_Linf_u",
    "grad_Linf_v",
    "E",
    "F",
    "dev_Linf_u",
    "dev_Linf_v",
    "dev_Linf_w",
];

impl DiagnosticsRecord {
    /// Values in [`CSV_COLUMNS`] order; `None` marks an empty cell.
    pub fn csv_values(&self) -> [Option<f64>; 16] {
        let dev = self.deviation_linf;
        [
            Some(self.t),
            Some(self.linf_u),
            Some(self.linf_v),
            Some(self.linf_w),
            Some(self.l1_v),
            Some(self.l1_w),
            Some(self.l2_u),
            Some(self.l2_v),
            Some(self.l2_w),
            Some(self.grad_linf_u),
            Some(self.grad_linf_v),
            self.energy,
            self.dissipation,
            dev.map(|d| d.u),
            dev.map(|d| d.v),
            dev.map(|d| d.w),
        ]
    }

    /// Value of the named CSV column; `None` for unknown names or empty cells.
    pub fn column(&self, name: &str) -> Option<f64> {
        let k = CSV_COLUMNS.iter().position(|c| *c == name)?;
        self.csv_values()[k]
    }
}

pub fn write_records_csv<W: Write>(records: &[DiagnosticsRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{}", CSV_COLUMNS.join(","))?;
    for r in records {
        let cells: Vec<String> = r
            .csv_values()
            .iter()
            .map(|x| x.map(fmt_f64).unwrap_or_default())
            .collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// `K = max(1, ‖u0‖∞)`.
pub fn sup_bound_u(initial: &SimState) -> f64 {
    1.0f64.max(initial.u().max())
}

/// `K1 = ‖v0‖₁ + (μ2 + K + 1)²|Ω| / (2μ2)`.
pub fn l1_bound_v(initial: &SimState, p: &ModelParams) -> f64 {
    let k = sup_bound_u(initial);
    let v0 = norms_of(&initial.v().into_values(), initial.domain().cell_measure()).l1;
    v0 + (p.mu2 + k + 1.0).powi(2) * initial.domain().measure() / (2.0 * p.mu2)
}

/// Absolute tolerance on `‖u‖∞ ≤ K`.
pub const SUP_TOLERANCE: f64 = 1e-6;

/// Builds records for snapshots of one trajectory.
#[derive(Debug, Clone)]
pub struct Recorder {
    reference: Option<Triple>,
    k_sup: f64,
    k1: f64,
}

impl Recorder {
    pub fn new(initial: &SimState, p: &ModelParams, reference: Option<Triple>) -> Self {
        Self {
            reference,
            k_sup: sup_bound_u(initial),
            k1: l1_bound_v(initial, p),
        }
    }

    pub fn record(&self, state: &SimState) -> DiagnosticsRecord {
        let cell = state.domain().cell_measure();
        let [u, v, w] = [state.u(), state.v(), state.w()];
        let nu = norms_of(u.values(), cell);
        let nv = norms_of(v.values(), cell);
        let nw = norms_of(w.values(), cell);
        let (energy, dissipation_value, deviation) = match &self.reference {
            Some(r) => (
                lyapunov_energy(state, r).ok(),
                Some(dissipation(state, r)),
                Some(deviation_linf(state, r)),
            ),
            None => (None, None, None),
        };
        DiagnosticsRecord {
            t: state.t,
            linf_u: nu.linf,
            linf_v: nv.linf,
            linf_w: nw.linf,
            l1_u: nu.l1,
            l1_v: nv.l1,
            l1_w: nw.l1,
            l2_u: nu.l2,
            l2_v: nv.l2,
            l2_w: nw.l2,
            grad_linf_u: gradient_centered(&u).max_norm(),
            grad_linf_v: gradient_centered(&v).max_norm(),
            min_u: u.min(),
            energy,
            dissipation: dissipation_value,
            deviation_linf: deviation,
            flags: RecordFlags {
                sup_u: Flag::from_bool(nu.linf <= self.k_sup + SUP_TOLERANCE),
                l1_v: Flag::from_bool(nv.l1 <= self.k1),
            },
        }
    }
}

/// Tunables for [`check_bounds`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundsConfig {
    /// Samples before this time are excluded from the asymptotic checks.
    pub burn_in: f64,
    /// Slack on `limsup u ≤ 1`.
    pub limsup_slack: f64,
    pub sup_tolerance: f64,
    pub lower_bound_tolerance: f64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            burn_in: 100.0,
            limsup_slack: 0.01,
            sup_tolerance: SUP_TOLERANCE,
            lower_bound_tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub status: Flag,
    /// Smallest `bound - value` over checked samples (negative means violated).
    pub worst_margin: Option<f64>,
    pub samples_checked: usize,
    pub note: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub checks: Vec<BoundCheck>,
}

impl BoundReport {
    pub fn get(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn count(&self, status: Flag) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn all_passed(&self) -> bool {
        self.count(Flag::Fail) == 0
    }
}

fn margin_check<'a>(
    name: &str,
    note: String,
    samples: impl Iterator<Item = (&'a DiagnosticsRecord, f64)>,
) -> BoundCheck {
    let mut worst: Option<f64> = None;
    let mut n = 0;
    for (_, margin) in samples {
        n += 1;
        worst = Some(worst.map_or(margin, |w: f64| w.min(margin)));
    }
    let status = match worst {
        None => Flag::NotApplicable,
        Some(m) => Flag::from_bool(m >= 0.0),
    };
    BoundCheck {
        name: name.to_string(),
        status,
        worst_margin: worst,
        samples_checked: n,
        note,
    }
}

/// Checks the headline a-priori bounds along a recorded trajectory.
///
/// * `sup_u`: `‖u‖∞ ≤ max(1, ‖u0‖∞)` at every sample;
/// * `l1_v`: `‖v‖₁ ≤ K1` at every sample;
/// * `limsup_u`: `‖u‖∞ ≤ 1 + slack` for samples past the burn-in;
/// * `lower_bound_u`: `min u ≥ min(ū, 1 - b3 - b1 sup‖v‖∞)` past the burn-in,
///   when that bound is positive and `μ1 = 1`;
/// * `finite`: every recorded norm is finite.
pub fn check_bounds(
    records: &[DiagnosticsRecord],
    initial: &SimState,
    p: &ModelParams,
    cfg: &BoundsConfig,
) -> BoundReport {
    if records.is_empty() {
        return BoundReport::default();
    }
    let k_sup = sup_bound_u(initial);
    let k1 = l1_bound_v(initial, p);
    let mut checks = Vec::new();

    checks.push(margin_check(
        "sup_u",
        format!("K = {k_sup}, tolerance {}", cfg.sup_tolerance),
        records
            .iter()
            .map(|r| (r, k_sup + cfg.sup_tolerance - r.linf_u)),
    ));
    checks.push(margin_check(
        "l1_v",
        format!("K1 = {k1}"),
        records.iter().map(|r| (r, k1 - r.l1_v)),
    ));
    checks.push(margin_check(
        "limsup_u",
        format!("t >= {}, slack {}", cfg.burn_in, cfg.limsup_slack),
        records
            .iter()
            .filter(|r| r.t >= cfg.burn_in)
            .map(|r| (r, 1.0 + cfg.limsup_slack - r.linf_u)),
    ));

    let v_sup = records.iter().map(|r| r.linf_v).fold(0.0, f64::max);
    let floor = 1.0 - p.b3 - p.b1 * v_sup;
    let first_past = records.iter().find(|r| r.t >= cfg.burn_in);
    let lower = match first_past {
        Some(t0) if floor > 0.0 && p.mu1 == 1.0 => {
            let u_bar = t0.min_u;
            let bound = u_bar.min(floor);
            margin_check(
                "lower_bound_u",
                format!("u_bar = {u_bar} at t = {}, 1 - b3 - b1 sup v = {floor}", t0.t),
                records
                    .iter()
                    .filter(|r| r.t > t0.t)
                    .map(|r| (r, r.min_u - bound + cfg.lower_bound_tolerance)),
            )
        }
        _ => BoundCheck {
            name: "lower_bound_u".into(),
            status: Flag::NotApplicable,
            worst_margin: None,
            samples_checked: 0,
            note: format!("hypothesis 1 - b3 - b1 sup v = {floor} > 0 with mu1 = 1 not met or no samples past burn-in"),
        },
    };
    checks.push(lower);

    let all_finite = records.iter().all(|r| {
        [
            r.linf_u,
            r.linf_v,
            r.linf_w,
            r.l1_v,
            r.l1_w,
            r.l2_u,
            r.l2_v,
            r.l2_w,
            r.grad_linf_u,
            r.grad_linf_v,
        ]
        .iter()
        .all(|x| x.is_finite())
    });
    checks.push(BoundCheck {
        name: "finite".into(),
        status: Flag::from_bool(all_finite),
        worst_margin: None,
        samples_checked: records.len(),
        note: String::new(),
    });

    BoundReport { checks }
}

/// Result of fitting `value ≈ C·exp(-σ t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub sigma: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub r_squared: f64,
    pub samples: usize,
}

pub const MIN_FIT_SAMPLES: usize = 5;

/// Least-squares fit of `ln(value)` against `t` on samples with
/// `t_lo ≤ t ≤ t_hi`.
pub fn fit_decay_rate(series: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    let (lo, hi) = window;
    let mut pts = Vec::new();
    for &(t, value) in series.iter().filter(|(t, _)| *t >= lo && *t <= hi) {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::Domain(format!(
                "decay fit needs positive values, got {value} at t = {t}"
            )));
        }
        pts.push((t, value.ln()));
    }
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_SAMPLES,
            got: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let t_mean = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let y_mean = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for &(t, y) in &pts {
        let (dt, dy) = (t - t_mean, y - y_mean);
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if stt == 0.0 {
        return Err(Error::Degenerate("all samples share one time".into()));
    }
    let slope = sty / stt;
    let intercept = y_mean - slope * t_mean;
    let ss_res: f64 = pts
        .iter()
        .map(|&(t, y)| (y - intercept - slope * t).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(DecayFit {
        sigma: -slope,
        c: intercept.exp(),
        r_squared,
        samples: pts.len(),
    })
}
