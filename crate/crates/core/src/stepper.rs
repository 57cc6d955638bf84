//! Explicit, positivity-preserving time stepping.
//!
//! Each step is a single forward-Euler update of diffusion (mirrored-ghost
//! stencil), donor-cell taxis fluxes and kinetics. The step size is the
//! smallest of a diffusion, an advection and a per-capita reaction limit.
//!
//! A [`SimState`] stores every species as `anchor + offset`, where the anchor
//! is a constant triple. Anchoring at the reference steady state keeps
//! deviations that have decayed far below `f64` resolution of the densities
//! themselves fully resolved; all spatial operators only see offsets, and the
//! kinetics are evaluated as exact differences about the anchor.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{DiagnosticsRecord, Recorder};
use crate::error::{Error, Result};
use crate::grid::{laplacian_into, upwind_divergence_into, Domain, FaceVelocity, Field};
use crate::model::{per_capita_rates, ModelParams, Triple};

pub const SPECIES: [&str; 3] = ["u", "v", "w"];

/// Per-capita anchor rates at or below this magnitude are treated as an exact equilibrium.
pub const EQUILIBRIUM_SNAP: f64 = 1e-12;

/// Densities `(u, v, w)` on a shared domain at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    anchor: Triple,
    offsets: [Field; 3],
}

impl SimState {
    /// State from absolute densities.
    pub fn new(t: f64, u: Field, v: Field, w: Field) -> Result<Self> {
        Self::anchored(t, Triple::ZERO, u, v, w)
    }

    /// State `anchor + offset`; the resulting densities must be nonnegative.
    pub fn anchored(t: f64, anchor: Triple, du: Field, dv: Field, dw: Field) -> Result<Self> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
        }
        if !anchor.is_finite() {
            return Err(Error::NonFinite("state anchor".into()));
        }
        if du.domain() != dv.domain() || du.domain() != dw.domain() {
            return Err(Error::Domain("u, v, w must share one domain".into()));
        }
        let state = Self {
            t,
            anchor,
            offsets: [du, dv, dw],
        };
        let a = anchor.as_array();
        for s in 0..3 {
            for (k, &d) in state.offsets[s].values().iter().enumerate() {
                if !d.is_finite() {
                    return Err(Error::NonFinite(format!("{} at cell {k}", SPECIES[s])));
                }
                let value = a[s] + d;
                if value < 0.0 {
                    return Err(Error::Domain(format!(
                        "initial {} is negative ({value}) at cell {k}",
                        SPECIES[s]
                    )));
                }
            }
        }
        Ok(state)
    }

    /// Spatially constant state.
    pub fn homogeneous(domain: Domain, t: f64, value: Triple) -> Self {
        Self {
            t,
            anchor: value,
            offsets: [Field::zeros(domain), Field::zeros(domain), Field::zeros(domain)],
        }
    }

    pub fn domain(&self) -> &Domain {
        self.offsets[0].domain()
    }

    pub fn anchor(&self) -> Triple {
        self.anchor
    }

    pub fn offsets(&self) -> &[Field; 3] {
        &self.offsets
    }

    /// Same densities re-expressed about a different anchor.
    pub fn reanchored(&self, anchor: Triple) -> SimState {
        let old = self.anchor.as_array();
        let new = anchor.as_array();
        let offsets = std::array::from_fn(|s| {
            let shift = old[s] - new[s];
            if shift == 0.0 {
                self.offsets[s].clone()
            } else {
                self.offsets[s].map(|d| d + shift)
            }
        });
        SimState {
            t: self.t,
            anchor,
            offsets,
        }
    }

    fn absolute(&self, s: usize) -> Field {
        let a = self.anchor.as_array()[s];
        self.offsets[s].map(|d| a + d)
    }

    pub fn u(&self) -> Field {
        self.absolute(0)
    }
    pub fn v(&self) -> Field {
        self.absolute(1)
    }
    pub fn w(&self) -> Field {
        self.absolute(2)
    }

    /// Absolute densities of all three species.
    pub fn densities(&self) -> [Field; 3] {
        [self.u(), self.v(), self.w()]
    }

    pub fn is_finite(&self) -> bool {
        self.offsets
            .iter()
            .all(|f| f.values().iter().all(|x| x.is_finite()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepControl {
    /// Fraction of the stability limit actually used, in `(0, 1]`.
    pub cfl_safety: f64,
    pub dt_max: f64,
    /// Negative values down to `-clip_epsilon` are roundoff and clamped to 0.
    pub clip_epsilon: f64,
    /// Largest fraction of a density the kinetics may remove in one step.
    pub reaction_rate_cap: f64,
    /// With `false` every step uses `dt_max` regardless of stability.
    pub enforce_cfl: bool,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            cfl_safety: 0.9,
            dt_max: 0.1,
            clip_epsilon: 1e-13,
            reaction_rate_cap: 0.5,
            enforce_cfl: true,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "cfl_safety",
                reason: format!("must lie in (0, 1], got {}", self.cfl_safety),
            });
        }
        if !(self.dt_max > 0.0 && self.dt_max.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt_max",
                reason: format!("must be finite and > 0, got {}", self.dt_max),
            });
        }
        if !(self.clip_epsilon >= 0.0 && self.clip_epsilon.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "clip_epsilon",
                reason: format!("must be finite and >= 0, got {}", self.clip_epsilon),
            });
        }
        if !(self.reaction_rate_cap > 0.0 && self.reaction_rate_cap < 1.0) {
            return Err(Error::InvalidParameter {
                name: "reaction_rate_cap",
                reason: format!("must lie in (0, 1), got {}", self.reaction_rate_cap),
            });
        }
        Ok(())
    }
}

/// The three step-size limits before the safety factor and `dt_max` apply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtLimits {
    pub diffusion: f64,
    pub advection: f64,
    pub reaction: f64,
}

impl DtLimits {
    pub fn min(&self) -> f64 {
        self.diffusion.min(self.advection).min(self.reaction)
    }
}

/// Anchor data reused across steps.
#[derive(Debug, Clone, Copy)]
struct AnchorRates {
    anchor: Triple,
    base: Triple,
}

impl AnchorRates {
    fn new(anchor: Triple, p: &ModelParams) -> Self {
        let mut base = per_capita_rates(anchor.u, anchor.v, anchor.w, p);
        for r in [&mut base.u, &mut base.v, &mut base.w] {
            if r.abs() <= EQUILIBRIUM_SNAP {
                *r = 0.0;
            }
        }
        Self { anchor, base }
    }

    /// Per-capita rates at `anchor + offset`, as exact differences about the anchor.
    #[inline]
    fn rates(&self, d: [f64; 3], abs: [f64; 3], p: &ModelParams) -> [f64; 3] {
        let a = self.anchor;
        if a == Triple::ZERO {
            return per_capita_rates(abs[0], abs[1], abs[2], p).as_array();
        }
        let a_sum = a.u + a.w;
        let s = abs[0] + abs[2];
        // change of w/(u+w); the change of u/(u+w) is its negative unless u+w hits 0
        let (share_w, share_u) = if a_sum > 0.0 {
            if s > 0.0 {
                let dw_share = (a.u * d[2] - a.w * d[0]) / (s * a_sum);
                (dw_share, -dw_share)
            } else {
                (-a.w / a_sum, -a.u / a_sum)
            }
        } else if s > 0.0 {
            (abs[2] / s, abs[0] / s)
        } else {
            (0.0, 0.0)
        };
        [
            self.base.u - p.mu1 * d[0] - p.b1 * d[1] - p.b3 * share_w,
            self.base.v - p.mu2 * d[1] + d[0] - p.b2 * d[2],
            self.base.w - p.mu3 * d[2] + d[1] + p.c3 * share_u,
        ]
    }
}

/// Reusable work buffers for stepping one domain.
#[derive(Debug, Clone)]
pub struct Stepper {
    params: ModelParams,
    control: StepControl,
    domain: Domain,
    anchor: AnchorRates,
    abs: [Vec<f64>; 3],
    rates: [Vec<f64>; 3],
    lap: Vec<f64>,
    div: Vec<f64>,
    psi: Vec<f64>,
    vel_v: FaceVelocity,
    vel_w: FaceVelocity,
}

impl Stepper {
    pub fn new(domain: Domain, params: ModelParams, control: StepControl) -> Result<Self> {
        params.validate()?;
        control.validate()?;
        let n = domain.len();
        Ok(Self {
            params,
            control,
            domain,
            anchor: AnchorRates::new(Triple::ZERO, &params),
            abs: std::array::from_fn(|_| vec![0.0; n]),
            rates: std::array::from_fn(|_| vec![0.0; n]),
            lap: vec![0.0; n],
            div: vec![0.0; n],
            psi: vec![0.0; n],
            vel_v: FaceVelocity::zeros(domain),
            vel_w: FaceVelocity::zeros(domain),
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn control(&self) -> &StepControl {
        &self.control
    }

    /// Fills densities, face velocities and per-capita rates; returns the step limits.
    fn prepare(&mut self, state: &SimState) -> Result<DtLimits> {
        if state.domain() != &self.domain {
            return Err(Error::Domain("state does not live on the stepper's domain".into()));
        }
        if self.anchor.anchor != state.anchor {
            self.anchor = AnchorRates::new(state.anchor, &self.params);
        }
        let a = state.anchor.as_array();
        let off = [
            state.offsets[0].values(),
            state.offsets[1].values(),
            state.offsets[2].values(),
        ];
        for s in 0..3 {
            for (k, (dst, &d)) in self.abs[s].iter_mut().zip(off[s]).enumerate() {
                if !d.is_finite() {
                    return Err(Error::NonFinite(format!(
                        "{} at cell {k}, t = {}",
                        SPECIES[s], state.t
                    )));
                }
                *dst = a[s] + d;
            }
        }

        let p = self.params;
        if p.xi != 0.0 {
            self.vel_v.set_from_potential(off[0], p.xi);
        }
        if p.chi != 0.0 {
            // uv - a_u a_v, whose differences equal those of uv without cancellation
            for k in 0..self.domain.len() {
                let (du, dv) = (off[0][k], off[1][k]);
                self.psi[k] = a[0] * dv + a[1] * du + du * dv;
            }
            self.vel_w.set_from_potential(&self.psi, p.chi);
        }

        let mut max_decay = 0.0f64;
        for k in 0..self.domain.len() {
            let d = [off[0][k], off[1][k], off[2][k]];
            let abs = [self.abs[0][k], self.abs[1][k], self.abs[2][k]];
            let r = self.anchor.rates(d, abs, &p);
            for s in 0..3 {
                self.rates[s][k] = r[s];
                max_decay = max_decay.max(-r[s]);
            }
        }

        let diffusion = 1.0 / (2.0 * p.max_diffusion() * self.domain.inverse_h2_sum());
        let v_max = {
            let mut m = 0.0f64;
            if p.xi != 0.0 {
                m = m.max(self.vel_v.max_speed());
            }
            if p.chi != 0.0 {
                m = m.max(self.vel_w.max_speed());
            }
            m
        };
        let advection = if v_max > 0.0 {
            self.domain.h_min() / (2.0 * v_max)
        } else {
            f64::INFINITY
        };
        let reaction = if max_decay > 0.0 {
            self.control.reaction_rate_cap / max_decay
        } else {
            f64::INFINITY
        };
        if !(advection > 0.0 && reaction > 0.0) {
            return Err(Error::NonFinite(format!("step limits at t = {}", state.t)));
        }
        Ok(DtLimits {
            diffusion,
            advection,
            reaction,
        })
    }

    fn choose_dt(&self, limits: &DtLimits) -> f64 {
        if self.control.enforce_cfl {
            (self.control.cfl_safety * limits.min()).min(self.control.dt_max)
        } else {
            self.control.dt_max
        }
    }

    /// Step size the next call to [`Stepper::step`] would use.
    pub fn stable_dt(&mut self, state: &SimState) -> Result<f64> {
        let limits = self.prepare(state)?;
        Ok(self.choose_dt(&limits))
    }

    pub fn limits(&mut self, state: &SimState) -> Result<DtLimits> {
        self.prepare(state)
    }

    /// Advances `state` in place by one step no longer than `max_dt`; returns the step taken.
    pub fn step(&mut self, state: &mut SimState, max_dt: f64) -> Result<f64> {
        let limits = self.prepare(state)?;
        let dt = self.choose_dt(&limits).min(max_dt);
        if !(dt > 0.0) {
            return Err(Error::Domain(format!("non-positive step {dt}")));
        }
        let p = self.params;
        let diffusivity = [p.d1, p.d2, p.d3];
        let a = state.anchor.as_array();
        let t_new = state.t + dt;
        for s in 0..3 {
            laplacian_into(&self.domain, state.offsets[s].values(), diffusivity[s], &mut self.lap);
            let advected = match s {
                1 if p.xi != 0.0 => Some(&self.vel_v),
                2 if p.chi != 0.0 => Some(&self.vel_w),
                _ => None,
            };
            if let Some(vel) = advected {
                upwind_divergence_into(&self.abs[s], vel, &mut self.div);
            } else {
                self.div.fill(0.0);
            }
            let clip = self.control.clip_epsilon;
            let values = state.offsets[s].values_mut();
            for k in 0..values.len() {
                let reaction = self.abs[s][k] * self.rates[s][k];
                let next = values[k] + dt * (self.lap[k] - self.div[k] + reaction);
                let density = a[s] + next;
                if density < 0.0 {
                    if density < -clip || !density.is_finite() {
                        return Err(Error::PositivityViolation {
                            species: SPECIES[s],
                            cell: k,
                            t: t_new,
                            value: density,
                        });
                    }
                    values[k] = -a[s];
                } else if !next.is_finite() {
                    return Err(Error::NonFinite(format!("{} at cell {k}, t = {t_new}", SPECIES[s])));
                } else {
                    values[k] = next;
                }
            }
        }
        state.t = t_new;
        Ok(dt)
    }
}

/// Step size chosen for `state`: `cfl_safety · min(diffusion, advection,
/// reaction)` capped by `dt_max`.
pub fn stable_dt(state: &SimState, p: &ModelParams, c: &StepControl) -> Result<f64> {
    Stepper::new(*state.domain(), *p, *c)?.stable_dt(state)
}

/// One unconstrained step.
pub fn step(state: &SimState, p: &ModelParams, c: &StepControl) -> Result<SimState> {
    let mut next = state.clone();
    Stepper::new(*state.domain(), *p, *c)?.step(&mut next, f64::INFINITY)?;
    Ok(next)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub t_end: f64,
    pub sample_every: f64,
    /// Steady state for the Lyapunov diagnostics; also becomes the state anchor.
    pub reference: Option<Triple>,
    pub keep_snapshots: bool,
}

impl RunOptions {
    pub fn new(t_end: f64, sample_every: f64) -> Self {
        Self {
            t_end,
            sample_every,
            reference: None,
            keep_snapshots: false,
        }
    }

    pub fn with_reference(mut self, reference: Triple) -> Self {
        self.reference = Some(reference);
        self
    }

    pub fn with_snapshots(mut self) -> Self {
        self.keep_snapshots = true;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub final_state: SimState,
    pub records: Vec<DiagnosticsRecord>,
    /// States at every sample time, when requested.
    pub snapshots: Vec<SimState>,
    pub steps: usize,
}

/// Blow-up guard factor on `max(1, ‖u0‖∞)`.
pub const BLOW_UP_FACTOR: f64 = 10.0;

/// Integrates from `initial` to `t_end`, recording diagnostics at
/// `initial.t + k·sample_every` and at `t_end`.
pub fn run(
    initial: &SimState,
    p: &ModelParams,
    c: &StepControl,
    opts: &RunOptions,
) -> Result<Trajectory> {
    if !(opts.t_end >= initial.t) || !opts.t_end.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t_end",
            reason: format!("must be finite and >= initial time {}, got {}", initial.t, opts.t_end),
        });
    }
    if !(opts.sample_every > 0.0 && opts.sample_every.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "sample_every",
            reason: format!("must be finite and > 0, got {}", opts.sample_every),
        });
    }
    if let Some(r) = &opts.reference {
        if !(r.is_finite() && r.u >= 0.0 && r.v >= 0.0 && r.w >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "reference",
                reason: format!("must be a finite nonnegative triple, got {r:?}"),
            });
        }
    }
    let mut stepper = Stepper::new(*initial.domain(), *p, *c)?;
    let recorder = Recorder::new(initial, p, opts.reference);
    let blow_up_limit = BLOW_UP_FACTOR * 1.0f64.max(initial.u().max());

    let mut state = match opts.reference {
        Some(r) => initial.reanchored(r),
        None => initial.clone(),
    };
    let t0 = state.t;
    let mut records = vec![recorder.record(&state)];
    let mut snapshots = Vec::new();
    if opts.keep_snapshots {
        snapshots.push(state.clone());
    }
    let mut steps = 0usize;
    let mut k = 1u64;
    while state.t < opts.t_end {
        let target = (t0 + k as f64 * opts.sample_every).min(opts.t_end);
        while state.t < target {
            let remaining = target - state.t;
            let dt = stepper.step(&mut state, remaining)?;
            steps += 1;
            if dt >= remaining || target - state.t <= 1e-12 * target.abs().max(1.0) {
                state.t = target;
            }
            let sup_u = state.offsets[0]
                .values()
                .iter()
                .fold(0.0f64, |m, d| m.max((state.anchor.u + d).abs()));
            if sup_u > blow_up_limit {
                return Err(Error::BlowUp {
                    t: state.t,
                    sup_u,
                    limit: blow_up_limit,
                });
            }
        }
        records.push(recorder.record(&state));
        if opts.keep_snapshots {
            snapshots.push(state.clone());
        }
        k += 1;
    }
    Ok(Trajectory {
        final_state: state,
        records,
        snapshots,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::reaction_terms;

    fn line(lx: f64, n: usize) -> Domain {
        Domain::interval(lx, n).unwrap()
    }

    #[test]
    fn diffusion_limit_governs_without_taxis() {
        let d = line(1.0, 10);
        let p = ModelParams {
            mu1: 1e-3,
            mu2: 1e-3,
            mu3: 1e-3,
            b1: 1e-3,
            b2: 1e-3,
            ..ModelParams::default()
        };
        let c = StepControl {
            cfl_safety: 1.0,
            ..StepControl::default()
        };
        let s = SimState::homogeneous(d, 0.0, Triple::new(0.5, 0.5, 0.5));
        let dt = stable_dt(&s, &p, &c).unwrap();
        assert!((dt - 0.005).abs() < 1e-15);
    }

    #[test]
    fn zero_state_and_dx_scaling() {
        let c = StepControl {
            cfl_safety: 1.0,
            dt_max: 1.0,
            ..StepControl::default()
        };
        let p = ModelParams::default();
        let s = SimState::homogeneous(line(1.0, 10), 0.0, Triple::ZERO);
        assert!((stable_dt(&s, &p, &c).unwrap() - 0.005).abs() < 1e-15);
        let coarse = SimState::homogeneous(line(2.0, 10), 0.0, Triple::ZERO);
        assert!((stable_dt(&coarse, &p, &c).unwrap() - 0.02).abs() < 1e-15);
        let capped = StepControl {
            dt_max: 1e-3,
            ..c
        };
        assert_eq!(stable_dt(&s, &p, &capped).unwrap(), 1e-3);
    }

    #[test]
    fn nan_state_is_rejected() {
        let d = line(1.0, 8);
        let mut s = SimState::homogeneous(d, 0.0, Triple::new(0.5, 0.5, 0.5));
        s.offsets[1].values_mut()[3] = f64::NAN;
        assert!(matches!(
            stable_dt(&s, &ModelParams::default(), &StepControl::default()),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn steady_state_is_fixed() {
        let d = line(1.0, 16);
        let p = ModelParams::food_chain(1.0, 1.0).with_taxis(0.3, 0.2);
        let star = Triple::new(2.0 / 3.0, 1.0 / 3.0, 4.0 / 3.0);
        let s = SimState::homogeneous(d, 0.0, star);
        let next = step(&s, &p, &StepControl::default()).unwrap();
        for (a, b) in next.densities().iter().zip(s.densities().iter()) {
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() < 1e-14);
            }
        }
        // the same triple carried as absolute values
        let abs = SimState::new(0.0, s.u(), s.v(), s.w()).unwrap();
        let next = step(&abs, &p, &StepControl::default()).unwrap();
        for (a, b) in next.densities().iter().zip(abs.densities().iter()) {
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_state_stays_zero() {
        let s = SimState::homogeneous(line(1.0, 8), 0.0, Triple::ZERO);
        let next = step(&s, &ModelParams::intraguild(0.1, 1.0, 0.1), &StepControl::default()).unwrap();
        assert!(next.densities().iter().all(|f| f.values().iter().all(|&x| x == 0.0)));
        assert!(next.t > 0.0);
    }

    #[test]
    fn homogeneous_step_is_kinetic_euler_step() {
        let d = line(1.0, 8);
        let p = ModelParams::intraguild(0.3, 0.9, 0.2);
        let x = Triple::new(0.4, 0.8, 1.1);
        let u = Field::constant(d, x.u);
        let v = Field::constant(d, x.v);
        let w = Field::constant(d, x.w);
        let s = SimState::new(0.0, u, v, w).unwrap();
        let c = StepControl::default();
        let dt = stable_dt(&s, &p, &c).unwrap();
        let next = step(&s, &p, &c).unwrap();
        let k = reaction_terms(x.u, x.v, x.w, &p).unwrap();
        let expect = [x.u + dt * k.f, x.v + dt * k.g, x.w + dt * k.h];
        for (field, e) in next.densities().iter().zip(expect) {
            for &val in field.values() {
                assert!((val - e).abs() <= 1e-15 * e.abs());
            }
        }
        assert!((next.t - dt).abs() < 1e-18);
    }

    #[test]
    fn anchored_and_absolute_states_agree() {
        let d = line(4.0, 32);
        let p = ModelParams::intraguild(0.05, 1.0, 0.05).with_taxis(0.4, 0.3);
        let u = Field::from_fn(d, |x, _| 0.8 + 0.2 * (x * 1.3).cos()).unwrap();
        let v = Field::from_fn(d, |x, _| 0.5 + 0.3 * (x * 0.7).sin()).unwrap();
        let w = Field::from_fn(d, |x, _| 1.2 + 0.1 * x).unwrap();
        let abs = SimState::new(0.0, u, v, w).unwrap();
        let anchored = abs.reanchored(Triple::new(0.9, 0.6, 1.5));
        let c = StepControl::default();
        let mut s1 = abs.clone();
        let mut s2 = anchored.clone();
        let mut st1 = Stepper::new(d, p, c).unwrap();
        let mut st2 = Stepper::new(d, p, c).unwrap();
        for _ in 0..200 {
            st1.step(&mut s1, 1e-3).unwrap();
            st2.step(&mut s2, 1e-3).unwrap();
        }
        for (a, b) in s1.densities().iter().zip(s2.densities().iter()) {
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() < 1e-12, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn aggressive_fixed_step_trips_positivity() {
        let d = line(1.0, 32);
        let p = ModelParams::default().with_taxis(5.0, 0.0);
        let u = Field::from_fn(d, |x, _| if x < 0.5 { 1.0 } else { 0.0 }).unwrap();
        let v = Field::constant(d, 0.5);
        let w = Field::constant(d, 0.5);
        let s = SimState::new(0.0, u, v, w).unwrap();
        let c = StepControl {
            enforce_cfl: false,
            dt_max: 0.05,
            ..StepControl::default()
        };
        let err = run(&s, &p, &c, &RunOptions::new(1.0, 0.5)).unwrap_err();
        assert!(matches!(err, Error::PositivityViolation { .. }), "{err:?}");
    }

    #[test]
    fn run_with_zero_duration() {
        let s = SimState::homogeneous(line(1.0, 8), 0.0, Triple::new(0.5, 0.5, 0.5));
        let traj = run(&s, &ModelParams::default(), &StepControl::default(), &RunOptions::new(0.0, 1.0)).unwrap();
        assert_eq!(traj.records.len(), 1);
        assert_eq!(traj.final_state, s);
        assert_eq!(traj.steps, 0);
    }

    #[test]
    fn run_samples_on_cadence() {
        let s = SimState::homogeneous(line(1.0, 8), 0.0, Triple::new(0.5, 0.5, 0.5));
        let traj = run(&s, &ModelParams::default(), &StepControl::default(), &RunOptions::new(1.05, 0.25)).unwrap();
        let times: Vec<f64> = traj.records.iter().map(|r| r.t).collect();
        assert_eq!(times, vec![0.0, 0.25, 0.5, 0.75, 1.0, 1.05]);
        assert_eq!(traj.final_state.t, 1.05);
    }

    #[test]
    fn invalid_run_options() {
        let s = SimState::homogeneous(line(1.0, 8), 2.0, Triple::new(0.5, 0.5, 0.5));
        let p = ModelParams::default();
        let c = StepControl::default();
        assert!(run(&s, &p, &c, &RunOptions::new(1.0, 0.1)).is_err());
        assert!(run(&s, &p, &c, &RunOptions::new(3.0, 0.0)).is_err());
    }

    #[test]
    fn negative_initial_data_rejected() {
        let d = line(1.0, 8);
        let u = Field::constant(d, -0.1);
        assert!(SimState::new(0.0, u, Field::zeros(d), Field::zeros(d)).is_err());
    }
}
