//! Initial data builders.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Domain, Field};
use crate::model::Triple;
use crate::stepper::SimState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialCondition {
    Constant {
        u: f64,
        v: f64,
        w: f64,
    },
    /// `s*(1 + ε r)` per cell and species with `r` uniform on `[-1, 1]`.
    PerturbedSteady { epsilon: f64 },
    /// `base + amplitude·exp(-|x - center|²/(2 width²))`.
    GaussianBump {
        base: Triple,
        amplitude: Triple,
        center: [f64; 2],
        width: f64,
    },
    /// `inside` on the box `[lo, hi]` (cell centers), `outside` elsewhere.
    Indicator {
        inside: Triple,
        outside: Triple,
        lo: [f64; 2],
        hi: [f64; 2],
    },
    /// Field CSVs as written by [`Field::write_csv`].
    FromFile { u: PathBuf, v: PathBuf, w: PathBuf },
}

fn nonnegative_triple(name: &'static str, t: &Triple) -> Result<()> {
    if t.is_finite() && t.u >= 0.0 && t.v >= 0.0 && t.w >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and >= 0, got ({}, {}, {})", t.u, t.v, t.w),
        })
    }
}

impl InitialCondition {
    /// Whether building needs a reference steady state.
    pub fn needs_steady_state(&self) -> bool {
        matches!(self, InitialCondition::PerturbedSteady { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InitialCondition::Constant { u, v, w } => nonnegative_triple("initial", &Triple::new(*u, *v, *w)),
            InitialCondition::PerturbedSteady { epsilon } => {
                if *epsilon >= 0.0 && *epsilon < 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter {
                        name: "epsilon",
                        reason: format!("must lie in [0, 1), got {epsilon}"),
                    })
                }
            }
            InitialCondition::GaussianBump {
                base,
                amplitude,
                center,
                width,
            } => {
                nonnegative_triple("base", base)?;
                nonnegative_triple("amplitude", amplitude)?;
                if !(center[0].is_finite() && center[1].is_finite()) {
                    return Err(Error::InvalidParameter {
                        name: "center",
                        reason: "must be finite".into(),
                    });
                }
                if !(*width > 0.0 && width.is_finite()) {
                    return Err(Error::InvalidParameter {
                        name: "width",
                        reason: format!("must be finite and > 0, got {width}"),
                    });
                }
                Ok(())
            }
            InitialCondition::Indicator { inside, outside, lo, hi } => {
                nonnegative_triple("inside", inside)?;
                nonnegative_triple("outside", outside)?;
                if !(lo[0] <= hi[0] && lo[1] <= hi[1]) {
                    return Err(Error::InvalidParameter {
                        name: "lo",
                        reason: "box corners must satisfy lo <= hi".into(),
                    });
                }
                Ok(())
            }
            InitialCondition::FromFile { .. } => Ok(()),
        }
    }

    /// Builds the state at `t = 0`. Perturbed steady data is anchored at the
    /// steady state, so its perturbation is held exactly.
    pub fn build(&self, domain: Domain, steady: Option<Triple>, seed: u64) -> Result<SimState> {
        self.validate()?;
        match self {
            InitialCondition::Constant { u, v, w } => Ok(SimState::homogeneous(domain, 0.0, Triple::new(*u, *v, *w))),
            InitialCondition::PerturbedSteady { epsilon } => {
                let star = steady.ok_or_else(|| {
                    Error::Inapplicable("perturbed-steady data needs a reference steady state".into())
                })?;
                nonnegative_triple("reference", &star)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let n = domain.len();
                let [du, dv, dw] = star.as_array().map(|s| {
                    let values = (0..n).map(|_| s * epsilon * rng.gen_range(-1.0..=1.0)).collect();
                    Field::new(domain, values)
                });
                SimState::anchored(0.0, star, du?, dv?, dw?)
            }
            InitialCondition::GaussianBump {
                base,
                amplitude,
                center,
                width,
            } => {
                let two_w2 = 2.0 * width * width;
                let profile = |x: f64, y: f64| {
                    let dy = if domain.dim() == 1 { 0.0 } else { y - center[1] };
                    (-((x - center[0]).powi(2) + dy * dy) / two_w2).exp()
                };
                let u = Field::from_fn(domain, |x, y| base.u + amplitude.u * profile(x, y))?;
                let v = Field::from_fn(domain, |x, y| base.v + amplitude.v * profile(x, y))?;
                let w = Field::from_fn(domain, |x, y| base.w + amplitude.w * profile(x, y))?;
                SimState::new(0.0, u, v, w)
            }
            InitialCondition::Indicator { inside, outside, lo, hi } => {
                let is_inside = |x: f64, y: f64| {
                    x >= lo[0] && x <= hi[0] && (domain.dim() == 1 || (y >= lo[1] && y <= hi[1]))
                };
                let pick = |x: f64, y: f64, a: f64, b: f64| if is_inside(x, y) { a } else { b };
                let u = Field::from_fn(domain, |x, y| pick(x, y, inside.u, outside.u))?;
                let v = Field::from_fn(domain, |x, y| pick(x, y, inside.v, outside.v))?;
                let w = Field::from_fn(domain, |x, y| pick(x, y, inside.w, outside.w))?;
                SimState::new(0.0, u, v, w)
            }
            InitialCondition::FromFile { u, v, w } => {
                let read = |path: &PathBuf| -> Result<Field> {
                    let file = File::open(path)
                        .map_err(|e| Error::Domain(format!("cannot open {}: {e}", path.display())))?;
                    Field::read_csv(domain, BufReader::new(file))
                };
                SimState::new(0.0, read(u)?, read(v)?, read(w)?)
            }
        }
    }
}
