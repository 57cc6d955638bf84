//! Model parameters, pointwise kinetics and taxis velocities.
//!
//! The system evolved by this crate is
//!
//! ```text
//! u_t = d1 Δu + μ1 u(1-u) - b1 uv - b3 uw/(u+w)
//! v_t = d2 Δv - ∇·(ξ v ∇u) + μ2 v(1-v) + uv - b2 vw
//! w_t = d3 Δw - ∇·(χ w ∇(uv)) + μ3 w(1-w) + vw + c3 uw/(u+w)
//! ```
//!
//! with zero-flux boundaries. `u` is the prey, `v` the primary predator and
//! `w` the secondary predator attracted by the encounter signal `uv`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Gradient;

/// A constant density triple `(u, v, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Triple {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl Triple {
    pub const ZERO: Triple = Triple {
        u: 0.0,
        v: 0.0,
        w: 0.0,
    };

    pub const fn new(u: f64, v: f64, w: f64) -> Self {
        Self { u, v, w }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.u, self.v, self.w]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite() && self.w.is_finite()
    }

    pub fn all_positive(&self) -> bool {
        self.u > 0.0 && self.v > 0.0 && self.w > 0.0
    }

    pub fn max_abs(&self) -> f64 {
        self.u.abs().max(self.v.abs()).max(self.w.abs())
    }
}

/// Diffusion, taxis and kinetic coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    pub d1: f64,
    pub d2: f64,
    /// Diffusion of `w`; 1 in the nondimensional system.
    pub d3: f64,
    /// Prey-taxis coefficient.
    pub xi: f64,
    /// Alarm-taxis coefficient.
    pub chi: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub c3: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            d1: 1.0,
            d2: 1.0,
            d3: 1.0,
            xi: 0.0,
            chi: 0.0,
            mu1: 1.0,
            mu2: 1.0,
            mu3: 1.0,
            b1: 1.0,
            b2: 1.0,
            b3: 0.0,
            c3: 0.0,
        }
    }
}

impl ModelParams {
    /// Normalized food-chain parameters (`μi = 1`, `b3 = c3 = 0`).
    pub fn food_chain(b1: f64, b2: f64) -> Self {
        Self {
            b1,
            b2,
            ..Self::default()
        }
    }

    /// Normalized intraguild parameters with `c3 = 1`.
    pub fn intraguild(b1: f64, b2: f64, b3: f64) -> Self {
        Self {
            b1,
            b2,
            b3,
            c3: 1.0,
            ..Self::default()
        }
    }

    pub fn with_taxis(mut self, xi: f64, chi: f64) -> Self {
        self.xi = xi;
        self.chi = chi;
        self
    }

    pub fn with_diffusion(mut self, d1: f64, d2: f64) -> Self {
        self.d1 = d1;
        self.d2 = d2;
        self
    }

    /// Checks every coefficient; the error names the first offending field.
    pub fn validate(&self) -> Result<()> {
        let strictly_positive = [
            ("d1", self.d1),
            ("d2", self.d2),
            ("d3", self.d3),
            ("mu1", self.mu1),
            ("mu2", self.mu2),
            ("mu3", self.mu3),
            ("b1", self.b1),
            ("b2", self.b2),
        ];
        for (name, value) in strictly_positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and > 0, got {value}"),
                });
            }
        }
        let nonnegative = [
            ("xi", self.xi),
            ("chi", self.chi),
            ("b3", self.b3),
            ("c3", self.c3),
        ];
        for (name, value) in nonnegative {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and >= 0, got {value}"),
                });
            }
        }
        Ok(())
    }

    /// `μ1 = μ2 = μ3 = 1`.
    pub fn is_normalized(&self) -> bool {
        self.mu1 == 1.0 && self.mu2 == 1.0 && self.mu3 == 1.0
    }

    pub fn is_food_chain(&self) -> bool {
        self.b3 == 0.0 && self.c3 == 0.0
    }

    pub fn max_diffusion(&self) -> f64 {
        self.d1.max(self.d2).max(self.d3)
    }
}

/// Ratio-dependent response `uw/(u+w)`, extended by 0 at the origin.
pub fn ratio_response(u: f64, w: f64) -> Result<f64> {
    if u < 0.0 || w < 0.0 || u.is_nan() || w.is_nan() {
        return Err(Error::Domain(format!(
            "ratio response needs u, w >= 0, got ({u}, {w})"
        )));
    }
    Ok(ratio_unchecked(u, w))
}

#[inline]
pub(crate) fn ratio_unchecked(u: f64, w: f64) -> f64 {
    let s = u + w;
    if s > 0.0 {
        u * w / s
    } else {
        0.0
    }
}

/// `w/(u+w)` with value 0 at the origin; the per-capita form of the ratio term.
#[inline]
pub(crate) fn ratio_share(num: f64, u: f64, w: f64) -> f64 {
    let s = u + w;
    if s > 0.0 {
        num / s
    } else {
        0.0
    }
}

/// Reaction rates at a point, both as totals and in multiplier form
/// `f = u·R_u`, `g = v·R_v`, `h = w·R_w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinetics {
    pub f: f64,
    pub g: f64,
    pub h: f64,
    pub rates: Triple,
}

/// Per-capita growth rates `(R_u, R_v, R_w)`.
#[inline]
pub fn per_capita_rates(u: f64, v: f64, w: f64, p: &ModelParams) -> Triple {
    Triple {
        u: p.mu1 * (1.0 - u) - p.b1 * v - p.b3 * ratio_share(w, u, w),
        v: p.mu2 * (1.0 - v) + u - p.b2 * w,
        w: p.mu3 * (1.0 - w) + v + p.c3 * ratio_share(u, u, w),
    }
}

pub fn reaction_terms(u: f64, v: f64, w: f64, p: &ModelParams) -> Result<Kinetics> {
    if u < 0.0 || v < 0.0 || w < 0.0 || u.is_nan() || v.is_nan() || w.is_nan() {
        return Err(Error::Domain(format!(
            "kinetics need nonnegative densities, got ({u}, {v}, {w})"
        )));
    }
    let f = p.mu1 * u * (1.0 - u) - p.b1 * u * v - p.b3 * ratio_unchecked(u, w);
    let g = p.mu2 * v * (1.0 - v) + u * v - p.b2 * v * w;
    let h = p.mu3 * w * (1.0 - w) + v * w + p.c3 * ratio_unchecked(u, w);
    Ok(Kinetics {
        f,
        g,
        h,
        rates: per_capita_rates(u, v, w, p),
    })
}

/// Velocity carried by `v`: `ξ ∇u`.
pub fn taxis_velocity_v(grad_u: &Gradient, p: &ModelParams) -> Gradient {
    grad_u.scaled(p.xi)
}

/// Velocity carried by `w`: `χ (v ∇u + u ∇v) = χ ∇(uv)`.
pub fn taxis_velocity_w(
    u: &[f64],
    v: &[f64],
    grad_u: &Gradient,
    grad_v: &Gradient,
    p: &ModelParams,
) -> Result<Gradient> {
    let n = grad_u.len();
    if u.len() != n || v.len() != n || grad_v.len() != n {
        return Err(Error::Domain(format!(
            "taxis velocity inputs disagree in length ({}, {}, {}, {})",
            u.len(),
            v.len(),
            n,
            grad_v.len()
        )));
    }
    if u.iter().chain(v).any(|&x| x < 0.0) {
        return Err(Error::Domain("taxis velocity needs nonnegative densities".into()));
    }
    let mut out = Gradient::zeros(n);
    for i in 0..n {
        out.x[i] = p.chi * (v[i] * grad_u.x[i] + u[i] * grad_v.x[i]);
        out.y[i] = p.chi * (v[i] * grad_u.y[i] + u[i] * grad_v.y[i]);
    }
    Ok(out)
}
