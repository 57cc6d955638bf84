//! Spatially homogeneous steady states of the normalized system.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, Triple};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub label: String,
    pub u: f64,
    pub v: f64,
    pub w: f64,
    /// Every component strictly positive.
    pub positive: bool,
    /// False when the closed form has no real value for these parameters
    /// (components are then NaN).
    pub real: bool,
    /// Max-norm of the kinetics at the triple.
    pub residual: f64,
}

impl SteadyState {
    fn new(label: &str, t: Triple, p: &ModelParams) -> Self {
        let real = t.is_finite();
        Self {
            label: label.to_string(),
            u: t.u,
            v: t.v,
            w: t.w,
            positive: real && t.all_positive(),
            real,
            residual: if real { residual(&t, p) } else { f64::NAN },
        }
    }

    fn not_real(label: &str) -> Self {
        Self::new(label, Triple::new(f64::NAN, f64::NAN, f64::NAN), &ModelParams::default())
    }

    pub fn triple(&self) -> Triple {
        Triple::new(self.u, self.v, self.w)
    }
}

/// `max(|f|, |g|, |h|)` of the full kinetics at `t`.
///
/// Evaluated algebraically, so it is also defined for triples with negative
/// components (such as the second intraguild branch); the ratio term is taken
/// as 0 where `u + w = 0`.
pub fn residual(t: &Triple, p: &ModelParams) -> f64 {
    let (u, v, w) = (t.u, t.v, t.w);
    let s = u + w;
    let ratio = if s != 0.0 { u * w / s } else { 0.0 };
    let f = p.mu1 * u * (1.0 - u) - p.b1 * u * v - p.b3 * ratio;
    let g = p.mu2 * v * (1.0 - v) + u * v - p.b2 * v * w;
    let h = p.mu3 * w * (1.0 - w) + v * w + p.c3 * ratio;
    f.abs().max(g.abs()).max(h.abs())
}

fn check_nonnegative(name: &'static str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and >= 0, got {x}"),
        })
    }
}

/// Coexistence state of the food chain (`b3 = c3 = 0`):
/// `u* = (1+b1b2+b2-b1)/(1+b1+b2)`, `v* = (2-b2)/(1+b1+b2)`,
/// `w* = (3+b1)/(1+b1+b2)`.
pub fn coexistence_foodchain(b1: f64, b2: f64) -> Result<SteadyState> {
    check_nonnegative("b1", b1)?;
    check_nonnegative("b2", b2)?;
    let den = 1.0 + b1 + b2;
    let t = Triple::new(
        (1.0 + b1 * b2 + b2 - b1) / den,
        (2.0 - b2) / den,
        (3.0 + b1) / den,
    );
    let p = ModelParams {
        b1,
        b2,
        ..ModelParams::food_chain(1.0, 1.0)
    };
    Ok(SteadyState::new("coexistence-foodchain", t, &p))
}

/// Closed-form pieces of the two intraguild coexistence roots (`c3 = 1`).
///
/// Each component has the form `(base + sign·coef·√radicand) / den`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntraguildRoot {
    pub radicand: f64,
    pub den: f64,
    pub base: Triple,
    pub coef: Triple,
}

impl IntraguildRoot {
    pub fn new(b1: f64, b2: f64, b3: f64) -> Result<Self> {
        check_nonnegative("b1", b1)?;
        check_nonnegative("b2", b2)?;
        check_nonnegative("b3", b3)?;
        let radicand = 20.0 + 12.0 * b2 + b2 * b2 + 4.0 * b1 * b1 * (b2 * b2 - 1.0)
            + 4.0 * b1 * (3.0 + b2) * (b2 - b3)
            - 20.0 * b3
            - 14.0 * b2 * b3
            + b3 * b3;
        let den = 2.0 * (1.0 + b1 + b2) * (1.0 + b1 * (1.0 + b2) + (2.0 + b2) * b3);
        if den == 0.0 || !den.is_finite() {
            return Err(Error::Degenerate(format!("root denominator is {den}")));
        }
        let base = Triple::new(
            2.0 * b1 * b1 * (b2 * b2 - 1.0)
                + b1 * (b2 + 2.0) * (b2 - 3.0 * b3 + 2.0 * b2 * b3)
                + (1.0 + b2) * (2.0 + (b2 - 2.0) * b3 - b3 * b3),
            4.0 + 2.0 * b2 + b2 * b2 + 2.0 * b3
                - 4.0 * b2 * b3
                - 4.0 * b2 * b2 * b3
                - b3 * b3
                - 2.0 * b1 * (1.0 + b2) * (b2 + b3 - 2.0),
            2.0 + 4.0 * b1 + 2.0 * b1 * b1 - b2
                + 5.0 * b1 * b2
                + 2.0 * b1 * b1 * b2
                + 9.0 * b3
                + 5.0 * b1 * b3
                + 7.0 * b2 * b3
                + 2.0 * b1 * b2 * b3
                - b3 * b3,
        );
        let coef = Triple::new(b1 * b2 + b2 * b3 + b3, b3 - b2, 1.0 + b1 + b3);
        Ok(Self {
            radicand,
            den,
            base,
            coef,
        })
    }

    /// Branch for `sign = +1` (first) or `-1` (second).
    pub fn branch(&self, sign: f64) -> Result<Triple> {
        if self.radicand < 0.0 {
            return Err(Error::NoRealRoot {
                radicand: self.radicand,
            });
        }
        let r = self.radicand.sqrt();
        Ok(Triple::new(
            (self.base.u + sign * self.coef.u * r) / self.den,
            (self.base.v + sign * self.coef.v * r) / self.den,
            (self.base.w + sign * self.coef.w * r) / self.den,
        ))
    }
}

/// Both coexistence roots of the intraguild system with `c3 = 1`.
pub fn coexistence_intraguild(b1: f64, b2: f64, b3: f64) -> Result<(SteadyState, SteadyState)> {
    let root = IntraguildRoot::new(b1, b2, b3)?;
    let p = ModelParams {
        b1,
        b2,
        b3,
        ..ModelParams::intraguild(1.0, 1.0, 0.0)
    };
    Ok((
        SteadyState::new("coexistence-intraguild-branch1", root.branch(1.0)?, &p),
        SteadyState::new("coexistence-intraguild-branch2", root.branch(-1.0)?, &p),
    ))
}

/// Semi-trivial intraguild state without the middle species; needs `b3 ≤ 1`.
fn prey_secondary_intraguild(b3: f64) -> Triple {
    if b3 > 1.0 {
        return Triple::new(f64::NAN, f64::NAN, f64::NAN);
    }
    let s = (2.0 * (1.0 - b3)).sqrt();
    Triple::new(
        1.0 - 2.0 * b3 + (2.0 * b3 * b3 + b3 * s) / (1.0 + b3),
        0.0,
        (2.0 * b3 + s) / (1.0 + b3),
    )
}

/// The listed homogeneous steady states for the regime of `p`.
///
/// Supports the normalized system (`μ1 = μ2 = μ3 = 1`) in the food-chain
/// case `b3 = c3 = 0` and the intraguild case `c3 = 1`.
pub fn catalog(p: &ModelParams) -> Result<Vec<SteadyState>> {
    p.validate()?;
    if !p.is_normalized() {
        return Err(Error::UnsupportedRegime(format!(
            "the catalog needs mu1 = mu2 = mu3 = 1, got ({}, {}, {})",
            p.mu1, p.mu2, p.mu3
        )));
    }
    let (b1, b2, b3) = (p.b1, p.b2, p.b3);
    let prey_predator = Triple::new((1.0 - b1) / (1.0 + b1), 2.0 / (1.0 + b1), 0.0);
    let predator_secondary = Triple::new(0.0, (1.0 - b2) / (1.0 + b2), 2.0 / (1.0 + b2));
    if p.b3 == 0.0 && p.c3 == 0.0 {
        let mut out: Vec<SteadyState> = [
            ("trivial-extinction", Triple::ZERO),
            ("trivial-prey", Triple::new(1.0, 0.0, 0.0)),
            ("trivial-predator", Triple::new(0.0, 1.0, 0.0)),
            ("trivial-secondary", Triple::new(0.0, 0.0, 1.0)),
            ("semi-trivial-prey-secondary", Triple::new(1.0, 0.0, 1.0)),
            ("semi-trivial-prey-predator", prey_predator),
            ("semi-trivial-predator-secondary", predator_secondary),
        ]
        .iter()
        .map(|(label, t)| SteadyState::new(label, *t, p))
        .collect();
        out.push(coexistence_foodchain(b1, b2)?);
        Ok(out)
    } else if p.c3 == 1.0 {
        let mut out: Vec<SteadyState> = [
            ("trivial-secondary", Triple::new(0.0, 0.0, 1.0)),
            ("trivial-prey", Triple::new(1.0, 0.0, 0.0)),
            ("semi-trivial-predator-secondary", predator_secondary),
            ("semi-trivial-prey-predator", prey_predator),
            ("semi-trivial-prey-secondary", prey_secondary_intraguild(b3)),
        ]
        .iter()
        .map(|(label, t)| SteadyState::new(label, *t, p))
        .collect();
        match coexistence_intraguild(b1, b2, b3) {
            Ok((first, second)) => {
                out.push(first);
                out.push(second);
            }
            Err(Error::NoRealRoot { .. }) => {
                out.push(SteadyState::not_real("coexistence-intraguild-branch1"));
                out.push(SteadyState::not_real("coexistence-intraguild-branch2"));
            }
            Err(e) => return Err(e),
        }
        Ok(out)
    } else {
        Err(Error::UnsupportedRegime(format!(
            "the catalog covers b3 = c3 = 0 or c3 = 1, got b3 = {}, c3 = {}",
            p.b3, p.c3
        )))
    }
}

/// Which steady state a run is measured against.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SteadySelector {
    /// Positive coexistence state of whichever regime `p` belongs to.
    #[default]
    Auto,
    Foodchain,
    IntraguildBranch1,
    Explicit { u: f64, v: f64, w: f64 },
    /// No reference; the Lyapunov diagnostics are left empty.
    None,
}

impl SteadySelector {
    /// Like [`SteadySelector::resolve`], but `None` yields `Ok(None)`.
    pub fn resolve_optional(&self, p: &ModelParams) -> Result<Option<Triple>> {
        match self {
            SteadySelector::None => Ok(None),
            other => other.resolve(p).map(Some),
        }
    }

    pub fn resolve(&self, p: &ModelParams) -> Result<Triple> {
        let positive = |s: SteadyState| {
            if s.positive {
                Ok(s.triple())
            } else {
                Err(Error::Inapplicable(format!(
                    "{} state ({}, {}, {}) is not positive",
                    s.label, s.u, s.v, s.w
                )))
            }
        };
        match *self {
            SteadySelector::None => Err(Error::Inapplicable("no reference steady state selected".into())),
            SteadySelector::Explicit { u, v, w } => {
                let t = Triple::new(u, v, w);
                if t.is_finite() && u >= 0.0 && v >= 0.0 && w >= 0.0 {
                    Ok(t)
                } else {
                    Err(Error::InvalidParameter {
                        name: "reference",
                        reason: format!("explicit steady state must be finite and >= 0, got {t:?}"),
                    })
                }
            }
            _ if !p.is_normalized() => Err(Error::UnsupportedRegime(format!(
                "closed-form steady states assume mu1 = mu2 = mu3 = 1, got ({}, {}, {})",
                p.mu1, p.mu2, p.mu3
            ))),
            SteadySelector::Foodchain => positive(coexistence_foodchain(p.b1, p.b2)?),
            SteadySelector::IntraguildBranch1 => {
                positive(coexistence_intraguild(p.b1, p.b2, p.b3)?.0)
            }
            SteadySelector::Auto => {
                if p.b3 == 0.0 && p.c3 == 0.0 {
                    positive(coexistence_foodchain(p.b1, p.b2)?)
                } else if p.c3 == 1.0 {
                    positive(coexistence_intraguild(p.b1, p.b2, p.b3)?.0)
                } else {
                    Err(Error::UnsupportedRegime(format!(
                        "no coexistence formula for b3 = {}, c3 = {}",
                        p.b3, p.c3
                    )))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn foodchain_examples() {
        let s = coexistence_foodchain(1.0, 1.0).unwrap();
        assert!((s.u - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.v - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.w - 4.0 / 3.0).abs() < 1e-15);
        assert!(s.positive && s.residual <= 1e-15);

        let s = coexistence_foodchain(0.0, 0.0).unwrap();
        assert_eq!((s.u, s.v, s.w), (1.0, 2.0, 3.0));
        assert_eq!(s.residual, 0.0);

        let s = coexistence_foodchain(0.7, 2.0).unwrap();
        assert_eq!(s.v, 0.0);
        assert!(!s.positive);
        assert!(coexistence_foodchain(-1.0, 1.0).is_err());
    }

    #[test]
    fn residual_examples() {
        let p = ModelParams::food_chain(1.0, 1.0);
        assert_eq!(residual(&Triple::new(1.0, 0.0, 0.0), &p), 0.0);
        assert_eq!(residual(&Triple::new(1.0, 1.0, 1.0), &p), 1.0);
    }

    // Cleared-denominator form of the per-capita steady equations.
    fn per_capita_residual(t: Triple, b1: f64, b2: f64, b3: f64) -> f64 {
        let (u, v, w) = (t.u, t.v, t.w);
        let e1 = (1.0 - u - b1 * v) * (u + w) - b3 * w;
        let e2 = 1.0 - v + u - b2 * w;
        let e3 = (1.0 - w + v) * (u + w) + u;
        e1.abs().max(e2.abs()).max(e3.abs())
    }

    #[test]
    fn remark_special_case() {
        for &b2 in &[0.1, 0.5, 1.0, 1.2, 1.41] {
            let (a, b) = coexistence_intraguild(0.0, b2, 0.0).unwrap();
            assert_eq!(a.u, 1.0);
            assert_eq!(b.u, 1.0);
            let r = ((b2 + 2.0) * (b2 + 10.0)).sqrt();
            let v1 = (b2 * b2 + 2.0 * b2 + 4.0 - b2 * r) / (2.0 * (b2 + 1.0));
            let w1 = (2.0 - b2 + r) / (2.0 * (b2 + 1.0));
            assert!((a.v - v1).abs() < 1e-14 && (a.w - w1).abs() < 1e-14);
            assert!(a.positive);
            assert!(b.w < 0.0 && b.v > 0.0);
        }
        let (a, _) = coexistence_intraguild(0.0, 1.0, 0.0).unwrap();
        assert!((a.v - (7.0 - 33f64.sqrt()) / 4.0).abs() < 1e-14);
        assert!((a.w - (1.0 + 33f64.sqrt()) / 4.0).abs() < 1e-14);
        assert!((a.v - 0.31386).abs() < 1e-5 && (a.w - 1.68614).abs() < 1e-5);
        assert!(a.residual < 1e-14);
    }

    #[test]
    fn branches_satisfy_steady_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let b1 = rng.gen_range(1e-6..0.05);
            let b3 = rng.gen_range(1e-6..0.05);
            let b2 = rng.gen_range(0.1..1.4);
            let (a, b) = coexistence_intraguild(b1, b2, b3).unwrap();
            assert!(a.residual <= 1e-10 && b.residual <= 1e-10);
            assert!(per_capita_residual(a.triple(), b1, b2, b3) <= 1e-10);
            assert!(per_capita_residual(b.triple(), b1, b2, b3) <= 1e-10);
        }
    }

    #[test]
    fn branches_differ_only_in_root_sign() {
        let root = IntraguildRoot::new(0.03, 0.8, 0.02).unwrap();
        let flipped = IntraguildRoot {
            coef: Triple::new(-root.coef.u, -root.coef.v, -root.coef.w),
            ..root
        };
        assert_eq!(root.branch(-1.0).unwrap(), flipped.branch(1.0).unwrap());
        // the second transcription of the radicand in the w component
        let (b1, b2, b3): (f64, f64, f64) = (0.03, 0.8, 0.02);
        let alt = 20.0 + b2 * b2 + 4.0 * b1 * b1 * (b2 * b2 - 1.0) + 4.0 * b1 * (b2 + 3.0) * (b2 - b3)
            - 20.0 * b3
            + b3 * b3
            - 2.0 * b2 * (7.0 * b3 - 6.0);
        assert!((alt - root.radicand).abs() < 1e-13);
    }

    #[test]
    fn continuity_towards_special_case() {
        let b2 = 0.9;
        let (a0, b0) = coexistence_intraguild(0.0, b2, 0.0).unwrap();
        let mut last = f64::INFINITY;
        for &eps in &[1e-2, 1e-4, 1e-6] {
            let (a, b) = coexistence_intraguild(eps, b2, eps).unwrap();
            let diff = (a.triple().u - a0.u).abs().max((a.v - a0.v).abs()).max((a.w - a0.w).abs())
                .max((b.u - b0.u).abs()).max((b.v - b0.v).abs()).max((b.w - b0.w).abs());
            assert!(diff < last);
            last = diff;
        }
        assert!(last < 1e-4);
    }

    #[test]
    fn positivity_split_on_grid() {
        for i in 0..50 {
            for j in 0..50 {
                let b = 0.01 * (i as f64 + 1.0) / 50.0;
                let b2 = 0.1 + 1.3 * (j as f64 + 0.5) / 50.0;
                let (a, c) = coexistence_intraguild(b, b2, b).unwrap();
                assert!(a.positive, "b={b} b2={b2}");
                assert!(c.w < 0.0, "b={b} b2={b2}");
            }
        }
    }

    #[test]
    fn negative_radicand_is_reported() {
        // large b3 drives the radicand negative
        let err = coexistence_intraguild(0.0, 0.1, 5.0).unwrap_err();
        assert!(matches!(err, Error::NoRealRoot { .. }));
    }

    #[test]
    fn foodchain_catalog() {
        let p = ModelParams::food_chain(1.0, 1.0);
        let c = catalog(&p).unwrap();
        assert_eq!(c.len(), 8);
        for s in &c {
            assert!(s.residual <= 1e-12, "{}", s.label);
        }
        let co = c.iter().find(|s| s.label == "coexistence-foodchain").unwrap();
        assert!((co.u - 2.0 / 3.0).abs() < 1e-15);

        let p = ModelParams::food_chain(0.5, 0.5);
        let c = catalog(&p).unwrap();
        let s = c.iter().find(|s| s.label == "semi-trivial-prey-predator").unwrap();
        assert!((s.u - 1.0 / 3.0).abs() < 1e-15 && (s.v - 4.0 / 3.0).abs() < 1e-15);
        assert!(s.residual <= 1e-15);
    }

    #[test]
    fn intraguild_catalog() {
        let p = ModelParams::intraguild(0.02, 1.0, 0.02);
        let c = catalog(&p).unwrap();
        assert_eq!(c.len(), 7);
        for s in &c {
            assert!(s.real && s.residual <= 1e-12, "{}", s.label);
        }
        let p = ModelParams::intraguild(0.02, 1.0, 1.5);
        let c = catalog(&p).unwrap();
        let s = c.iter().find(|s| s.label == "semi-trivial-prey-secondary").unwrap();
        assert!(!s.real && !s.positive);
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("null"));
    }

    #[test]
    fn unsupported_regimes() {
        let p = ModelParams {
            mu1: 2.0,
            ..ModelParams::default()
        };
        assert!(matches!(catalog(&p), Err(Error::UnsupportedRegime(_))));
        let p = ModelParams {
            c3: 0.5,
            b3: 0.1,
            ..ModelParams::default()
        };
        assert!(matches!(catalog(&p), Err(Error::UnsupportedRegime(_))));
    }

    #[test]
    fn selector_resolution() {
        let p = ModelParams::food_chain(1.0, 1.0);
        let t = SteadySelector::Auto.resolve(&p).unwrap();
        assert!((t.u - 2.0 / 3.0).abs() < 1e-15);
        let p = ModelParams::intraguild(0.02, 1.0, 0.02);
        let t = SteadySelector::Auto.resolve(&p).unwrap();
        assert!(t.all_positive());
        assert!(SteadySelector::Foodchain.resolve(&ModelParams::food_chain(1.0, 2.5)).is_err());
        assert_eq!(SteadySelector::None.resolve_optional(&p).unwrap(), None);
        let scaled = ModelParams { mu2: 2.0, ..p };
        assert!(SteadySelector::Auto.resolve(&scaled).is_err());
        let explicit = SteadySelector::Explicit { u: 0.5, v: 0.5, w: 0.5 };
        assert!(explicit.resolve(&scaled).is_ok());
    }
}
