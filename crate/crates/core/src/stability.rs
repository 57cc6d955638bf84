//! Algebraic stability conditions, the dissipation matrices of the Lyapunov
//! argument and their definiteness, taxis thresholds, and parameter-region scans.

use std::collections::VecDeque;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::fmt_f64;
use crate::model::{ModelParams, Triple};
use crate::steady_states::{coexistence_foodchain, coexistence_intraguild};

pub type Mat3 = [[f64; 3]; 3];

/// Slack on zero used by the minor-based definiteness tests.
pub const MINOR_SLACK: f64 = 1e-14;

/// Worst-case `u + w` for the intraguild matrix once `u ≥ √2/2`.
pub const DEFAULT_UW_SUM: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Default upper end of the "sufficiently small" box for `b1`, `b3`.
pub const DEFAULT_SMALL_BOX: f64 = 0.05;

pub fn check_gs1(b1: f64, b2: f64) -> bool {
    0.0 < b2 && b2 < 2.0 && 0.0 < b1 && b1 < 1.0 + b1 * b2 + b2
}

pub fn check_gs2(b1: f64, b2: f64) -> bool {
    (b1 - 1.0).powi(2) + (b2 - 1.0).powi(2) < 4.0
}

/// Intraguild smallness condition: `0 < b1, b3 ≤ small_box` and `1/10 ≤ b2 < √2`.
pub fn check_condition_1_10(b1: f64, b2: f64, b3: f64, small_box: f64) -> bool {
    0.0 < b1 && b1 <= small_box && 0.0 < b3 && b3 <= small_box && 0.1 <= b2 && b2 < 2f64.sqrt()
}

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn minor2(m: &Mat3, i: usize, j: usize) -> f64 {
    m[i][i] * m[j][j] - m[i][j] * m[j][i]
}

/// Leading principal minors `(m11, m11 m22 - m12², det)`.
pub fn leading_minors(m: &Mat3) -> [f64; 3] {
    [m[0][0], minor2(m, 0, 1), det3(m)]
}

/// Positive definite: every leading principal minor above the slack.
pub fn is_positive_definite(m: &Mat3) -> bool {
    leading_minors(m).iter().all(|&x| x > MINOR_SLACK)
}

/// Positive semi-definite: every principal minor (not only the leading ones) at least `-slack`.
pub fn is_positive_semidefinite(m: &Mat3) -> bool {
    let diag = (0..3).all(|i| m[i][i] >= -MINOR_SLACK);
    let pairs = [(0, 1), (0, 2), (1, 2)].iter().all(|&(i, j)| minor2(m, i, j) >= -MINOR_SLACK);
    diag && pairs && det3(m) >= -MINOR_SLACK
}

/// Eigenvalues of a symmetric 3×3 matrix in ascending order.
pub fn symmetric_eigenvalues(m: &Mat3) -> [f64; 3] {
    let p1 = m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2);
    if p1 == 0.0 {
        let mut e = [m[0][0], m[1][1], m[2][2]];
        e.sort_by(f64::total_cmp);
        return e;
    }
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    let p2 = (0..3).map(|i| (m[i][i] - q).powi(2)).sum::<f64>() + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let mut b = *m;
    for (i, row) in b.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = (*x - if i == j { q } else { 0.0 }) / p;
        }
    }
    let r = (det3(&b) / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let largest = q + 2.0 * p * phi.cos();
    let smallest = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let middle = 3.0 * q - largest - smallest;
    [smallest, middle, largest]
}

/// `A1` of the food-chain dissipation identity, its determinant and definiteness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixA1 {
    pub matrix: Mat3,
    /// `(4 - (b1-1)² - (b2-1)²)/4`.
    pub det: f64,
    /// `(3 - b1)(1 + b1)/4`.
    pub minor2: f64,
    pub pd: bool,
    /// Smallest eigenvalue; the coercivity constant of `X A1 Xᵀ ≥ α|X|²`.
    pub alpha: f64,
}

pub fn matrix_a1(b1: f64, b2: f64) -> MatrixA1 {
    let h1 = (b1 - 1.0) / 2.0;
    let h2 = (b2 - 1.0) / 2.0;
    let matrix = [[1.0, h1, 0.0], [h1, 1.0, h2], [0.0, h2, 1.0]];
    let det = (4.0 - (b1 - 1.0).powi(2) - (b2 - 1.0).powi(2)) / 4.0;
    let minor2 = (3.0 - b1) * (1.0 + b1) / 4.0;
    MatrixA1 {
        matrix,
        det,
        minor2,
        pd: minor2 > MINOR_SLACK && det > MINOR_SLACK,
        alpha: symmetric_eigenvalues(&matrix)[0],
    }
}

/// Gradient-coupling matrix (`B1` or `B2`) evaluated at the sup-norm worst case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixB {
    pub matrix: Mat3,
    /// `v*(4 d1 d2 u* - ξ² v* u_sup²)/4`.
    pub minor2: f64,
    pub det: f64,
    pub psd: bool,
    pub pd: bool,
}

fn check_positive_inputs(u_sup: f64, v_sup: f64, steady: &Triple) -> Result<()> {
    if !(u_sup > 0.0 && u_sup.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "u_sup",
            reason: format!("must be finite and > 0, got {u_sup}"),
        });
    }
    if !(v_sup > 0.0 && v_sup.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "v_sup",
            reason: format!("must be finite and > 0, got {v_sup}"),
        });
    }
    if !(steady.is_finite() && steady.all_positive()) {
        return Err(Error::Domain(format!("steady state must be positive, got {steady:?}")));
    }
    Ok(())
}

fn matrix_b(p: &ModelParams, u_sup: f64, v_sup: f64, steady: &Triple) -> Result<MatrixB> {
    p.validate()?;
    check_positive_inputs(u_sup, v_sup, steady)?;
    let (us, vs, ws) = (steady.u, steady.v, steady.w);
    let a = p.d1 * us;
    let b = p.d2 * vs;
    let c = p.d3 * ws;
    let q1 = p.xi * vs * u_sup / 2.0;
    let q2 = p.chi * ws * u_sup * v_sup / 2.0;
    let matrix = [[a, -q1, -q2], [-q1, b, -q2], [-q2, -q2, c]];
    // abc - c q1² - q2²(a + b + 2 q1)
    let det = a * b * c - c * q1 * q1 - q2 * q2 * (a + b + 2.0 * q1);
    let minor2 = vs * (4.0 * p.d1 * p.d2 * us - p.xi * p.xi * vs * u_sup * u_sup) / 4.0;
    Ok(MatrixB {
        matrix,
        minor2,
        det,
        psd: is_positive_semidefinite(&matrix),
        pd: is_positive_definite(&matrix),
    })
}

/// `B1` with `u`, `v` replaced by their sup-norms.
pub fn matrix_b1(p: &ModelParams, u_sup: f64, v_sup: f64, steady: &Triple) -> Result<MatrixB> {
    matrix_b(p, u_sup, v_sup, steady)
}

/// `B2`: same construction about the intraguild coexistence state.
pub fn matrix_b2(p: &ModelParams, u_sup: f64, v_sup: f64, steady: &Triple) -> Result<MatrixB> {
    matrix_b(p, u_sup, v_sup, steady)
}

/// Closed-form `|B|` at the sup-norm worst case:
/// `-(w*/4)[ξχ²v*w*u³v² + χ²w*(d1u*+d2v*)u²v² + ξ²v*²u² - 4d1d2u*v*]`.
/// Assumes unit diffusivity for `w`.
pub fn det_b_closed_form(p: &ModelParams, u_sup: f64, v_sup: f64, steady: &Triple) -> f64 {
    let (us, vs, ws) = (steady.u, steady.v, steady.w);
    let (u, v) = (u_sup, v_sup);
    -ws / 4.0
        * (p.xi * p.chi * p.chi * vs * ws * u.powi(3) * v * v
            + p.chi * p.chi * ws * (p.d1 * us + p.d2 * vs) * u * u * v * v
            + p.xi * p.xi * vs * vs * u * u
            - 4.0 * p.d1 * p.d2 * us * vs)
}

/// Example taxis thresholds `(ξ1, χ1)` below which the coupling matrix is
/// definite; `χ1` depends on the run's `ξ`.
pub fn taxis_thresholds(p: &ModelParams, u_sup: f64, v_sup: f64, steady: &Triple) -> Result<(f64, f64)> {
    check_positive_inputs(u_sup, v_sup, steady)?;
    let (us, vs, ws) = (steady.u, steady.v, steady.w);
    let xi_den = vs * u_sup * u_sup;
    let chi_den = u_sup * u_sup * v_sup * v_sup * (p.xi * vs * ws * u_sup + ws * (p.d1 * us + p.d2 * vs));
    if !(xi_den > 0.0 && chi_den > 0.0) {
        return Err(Error::Degenerate("zero denominator in taxis thresholds".into()));
    }
    let xi1 = (2.0 * p.d1 * p.d2 * us / xi_den).sqrt();
    let chi1 = (2.0 * p.d1 * p.d2 * us * vs / chi_den).sqrt();
    Ok((xi1, chi1))
}

/// `A2` of the intraguild dissipation identity, with the pointwise `u + w`
/// replaced by `uw_sum`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixA2 {
    pub matrix: Mat3,
    pub det: f64,
    pub pd: bool,
}

pub fn matrix_a2(b1: f64, b2: f64, b3: f64, steady: &Triple, uw_sum: f64) -> Result<MatrixA2> {
    if !(uw_sum > 0.0 && uw_sum.is_finite()) {
        return Err(Error::Domain(format!("u + w evaluation point must be > 0, got {uw_sum}")));
    }
    if !(steady.is_finite() && steady.all_positive()) {
        return Err(Error::Domain(format!("steady state must be positive, got {steady:?}")));
    }
    let (us, ws) = (steady.u, steady.w);
    let k = (us + ws) * uw_sum;
    let h1 = (b1 - 1.0) / 2.0;
    let h2 = (b2 - 1.0) / 2.0;
    let e13 = (b3 * us - ws) / (2.0 * k);
    let matrix = [
        [1.0 - b3 * ws / k, h1, e13],
        [h1, 1.0, h2],
        [e13, h2, 1.0 + us / k],
    ];
    Ok(MatrixA2 {
        matrix,
        det: det3(&matrix),
        pd: is_positive_definite(&matrix),
    })
}

/// Right-hand side of the closed form for `4|Ã2|` (`b1 = b3 = 0`):
/// `3 - (b2-1)² - w̄²/((ū+w̄)² s²) + (3ū + (b2-1)w̄)/((ū+w̄) s)` with `s = u + w`.
pub fn four_det_a2_tilde(b2: f64, steady: &Triple, uw_sum: f64) -> f64 {
    let (u, w) = (steady.u, steady.w);
    let k = (u + w) * uw_sum;
    3.0 - (b2 - 1.0).powi(2) - w * w / (k * k) + (3.0 * u + (b2 - 1.0) * w) / k
}

/// `min(ū, 1 - b3 - b1 v_sup)`, valid when `1 - b3 - b1 v_sup > 0`.
pub fn lower_bound_u(b1: f64, b3: f64, v_sup: f64, u_bar: f64) -> Result<f64> {
    let floor = 1.0 - b3 - b1 * v_sup;
    if !(floor > 0.0) {
        return Err(Error::Inapplicable(format!(
            "1 - b3 - b1·v_sup = {floor} is not positive"
        )));
    }
    Ok(u_bar.min(floor))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub b1: f64,
    pub b2: f64,
    pub gs1: bool,
    pub gs2: bool,
    pub admissible: bool,
}

impl RegionPoint {
    pub fn at(b1: f64, b2: f64) -> Self {
        let gs1 = check_gs1(b1, b2);
        let gs2 = check_gs2(b1, b2);
        Self {
            b1,
            b2,
            gs1,
            gs2,
            admissible: gs1 && gs2,
        }
    }
}

/// Flags on a `resolution × resolution` grid; row-major with `b2` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionScan {
    pub b1_range: (f64, f64),
    pub b2_range: (f64, f64),
    pub resolution: usize,
    pub points: Vec<RegionPoint>,
}

fn sample(range: (f64, f64), k: usize, res: usize) -> f64 {
    range.0 + (range.1 - range.0) * k as f64 / res as f64
}

/// Samples `b = lo + (hi - lo)·k/res` for `k = 1..=res` on both axes, so a
/// range `(lo, hi]` excludes its open end.
pub fn region_scan(b1_range: (f64, f64), b2_range: (f64, f64), resolution: usize) -> Result<RegionScan> {
    for (name, r) in [("b1_range", b1_range), ("b2_range", b2_range)] {
        if !(r.0 >= 0.0 && r.1 > r.0 && r.1.is_finite()) {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("need 0 <= lo < hi, got ({}, {})", r.0, r.1),
            });
        }
    }
    if resolution == 0 {
        return Err(Error::InvalidParameter {
            name: "resolution",
            reason: "must be >= 1".into(),
        });
    }
    let mut points = Vec::with_capacity(resolution * resolution);
    for i in 1..=resolution {
        let b1 = sample(b1_range, i, resolution);
        for j in 1..=resolution {
            points.push(RegionPoint::at(b1, sample(b2_range, j, resolution)));
        }
    }
    Ok(RegionScan {
        b1_range,
        b2_range,
        resolution,
        points,
    })
}

impl RegionScan {
    fn index_of(&self, range: (f64, f64), b: f64) -> usize {
        let k = ((b - range.0) / (range.1 - range.0) * self.resolution as f64).round() as i64;
        (k.clamp(1, self.resolution as i64) - 1) as usize
    }

    /// Sample closest to `(b1, b2)`.
    pub fn nearest(&self, b1: f64, b2: f64) -> &RegionPoint {
        let i = self.index_of(self.b1_range, b1);
        let j = self.index_of(self.b2_range, b2);
        &self.points[i * self.resolution + j]
    }

    pub fn admissible_count(&self) -> usize {
        self.points.iter().filter(|p| p.admissible).count()
    }

    /// Number of 4-connected components of admissible samples.
    pub fn admissible_components(&self) -> usize {
        let n = self.resolution;
        let mut seen = vec![false; self.points.len()];
        let mut components = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.points.len() {
            if seen[start] || !self.points[start].admissible {
                continue;
            }
            components += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(k) = queue.pop_front() {
                let (i, j) = (k / n, k % n);
                let mut neighbours = Vec::with_capacity(4);
                if i > 0 {
                    neighbours.push(k - n);
                }
                if i + 1 < n {
                    neighbours.push(k + n);
                }
                if j > 0 {
                    neighbours.push(k - 1);
                }
                if j + 1 < n {
                    neighbours.push(k + 1);
                }
                for m in neighbours {
                    if !seen[m] && self.points[m].admissible {
                        seen[m] = true;
                        queue.push_back(m);
                    }
                }
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.admissible_components() == 1
    }

    /// CSV with header `b1,b2,gs1,gs2,admissible`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "b1,b2,gs1,gs2,admissible")?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_f64(p.b1),
                fmt_f64(p.b2),
                p.gs1,
                p.gs2,
                p.admissible
            )?;
        }
        Ok(())
    }
}

/// Summary of every algebraic condition for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub gs1: bool,
    pub gs2: bool,
    pub condition_1_10: bool,
    #[serde(rename = "detA1")]
    pub det_a1: f64,
    #[serde(rename = "A1_pd")]
    pub a1_pd: bool,
    /// Smallest eigenvalue of `A1`.
    pub alpha: f64,
    pub steady: Option<Triple>,
    #[serde(rename = "B1_psd_at_supnorms")]
    pub b1_psd_at_supnorms: Option<bool>,
    #[serde(rename = "A2_pd")]
    pub a2_pd: Option<bool>,
    #[serde(rename = "B2_pd_at_supnorms")]
    pub b2_pd_at_supnorms: Option<bool>,
    pub xi1: Option<f64>,
    pub chi1: Option<f64>,
    pub u_sup: f64,
    pub v_sup: f64,
    pub notes: Vec<String>,
}

/// Evaluates the conditions for `p`, using `u_sup`, `v_sup` as the sup-norm
/// bounds in the coupling matrices and thresholds.
pub fn stability_report(p: &ModelParams, u_sup: f64, v_sup: f64, small_box: f64) -> Result<StabilityReport> {
    p.validate()?;
    let a1 = matrix_a1(p.b1, p.b2);
    let mut report = StabilityReport {
        gs1: check_gs1(p.b1, p.b2),
        gs2: check_gs2(p.b1, p.b2),
        condition_1_10: p.c3 == 1.0 && check_condition_1_10(p.b1, p.b2, p.b3, small_box),
        det_a1: a1.det,
        a1_pd: a1.pd,
        alpha: a1.alpha,
        steady: None,
        b1_psd_at_supnorms: None,
        a2_pd: None,
        b2_pd_at_supnorms: None,
        xi1: None,
        chi1: None,
        u_sup,
        v_sup,
        notes: vec![format!("small box for b1, b3: (0, {small_box}]")],
    };
    if !p.is_normalized() {
        report.notes.push("kinetic rates are not normalized; conditions assume mu = 1".into());
    }
    let steady = if p.b3 == 0.0 && p.c3 == 0.0 {
        let s = coexistence_foodchain(p.b1, p.b2)?;
        s.positive.then(|| s.triple())
    } else if p.c3 == 1.0 {
        match coexistence_intraguild(p.b1, p.b2, p.b3) {
            Ok((s, _)) => s.positive.then(|| s.triple()),
            Err(Error::NoRealRoot { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let Some(steady) = steady else {
        report
            .notes
            .push("no positive coexistence state; coupling matrices not evaluated".into());
        return Ok(report);
    };
    report.steady = Some(steady);
    let (xi1, chi1) = taxis_thresholds(p, u_sup, v_sup, &steady)?;
    report.xi1 = Some(xi1);
    report.chi1 = Some(chi1);
    report
        .notes
        .push("chi1 is evaluated at the given xi; other valid threshold pairs exist".into());
    if p.b3 == 0.0 && p.c3 == 0.0 {
        report.b1_psd_at_supnorms = Some(matrix_b1(p, u_sup, v_sup, &steady)?.psd);
    } else {
        report.a2_pd = Some(matrix_a2(p.b1, p.b2, p.b3, &steady, DEFAULT_UW_SUM)?.pd);
        report.b2_pd_at_supnorms = Some(matrix_b2(p, u_sup, v_sup, &steady)?.pd);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Laplace expansion along the first row.
    fn cofactor_det(m: &Mat3) -> f64 {
        let mut det = 0.0;
        for j in 0..3 {
            let cols: Vec<usize> = (0..3).filter(|&c| c != j).collect();
            let sub = m[1][cols[0]] * m[2][cols[1]] - m[1][cols[1]] * m[2][cols[0]];
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            det += sign * m[0][j] * sub;
        }
        det
    }

    // Cyclic Jacobi rotations.
    fn jacobi_eigenvalues(m: &Mat3) -> [f64; 3] {
        let mut a = *m;
        for _ in 0..100 {
            let off = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
            if off < 1e-30 {
                break;
            }
            for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let mut b = a;
                for k in 0..3 {
                    b[k][p] = c * a[k][p] - s * a[k][q];
                    b[k][q] = s * a[k][p] + c * a[k][q];
                }
                let mut r = b;
                for k in 0..3 {
                    r[p][k] = c * b[p][k] - s * b[q][k];
                    r[q][k] = s * b[p][k] + c * b[q][k];
                }
                a = r;
            }
        }
        let mut e = [a[0][0], a[1][1], a[2][2]];
        e.sort_by(f64::total_cmp);
        e
    }

    fn random_symmetric(rng: &mut ChaCha8Rng) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                let x = rng.gen_range(-1.0..1.0);
                m[i][j] = x;
                m[j][i] = x;
            }
        }
        m
    }

    #[test]
    fn gs_examples() {
        assert!(check_gs1(1.0, 1.0));
        assert!(!check_gs1(1.0, 2.0));
        assert!(check_gs1(2.5, 1.8));
        assert!(check_gs2(1.0, 1.0));
        assert!(!check_gs2(3.0, 1.0));
        assert!(check_gs2(2.5, 1.8));
    }

    #[test]
    fn a1_examples() {
        let a = matrix_a1(1.0, 1.0);
        assert_eq!(a.matrix, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert_eq!(a.det, 1.0);
        assert!(a.pd);
        assert!((a.alpha - 1.0).abs() < 1e-15);
        let a = matrix_a1(3.0, 1.0);
        assert_eq!(a.det, 0.0);
        assert!(!a.pd);
    }

    #[test]
    fn a1_closed_forms_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let b1 = rng.gen_range(0.01..4.0);
            let b2 = rng.gen_range(0.01..3.0);
            let a = matrix_a1(b1, b2);
            let oracle = cofactor_det(&a.matrix);
            assert!((a.det - oracle).abs() <= 1e-12 * oracle.abs().max(1.0));
            assert!((a.minor2 - minor2(&a.matrix, 0, 1)).abs() < 1e-14);
        }
    }

    #[test]
    fn a2_tilde_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let b2 = rng.gen_range(0.1..1.4);
            let s = rng.gen_range(0.2..3.0);
            let (st, _) = coexistence_intraguild(0.0, b2, 0.0).unwrap();
            let a2 = matrix_a2(0.0, b2, 0.0, &st.triple(), s).unwrap();
            let oracle = 4.0 * cofactor_det(&a2.matrix);
            let closed = four_det_a2_tilde(b2, &st.triple(), s);
            assert!((oracle - closed).abs() <= 1e-12 * oracle.abs().max(1.0));
        }
    }

    #[test]
    fn a2_example_is_positive_definite() {
        let (st, _) = coexistence_intraguild(0.0, 1.0, 0.0).unwrap();
        let a2 = matrix_a2(0.0, 1.0, 0.0, &st.triple(), DEFAULT_UW_SUM).unwrap();
        assert!(a2.pd);
        let (st, _) = coexistence_intraguild(0.02, 0.8, 0.03).unwrap();
        let t = st.triple();
        let s = 0.9;
        let a2 = matrix_a2(0.02, 0.8, 0.03, &t, s).unwrap();
        assert!((1.0 - a2.matrix[0][0] - 0.03 * t.w / ((t.u + t.w) * s)).abs() < 1e-15);
        assert!(matrix_a2(0.0, 1.0, 0.0, &t, 0.0).is_err());
    }

    #[test]
    fn b1_examples() {
        let star = Triple::new(2.0 / 3.0, 1.0 / 3.0, 4.0 / 3.0);
        let p = ModelParams::food_chain(1.0, 1.0);
        let b = matrix_b1(&p, 1.0, 1.0, &star).unwrap();
        assert_eq!(b.matrix[0][1], 0.0);
        assert_eq!(b.matrix[1][2], 0.0);
        assert!(b.psd && b.pd);

        let p = ModelParams::food_chain(1.0, 1.0).with_taxis(1.9, 1.9);
        let b = matrix_b1(&p, 1.0, 1.0, &star).unwrap();
        assert!(b.minor2 > 0.0);
        assert!(cofactor_det(&b.matrix) < 0.0);
        assert!(!b.psd);
        assert!((b.det - det_b_closed_form(&p, 1.0, 1.0, &star)).abs() < 1e-14);
    }

    #[test]
    fn thresholds() {
        let star = Triple::new(2.0 / 3.0, 1.0 / 3.0, 4.0 / 3.0);
        let p = ModelParams::food_chain(1.0, 1.0);
        let (xi1, chi1) = taxis_thresholds(&p, 1.0, 1.0, &star).unwrap();
        assert!((xi1 - 2.0).abs() < 1e-15);
        let (xi1_2, _) = taxis_thresholds(&p, 2.0, 1.0, &star).unwrap();
        assert!((xi1_2 - 1.0).abs() < 1e-15);
        let expect = (2.0 * star.u * star.v / (star.w * (star.u + star.v))).sqrt();
        assert!((chi1 - expect).abs() < 1e-15);
    }

    #[test]
    fn below_thresholds_is_definite() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let b1 = rng.gen_range(0.1..2.0);
            let b2 = rng.gen_range(0.1..1.9);
            let s = coexistence_foodchain(b1, b2).unwrap();
            if !s.positive {
                continue;
            }
            let star = s.triple();
            let u_sup = rng.gen_range(0.5..3.0);
            let v_sup = rng.gen_range(0.5..3.0);
            let base = ModelParams::food_chain(b1, b2).with_diffusion(rng.gen_range(0.2..2.0), rng.gen_range(0.2..2.0));
            let (xi1, _) = taxis_thresholds(&base, u_sup, v_sup, &star).unwrap();
            let xi = xi1 * rng.gen_range(0.0..0.999);
            let (_, chi1) = taxis_thresholds(&base.with_taxis(xi, 0.0), u_sup, v_sup, &star).unwrap();
            let chi = chi1 * rng.gen_range(0.0..0.999);
            let p = base.with_taxis(xi, chi);
            let b = matrix_b1(&p, u_sup, v_sup, &star).unwrap();
            assert!(b.psd, "xi={xi} chi={chi}");
        }
    }

    #[test]
    fn threshold_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let star = Triple::new(0.6, 0.4, 1.2);
        for _ in 0..200 {
            let d1 = rng.gen_range(0.1..2.0);
            let d2 = rng.gen_range(0.1..2.0);
            let u = rng.gen_range(0.5..3.0);
            let p = ModelParams::default().with_diffusion(d1, d2);
            let (x, _) = taxis_thresholds(&p, u, 1.0, &star).unwrap();
            let (x_u, _) = taxis_thresholds(&p, u * 1.1, 1.0, &star).unwrap();
            let (x_d1, _) = taxis_thresholds(&p.with_diffusion(d1 * 1.1, d2), u, 1.0, &star).unwrap();
            let (x_d2, _) = taxis_thresholds(&p.with_diffusion(d1, d2 * 1.1), u, 1.0, &star).unwrap();
            assert!(x_u < x && x_d1 > x && x_d2 > x);
        }
    }

    #[test]
    fn definiteness_matches_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let m = random_symmetric(&mut rng);
            let e = jacobi_eigenvalues(&m);
            let mine = symmetric_eigenvalues(&m);
            for k in 0..3 {
                assert!((e[k] - mine[k]).abs() < 1e-10);
            }
            assert_eq!(is_positive_semidefinite(&m), e[0] >= -1e-12);
            assert_eq!(is_positive_definite(&m), e[0] > 1e-12);
        }
        // rank-deficient PSD matrices and a case the leading minors alone miss
        let psd = [[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 2.0]];
        assert!(is_positive_semidefinite(&psd) && !is_positive_definite(&psd));
        let tricky = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, -1.0]];
        assert!(!is_positive_semidefinite(&tricky));
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(lower_bound_u(0.0, 0.0, 5.0, 0.7).unwrap(), 0.7);
        assert_eq!(lower_bound_u(0.0, 0.0, 5.0, 1.3).unwrap(), 1.0);
        assert!((lower_bound_u(0.1, 0.05, 2.0, 0.9).unwrap() - 0.75).abs() < 1e-15);
        assert!(matches!(lower_bound_u(0.5, 0.6, 1.0, 0.9), Err(Error::Inapplicable(_))));
    }

    #[test]
    fn region_scan_examples() {
        let scan = region_scan((0.0, 4.0), (0.0, 3.0), 200).unwrap();
        assert_eq!(scan.points.len(), 40000);
        assert!(scan.nearest(1.0, 1.0).admissible);
        assert!(scan.nearest(2.5, 1.8).admissible);
        assert!(!scan.nearest(3.0, 1.0).admissible);
        assert!(!scan.nearest(3.5, 0.5).admissible);
        assert!(scan.is_connected());
        for p in scan.points.iter().filter(|p| p.admissible) {
            assert!(coexistence_foodchain(p.b1, p.b2).unwrap().positive);
        }
        let mut csv = Vec::new();
        scan.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 40001);
        assert!(region_scan((1.0, 1.0), (0.0, 3.0), 10).is_err());
    }

    #[test]
    fn reports() {
        let r = stability_report(&ModelParams::food_chain(1.0, 1.0).with_taxis(1.0, 0.25), 1.0, 1.0, DEFAULT_SMALL_BOX).unwrap();
        assert!(r.gs1 && r.gs2 && r.a1_pd && !r.condition_1_10);
        assert_eq!(r.b1_psd_at_supnorms, Some(true));
        assert!((r.xi1.unwrap() - 2.0).abs() < 1e-15);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"detA1\"") && json.contains("\"B1_psd_at_supnorms\""));

        let r = stability_report(&ModelParams::intraguild(0.02, 1.0, 0.02), 1.0, 1.0, DEFAULT_SMALL_BOX).unwrap();
        assert!(r.condition_1_10);
        assert_eq!(r.a2_pd, Some(true));
        assert_eq!(r.b2_pd_at_supnorms, Some(true));
    }
}
