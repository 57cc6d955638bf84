//! Uniform cell-centered meshes on intervals and rectangles with zero-flux
//! boundaries, plus the discrete operators the stepper is built from.
//!
//! Cells are stored row-major (`index = j * nx + i`). Boundary conditions are
//! imposed through mirrored ghost cells, which makes every boundary face carry
//! exactly zero diffusive and zero advective flux.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible cell count per axis.
pub const MIN_CELLS: usize = 4;

/// A rectangular domain `[0, lx]` or `[0, lx] × [0, ly]` split into equal cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    dim: usize,
    lx: f64,
    ly: f64,
    nx: usize,
    ny: usize,
}

impl Domain {
    pub fn interval(lx: f64, nx: usize) -> Result<Self> {
        check_axis("lx", lx, "nx", nx)?;
        Ok(Self {
            dim: 1,
            lx,
            ly: 1.0,
            nx,
            ny: 1,
        })
    }

    pub fn rectangle(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        check_axis("lx", lx, "nx", nx)?;
        check_axis("ly", ly, "ny", ny)?;
        Ok(Self {
            dim: 2,
            lx,
            ly,
            nx,
            ny,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn lx(&self) -> f64 {
        self.lx
    }
    pub fn ly(&self) -> f64 {
        self.ly
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }
    pub fn dy(&self) -> f64 {
        if self.dim == 1 {
            f64::INFINITY
        } else {
            self.ly / self.ny as f64
        }
    }

    /// Smallest mesh spacing.
    pub fn h_min(&self) -> f64 {
        self.dx().min(self.dy())
    }

    /// `Σ 1/h²` over the active axes; `2·dim/dx²` on square cells.
    pub fn inverse_h2_sum(&self) -> f64 {
        let mut s = 1.0 / (self.dx() * self.dx());
        if self.dim == 2 {
            s += 1.0 / (self.dy() * self.dy());
        }
        s
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Length (1D) or area (2D) of one cell.
    pub fn cell_measure(&self) -> f64 {
        if self.dim == 1 {
            self.dx()
        } else {
            self.dx() * self.dy()
        }
    }

    /// `|Ω|`.
    pub fn measure(&self) -> f64 {
        if self.dim == 1 {
            self.lx
        } else {
            self.lx * self.ly
        }
    }

    /// Cell-center coordinates; `y` is 0 in 1D.
    pub fn center(&self, index: usize) -> (f64, f64) {
        let i = index % self.nx;
        let j = index / self.nx;
        let x = (i as f64 + 0.5) * self.dx();
        let y = if self.dim == 1 {
            0.0
        } else {
            (j as f64 + 0.5) * self.dy()
        };
        (x, y)
    }

    pub fn centers(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(move |k| self.center(k))
    }
}

fn check_axis(len_name: &'static str, len: f64, n_name: &'static str, n: usize) -> Result<()> {
    if !(len.is_finite() && len > 0.0) {
        return Err(Error::InvalidParameter {
            name: len_name,
            reason: format!("domain length must be finite and > 0, got {len}"),
        });
    }
    if n < MIN_CELLS {
        return Err(Error::InvalidParameter {
            name: n_name,
            reason: format!("need at least {MIN_CELLS} cells, got {n}"),
        });
    }
    Ok(())
}

/// One scalar quantity sampled at cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    domain: Domain,
    values: Vec<f64>,
}

impl Field {
    pub fn new(domain: Domain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::Domain(format!(
                "field has {} values, domain has {} cells",
                values.len(),
                domain.len()
            )));
        }
        if let Some(k) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("field value at cell {k}")));
        }
        Ok(Self { domain, values })
    }

    pub(crate) fn from_vec_unchecked(domain: Domain, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), domain.len());
        Self { domain, values }
    }

    pub fn constant(domain: Domain, c: f64) -> Self {
        Self {
            domain,
            values: vec![c; domain.len()],
        }
    }

    pub fn zeros(domain: Domain) -> Self {
        Self::constant(domain, 0.0)
    }

    /// Samples `f(x, y)` at every cell center.
    pub fn from_fn(domain: Domain, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = domain.centers().map(|(x, y)| f(x, y)).collect();
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field::from_vec_unchecked(self.domain, self.values.iter().map(|&x| f(x)).collect())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Reflects the field about `x = lx/2`.
    pub fn mirrored_x(&self) -> Field {
        let nx = self.domain.nx;
        let mut out = self.values.clone();
        for (row_in, row_out) in self.values.chunks(nx).zip(out.chunks_mut(nx)) {
            for i in 0..nx {
                row_out[i] = row_in[nx - 1 - i];
            }
        }
        Field::from_vec_unchecked(self.domain, out)
    }

    /// Writes `x[,y],value` rows with round-trip precision.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        if self.domain.dim == 1 {
            writeln!(out, "x,value")?;
        } else {
            writeln!(out, "x,y,value")?;
        }
        for (k, &value) in self.values.iter().enumerate() {
            let (x, y) = self.domain.center(k);
            if self.domain.dim == 1 {
                writeln!(out, "{},{}", fmt_f64(x), fmt_f64(value))?;
            } else {
                writeln!(out, "{},{},{}", fmt_f64(x), fmt_f64(y), fmt_f64(value))?;
            }
        }
        Ok(())
    }

    /// Reads the format produced by [`Field::write_csv`]; rows must be in cell order.
    pub fn read_csv<R: BufRead>(domain: Domain, input: R) -> Result<Field> {
        let mut values = Vec::with_capacity(domain.len());
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::Domain(format!("reading field csv: {e}")))?;
            let line = line.trim();
            if lineno == 0 || line.is_empty() {
                continue;
            }
            let last = line.rsplit(',').next().unwrap_or("");
            let value: f64 = last.trim().parse().map_err(|_| {
                Error::Domain(format!("line {}: cannot parse value `{last}`", lineno + 1))
            })?;
            values.push(value);
        }
        Field::new(domain, values)
    }
}

/// Fixed-width scientific formatting with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A cell-centered vector field; `y` is identically zero in 1D.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Gradient {
    pub fn zeros(n: usize) -> Self {
        Self {
            x: vec![0.0; n],
            y: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Gradient {
        Gradient {
            x: self.x.iter().map(|g| s * g).collect(),
            y: self.y.iter().map(|g| s * g).collect(),
        }
    }

    /// Largest Euclidean length over all cells.
    pub fn max_norm(&self) -> f64 {
        self.x
            .iter()
            .zip(&self.y)
            .map(|(a, b)| a.hypot(*b))
            .fold(0.0, f64::max)
    }
}

/// Velocities normal to cell faces.
///
/// `x` holds `ny × (nx+1)` values (face `i` of row `j` sits between cells
/// `i-1` and `i`), `y` holds `(ny+1) × nx` values in 2D and is empty in 1D.
/// Boundary faces are always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceVelocity {
    domain: Domain,
    pub(crate) x: Vec<f64>,
    pub(crate) y: Vec<f64>,
}

impl FaceVelocity {
    pub fn zeros(domain: Domain) -> Self {
        let x = vec![0.0; domain.ny * (domain.nx + 1)];
        let y = if domain.dim == 2 {
            vec![0.0; (domain.ny + 1) * domain.nx]
        } else {
            Vec::new()
        };
        Self { domain, x, y }
    }

    /// Same velocity on every interior face.
    pub fn uniform(domain: Domain, vx: f64, vy: f64) -> Self {
        let mut vel = Self::zeros(domain);
        let (nx, ny) = (domain.nx, domain.ny);
        for j in 0..ny {
            for i in 1..nx {
                vel.x[j * (nx + 1) + i] = vx;
            }
        }
        if domain.dim == 2 {
            for j in 1..ny {
                for i in 0..nx {
                    vel.y[j * nx + i] = vy;
                }
            }
        }
        vel
    }

    /// `coeff · ∇ψ` on faces, from two-point differences across each face.
    pub fn from_potential(psi: &Field, coeff: f64) -> Self {
        let mut vel = Self::zeros(psi.domain);
        vel.set_from_potential(psi.values(), coeff);
        vel
    }

    pub(crate) fn set_from_potential(&mut self, psi: &[f64], coeff: f64) {
        let d = self.domain;
        let (nx, ny) = (d.nx, d.ny);
        let sx = coeff / d.dx();
        for j in 0..ny {
            let row = &psi[j * nx..(j + 1) * nx];
            let faces = &mut self.x[j * (nx + 1)..(j + 1) * (nx + 1)];
            faces[0] = 0.0;
            faces[nx] = 0.0;
            for i in 1..nx {
                faces[i] = sx * (row[i] - row[i - 1]);
            }
        }
        if d.dim == 2 {
            let sy = coeff / d.dy();
            self.y[..nx].fill(0.0);
            self.y[ny * nx..].fill(0.0);
            for j in 1..ny {
                for i in 0..nx {
                    self.y[j * nx + i] = sy * (psi[j * nx + i] - psi[(j - 1) * nx + i]);
                }
            }
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn x_faces(&self) -> &[f64] {
        &self.x
    }

    pub fn y_faces(&self) -> &[f64] {
        &self.y
    }

    /// Largest face speed.
    pub fn max_speed(&self) -> f64 {
        self.x
            .iter()
            .chain(&self.y)
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }
}

/// `d Δf` with zero-flux boundaries (3-point / 5-point stencil in flux form).
pub fn laplacian_neumann(f: &Field, d: f64) -> Field {
    let mut out = vec![0.0; f.len()];
    laplacian_into(f.domain(), f.values(), d, &mut out);
    Field::from_vec_unchecked(*f.domain(), out)
}

pub(crate) fn laplacian_into(domain: &Domain, f: &[f64], d: f64, out: &mut [f64]) {
    let (nx, ny) = (domain.nx, domain.ny);
    let cx = d / (domain.dx() * domain.dx());
    for j in 0..ny {
        let row = &f[j * nx..(j + 1) * nx];
        let o = &mut out[j * nx..(j + 1) * nx];
        // mirrored ghosts: the boundary difference is zero
        o[0] = cx * (row[1] - row[0]);
        for i in 1..nx - 1 {
            o[i] = cx * ((row[i + 1] - row[i]) - (row[i] - row[i - 1]));
        }
        o[nx - 1] = cx * (0.0 - (row[nx - 1] - row[nx - 2]));
    }
    if domain.dim == 2 {
        let cy = d / (domain.dy() * domain.dy());
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                let up = if j + 1 < ny { f[k + nx] - f[k] } else { 0.0 };
                let down = if j > 0 { f[k] - f[k - nx] } else { 0.0 };
                out[k] += cy * (up - down);
            }
        }
    }
}

/// Conservative donor-cell discretization of `∇·(ρ a)` for face velocities `a`.
pub fn upwind_advection_divergence(rho: &Field, velocity: &FaceVelocity) -> Result<Field> {
    if rho.domain() != velocity.domain() {
        return Err(Error::Domain("density and velocity live on different domains".into()));
    }
    if rho.values().iter().any(|&r| r < 0.0) {
        return Err(Error::Domain("advected density must be nonnegative".into()));
    }
    let mut out = vec![0.0; rho.len()];
    upwind_divergence_into(rho.values(), velocity, &mut out);
    Ok(Field::from_vec_unchecked(*rho.domain(), out))
}

#[inline]
fn donor_flux(a: f64, left: f64, right: f64) -> f64 {
    if a > 0.0 {
        a * left
    } else {
        a * right
    }
}

pub(crate) fn upwind_divergence_into(rho: &[f64], velocity: &FaceVelocity, out: &mut [f64]) {
    let d = velocity.domain;
    let (nx, ny) = (d.nx, d.ny);
    let inv_dx = 1.0 / d.dx();
    for j in 0..ny {
        let row = &rho[j * nx..(j + 1) * nx];
        let faces = &velocity.x[j * (nx + 1)..(j + 1) * (nx + 1)];
        let o = &mut out[j * nx..(j + 1) * nx];
        let mut flux_left = 0.0;
        for i in 0..nx {
            let flux_right = if i + 1 < nx {
                donor_flux(faces[i + 1], row[i], row[i + 1])
            } else {
                0.0
            };
            o[i] = (flux_right - flux_left) * inv_dx;
            flux_left = flux_right;
        }
    }
    if d.dim == 2 {
        let inv_dy = 1.0 / d.dy();
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                let top = if j + 1 < ny {
                    donor_flux(velocity.y[(j + 1) * nx + i], rho[k], rho[k + nx])
                } else {
                    0.0
                };
                let bottom = if j > 0 {
                    donor_flux(velocity.y[j * nx + i], rho[k - nx], rho[k])
                } else {
                    0.0
                };
                out[k] += (top - bottom) * inv_dy;
            }
        }
    }
}

/// Centered differences with mirrored ghost cells; at a boundary cell the
/// normal component reduces to the half-difference toward the interior.
pub fn gradient_centered(f: &Field) -> Gradient {
    let d = f.domain;
    let (nx, ny) = (d.nx, d.ny);
    let v = f.values();
    let mut g = Gradient::zeros(v.len());
    let sx = 0.5 / d.dx();
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            let right = if i + 1 < nx { v[k + 1] } else { v[k] };
            let left = if i > 0 { v[k - 1] } else { v[k] };
            g.x[k] = sx * (right - left);
        }
    }
    if d.dim == 2 {
        let sy = 0.5 / d.dy();
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                let up = if j + 1 < ny { v[k + nx] } else { v[k] };
                let down = if j > 0 { v[k - nx] } else { v[k] };
                g.y[k] = sy * (up - down);
            }
        }
    }
    g
}

/// Midpoint-rule integral over the domain.
pub fn integrate(f: &Field) -> f64 {
    f.values().iter().sum::<f64>() * f.domain().cell_measure()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

pub fn norms(f: &Field) -> Norms {
    norms_of(f.values(), f.domain().cell_measure())
}

pub(crate) fn norms_of(values: &[f64], cell_measure: f64) -> Norms {
    let (mut l1, mut l2, mut linf) = (0.0f64, 0.0f64, 0.0f64);
    for &x in values {
        let a = x.abs();
        l1 += a;
        l2 += x * x;
        linf = linf.max(a);
    }
    Norms {
        l1: l1 * cell_measure,
        l2: (l2 * cell_measure).sqrt(),
        linf,
    }
}
