//! Uniform-grid operators on the unit interval.
//!
//! Nodes sit at `x_i = i h`, `i = 0..=n`, and half-node quantities at
//! `x_{i+1/2}`. Both nonlinear terms of the string equation are assembled
//! in flux form, so the discrete pairing of [`flux_divergence`] with a
//! Dirichlet field telescopes exactly against [`gradient_half`]:
//!
//! ```text
//! sum_{interior} u_i (Dq)_i h = - sum_{i} q_{i+1/2} (Gu)_{i+1/2} h
//! ```
//!
//! Boundary rows of the stencils are left at zero; they are owned by the
//! boundary enforcement in the integrator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::StringParams;

pub const MIN_CELLS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < MIN_CELLS {
            return Err(Error::InvalidGrid(format!(
                "n = {n} cells, need at least {MIN_CELLS}"
            )));
        }
        let h = 1.0 / n as f64;
        if h * n as f64 != 1.0 {
            return Err(Error::InvalidGrid(format!(
                "n = {n}: spacing 1/n does not reproduce the unit length in f64"
            )));
        }
        Ok(Self { n })
    }

    /// Number of cells; there are `n + 1` nodes.
    pub fn cells(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> usize {
        self.n + 1
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 / self.n as f64
    }

    pub fn x_half(&self, i: usize) -> f64 {
        (i as f64 + 0.5) / self.n as f64
    }

    pub fn refined(&self) -> Result<Self> {
        Self::new(self.n * 2)
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GridMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

/// Nodal samples on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.nodes()],
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.nodes()).map(|i| f(grid.x(i))).collect();
        Self { grid, values }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nodes() {
            return Err(Error::InvalidGrid(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.nodes()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_dirichlet(&self) -> bool {
        self.values[0] == 0.0 && self.values[self.grid.n] == 0.0
    }

    pub fn set_dirichlet(&mut self) {
        let n = self.grid.n;
        self.values[0] = 0.0;
        self.values[n] = 0.0;
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        self.grid.check_same(&other.grid)?;
        Ok(Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// `self + scale * other`.
    pub fn axpy(&self, scale: f64, other: &Field) -> Field {
        debug_assert_eq!(self.grid, other.grid);
        Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a + scale * b)
                .collect(),
        }
    }
}

/// Samples at the `n` midpoints `x_{i+1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl HalfField {
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.cells()).map(|i| f(grid.x_half(i))).collect();
        Self { grid, values }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(Error::InvalidGrid(format!(
                "half field has {} values, grid has {} cells",
                values.len(),
                grid.cells()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> HalfField {
        HalfField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// `s_{i+1/2} = (y_{i+1} - y_i) / h`.
pub fn gradient_half(y: &Field) -> HalfField {
    let h = y.grid.h();
    let values = y.values.windows(2).map(|p| (p[1] - p[0]) / h).collect();
    HalfField {
        grid: y.grid,
        values,
    }
}

/// Interior nodes get `(q_{i+1/2} - q_{i-1/2}) / h`; boundary nodes are zero.
pub fn flux_divergence(q: &HalfField) -> Field {
    let grid = q.grid;
    let h = grid.h();
    let mut out = vec![0.0; grid.nodes()];
    for (i, pair) in q.values.windows(2).enumerate() {
        out[i + 1] = (pair[1] - pair[0]) / h;
    }
    Field { grid, values: out }
}

/// Central differences inside, second-order one-sided closures at both ends.
pub fn first_derivative_central(u: &Field) -> Field {
    let grid = u.grid;
    let n = grid.n;
    let h = grid.h();
    let v = &u.values;
    let mut out = vec![0.0; grid.nodes()];
    for i in 1..n {
        out[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    out[n] = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h);
    Field { grid, values: out }
}

/// Three-point second difference at interior nodes; boundary nodes are zero.
pub fn second_derivative_central(u: &Field) -> Field {
    let grid = u.grid;
    let h2 = grid.h() * grid.h();
    let mut out = vec![0.0; grid.nodes()];
    for (i, win) in u.values.windows(3).enumerate() {
        out[i + 1] = (win[2] - 2.0 * win[1] + win[0]) / h2;
    }
    Field { grid, values: out }
}

/// Like [`second_derivative_central`] but with second-order one-sided
/// four-point closures at the ends, for quadrature of boundary-weighted
/// integrands.
pub fn second_derivative_closed(u: &Field) -> Field {
    let mut out = second_derivative_central(u);
    let n = u.grid.n;
    let h2 = u.grid.h() * u.grid.h();
    let v = &u.values;
    out.values[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
    out.values[n] = (2.0 * v[n] - 5.0 * v[n - 1] + 4.0 * v[n - 2] - v[n - 3]) / h2;
    out
}

/// Composite trapezoid rule over the nodal samples.
pub fn trapezoid(u: &Field) -> f64 {
    trapezoid_slice(&u.values, u.grid.h())
}

pub(crate) fn trapezoid_slice(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    let inner: f64 = values[1..n].iter().sum();
    h * (0.5 * values[0] + inner + 0.5 * values[n])
}

/// The part of the acceleration that depends on displacement only:
/// `(1 - v^2) D2 y + (b/2) D(s^3)`.
pub fn elastic_acceleration(y: &Field, params: &StringParams) -> Field {
    let s = gradient_half(y);
    let tension = 1.0 - params.v() * params.v();
    let half_b = 0.5 * params.b();
    let cubic = flux_divergence(&s.map(|si| half_b * si * si * si));
    let linear = flux_divergence(&s.map(|si| tension * si));
    linear.axpy(1.0, &cubic)
}

/// The part of the acceleration that is linear in velocity, with the
/// Kelvin-Voigt coefficient `s^2` supplied by the caller:
/// `-2 delta w - 2 v D1 w + eta D(s^2 Gw)`.
pub fn velocity_acceleration(w: &Field, s_squared: &HalfField, params: &StringParams) -> Field {
    let grid = w.grid;
    let n = grid.n;
    let h = grid.h();
    let (v, delta, eta) = (params.v(), params.delta(), params.eta());
    let wv = &w.values;
    let q = &s_squared.values;
    let mut out = vec![0.0; grid.nodes()];
    for i in 1..n {
        let advection = (wv[i + 1] - wv[i - 1]) / (2.0 * h);
        let flux_right = q[i] * (wv[i + 1] - wv[i]) / h;
        let flux_left = q[i - 1] * (wv[i] - wv[i - 1]) / h;
        out[i] = -2.0 * delta * wv[i] - 2.0 * v * advection + eta * (flux_right - flux_left) / h;
    }
    Field { grid, values: out }
}

/// Full right-hand side of the `w` equation at interior nodes; boundary
/// nodes carry zero.
pub fn rhs_acceleration(
    y: &Field,
    w: &Field,
    params: &StringParams,
    forcing: &Field,
) -> Result<Field> {
    y.grid.check_same(&w.grid)?;
    y.grid.check_same(&forcing.grid)?;
    let s = gradient_half(y);
    let s2 = s.map(|si| si * si);
    let mut acc = elastic_acceleration(y, params).axpy(1.0, &velocity_acceleration(w, &s2, params));
    let n = y.grid.n;
    for i in 1..n {
        acc.values[i] += forcing.values[i];
    }
    acc.set_dirichlet();
    Ok(acc)
}
