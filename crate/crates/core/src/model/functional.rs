use crate::discretization::{first_derivative_central, trapezoid_slice, Field, GridSpec};
use crate::error::{Error, Result};
use crate::model::{ProfileSpec, StringParams};

/// Relative tolerance for the agreement of the two Lyapunov forms.
const FORM_TOLERANCE: f64 = 1e-10;

/// `E = int 1/2 w^2 + 1/2 (1 - v^2) y_x^2 + b/8 y_x^4 dx`.
pub fn energy_e(y: &Field, w: &Field, params: &StringParams) -> Result<f64> {
    let grid = y.grid();
    grid.check_same(&w.grid())?;
    let yx = first_derivative_central(y);
    let tension = 1.0 - params.v() * params.v();
    let b8 = params.b() / 8.0;
    let integrand: Vec<f64> = w
        .values()
        .iter()
        .zip(yx.values())
        .map(|(&wi, &s)| {
            let s2 = s * s;
            0.5 * wi * wi + 0.5 * tension * s2 + b8 * s2 * s2
        })
        .collect();
    Ok(trapezoid_slice(&integrand, grid.h()))
}

/// Both algebraic forms of the Lyapunov functional on one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovForms {
    /// `E + delta int (y w + delta y^2 + eta/4 y_x^4) dx`
    pub expanded: f64,
    /// Sum of four nonnegative integrals.
    pub squares: f64,
}

pub fn lyapunov_forms(y: &Field, w: &Field, params: &StringParams) -> Result<LyapunovForms> {
    let grid = y.grid();
    grid.check_same(&w.grid())?;
    let h = grid.h();
    let yx = first_derivative_central(y);
    let (v, b, delta, eta) = (params.v(), params.b(), params.delta(), params.eta());
    let tension = 1.0 - v * v;

    let e = energy_e(y, w, params)?;
    let cross: Vec<f64> = y
        .values()
        .iter()
        .zip(w.values())
        .zip(yx.values())
        .map(|((&yi, &wi), &s)| yi * wi + delta * yi * yi + 0.25 * eta * s.powi(4))
        .collect();
    let expanded = e + delta * trapezoid_slice(&cross, h);

    let quartic = b / 8.0 + delta * eta / 4.0;
    let squares_integrand: Vec<f64> = y
        .values()
        .iter()
        .zip(w.values())
        .zip(yx.values())
        .map(|((&yi, &wi), &s)| {
            let shifted = wi + delta * yi;
            let s2 = s * s;
            0.5 * shifted * shifted
                + 0.5 * delta * delta * yi * yi
                + 0.5 * tension * s2
                + quartic * s2 * s2
        })
        .collect();
    let squares = trapezoid_slice(&squares_integrand, h);
    Ok(LyapunovForms { expanded, squares })
}

/// Lyapunov functional, reported from the sum-of-squares form after checking
/// it against the expanded form.
pub fn lyapunov_v(y: &Field, w: &Field, params: &StringParams) -> Result<f64> {
    let LyapunovForms { expanded, squares } = lyapunov_forms(y, w, params)?;
    let scale = expanded.abs().max(squares.abs()).max(f64::MIN_POSITIVE);
    if (expanded - squares).abs() > FORM_TOLERANCE * scale {
        return Err(Error::FormMismatch { expanded, squares });
    }
    Ok(squares)
}

/// `V(0)` from the initial profiles sampled on `grid`.
pub fn initial_v(
    f: &ProfileSpec,
    g: &ProfileSpec,
    params: &StringParams,
    grid: GridSpec,
) -> Result<f64> {
    f.validate()?;
    g.validate()?;
    let y = f.sample(grid);
    let w = g.sample(grid);
    if f.is_identically_zero() && g.is_identically_zero()
        || y.max_abs() == 0.0 && w.max_abs() == 0.0
    {
        return Err(Error::DegenerateInitialData);
    }
    lyapunov_v(&y, &w, params)
}
