//! Closed-form fields used as manufactured or exact solutions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::model::{ForcingSpec, StringParams};

/// A smooth field `y*(x, t)` vanishing at `x = 0` and `x = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Manufactured {
    Zero,
    /// `amplitude * sin(mode pi x) * exp(-rate t)`
    DecayingSine { amplitude: f64, mode: u32, rate: f64 },
    /// `amplitude * sin(mode pi x) * cos(omega t)`
    StandingWave { amplitude: f64, mode: u32, omega: f64 },
}

/// Pointwise derivatives of a manufactured field.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub y: f64,
    pub y_t: f64,
    pub y_tt: f64,
    pub y_x: f64,
    pub y_xx: f64,
    pub y_xt: f64,
    pub y_xxt: f64,
}

impl Manufactured {
    /// `sin(pi x) e^{-t}`.
    pub fn decaying_sine() -> Self {
        Manufactured::DecayingSine {
            amplitude: 1.0,
            mode: 1,
            rate: 1.0,
        }
    }

    /// `sin(pi x) cos(pi t)`, exact for the linear wave equation.
    pub fn standing_wave() -> Self {
        Manufactured::StandingWave {
            amplitude: 1.0,
            mode: 1,
            omega: PI,
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Manufactured::Zero => true,
            Manufactured::DecayingSine { amplitude, .. }
            | Manufactured::StandingWave { amplitude, .. } => amplitude == 0.0,
        }
    }

    pub fn jet(&self, x: f64, t: f64) -> Jet {
        match *self {
            Manufactured::Zero => Jet::default(),
            Manufactured::DecayingSine {
                amplitude,
                mode,
                rate,
            } => {
                let k = mode as f64 * PI;
                let (s, c) = (k * x).sin_cos();
                let a = amplitude * (-rate * t).exp();
                Jet {
                    y: a * s,
                    y_t: -rate * a * s,
                    y_tt: rate * rate * a * s,
                    y_x: a * k * c,
                    y_xx: -a * k * k * s,
                    y_xt: -rate * a * k * c,
                    y_xxt: rate * a * k * k * s,
                }
            }
            Manufactured::StandingWave {
                amplitude,
                mode,
                omega,
            } => {
                let k = mode as f64 * PI;
                let (s, c) = (k * x).sin_cos();
                let (st, ct) = (omega * t).sin_cos();
                let a = amplitude;
                Jet {
                    y: a * s * ct,
                    y_t: -a * omega * s * st,
                    y_tt: -a * omega * omega * s * ct,
                    y_x: a * k * c * ct,
                    y_xx: -a * k * k * s * ct,
                    y_xt: -a * k * omega * c * st,
                    y_xxt: a * k * k * omega * s * st,
                }
            }
        }
    }

    /// Displacement, exactly zero at the ends.
    pub fn displacement(&self, x: f64, t: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            0.0
        } else {
            self.jet(x, t).y
        }
    }

    pub fn velocity(&self, x: f64, t: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            0.0
        } else {
            self.jet(x, t).y_t
        }
    }

    /// The load `F*` for which this field solves the forced string equation.
    pub fn source(&self, params: &StringParams, x: f64, t: f64) -> f64 {
        let j = self.jet(x, t);
        let (v, b, delta, eta) = (params.v(), params.b(), params.delta(), params.eta());
        let stiffness = 1.0 - v * v + 1.5 * b * j.y_x * j.y_x;
        let kv_flux_x = 2.0 * j.y_x * j.y_xx * j.y_xt + j.y_x * j.y_x * j.y_xxt;
        j.y_tt + 2.0 * delta * j.y_t + 2.0 * v * j.y_xt - stiffness * j.y_xx - eta * kv_flux_x
    }
}

/// Forcing that turns `manufactured` into an exact solution for `params`.
pub fn mms_source(manufactured: &Manufactured, params: &StringParams) -> ForcingSpec {
    if manufactured.is_zero() {
        return ForcingSpec::Zero;
    }
    ForcingSpec::Manufactured {
        solution: *manufactured,
        params: *params,
    }
}
