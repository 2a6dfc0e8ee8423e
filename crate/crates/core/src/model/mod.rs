//! Physical parameters and the closed-form constants of the damped string:
//! the sandwich constant `K`, the critical speed, the guaranteed decay
//! exponent and the bounded-input bounded-output bound.

mod functional;
mod profile;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use functional::{energy_e, initial_v, lyapunov_forms, lyapunov_v, LyapunovForms};
pub use profile::{ForcingSpec, ProfileSpec, NOISE_MODES};

/// Unvalidated parameter tuple as it arrives from a config file or a caller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParams {
    pub v: f64,
    pub b: f64,
    pub delta: f64,
    pub eta: f64,
}

/// Axial speed `v`, nonlinear stiffness `b`, viscous damping `delta` and
/// Kelvin-Voigt damping `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct StringParams {
    v: f64,
    b: f64,
    delta: f64,
    eta: f64,
}

impl StringParams {
    pub fn new(v: f64, b: f64, delta: f64, eta: f64) -> Result<Self> {
        validate_params(RawParams { v, b, delta, eta })
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn with_v(self, v: f64) -> Result<Self> {
        Self::new(v, self.b, self.delta, self.eta)
    }

    pub fn with_delta(self, delta: f64) -> Result<Self> {
        Self::new(self.v, self.b, delta, self.eta)
    }

    pub fn raw(&self) -> RawParams {
        RawParams {
            v: self.v,
            b: self.b,
            delta: self.delta,
            eta: self.eta,
        }
    }
}

impl TryFrom<RawParams> for StringParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        validate_params(raw)
    }
}

impl From<StringParams> for RawParams {
    fn from(p: StringParams) -> Self {
        p.raw()
    }
}

/// Accepts `0 <= v < 1`, `b >= 0`, `delta >= 0`, `eta >= 0`. Nothing is clamped.
///
/// `b = 0` is admitted so the linear wave limit can be expressed; operations
/// that divide by `b` reject it themselves.
pub fn validate_params(raw: RawParams) -> Result<StringParams> {
    let RawParams { v, b, delta, eta } = raw;
    let check = |name, value: f64, ok: bool, reason| {
        if value.is_finite() && ok {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                name,
                value,
                reason,
            })
        }
    };
    check("v", v, (0.0..1.0).contains(&v), "need 0 <= v < 1")?;
    check("b", b, b >= 0.0, "need b >= 0")?;
    check("delta", delta, delta >= 0.0, "need delta >= 0")?;
    check("eta", eta, eta >= 0.0, "need eta >= 0")?;
    Ok(StringParams { v, b, delta, eta })
}

/// `(sqrt(5) - 1) / 2`, the positive root of `1 - v - v^2`.
pub fn critical_speed() -> f64 {
    (5.0_f64.sqrt() - 1.0) / 2.0
}

/// `K = 1 + delta * max{(1 + 2 delta/pi) / (pi (1 - v^2)), 2 eta / b}`.
pub fn compute_k(params: &StringParams) -> Result<f64> {
    let StringParams { v, b, delta, eta } = *params;
    if delta == 0.0 {
        return Ok(1.0);
    }
    let poincare = (1.0 + 2.0 * delta / PI) / (PI * (1.0 - v * v));
    let quartic = if eta == 0.0 {
        0.0
    } else if b > 0.0 {
        2.0 * eta / b
    } else {
        return Err(Error::HypothesisViolated(
            "K needs b > 0 when delta and eta are both positive".into(),
        ));
    };
    Ok(1.0 + delta * poincare.max(quartic))
}

fn require_theorem_hypotheses(params: &StringParams) -> Result<()> {
    if params.delta <= 0.0 {
        return Err(Error::HypothesisViolated(
            "exponential decay needs viscous damping delta > 0".into(),
        ));
    }
    let vc = critical_speed();
    if params.v >= vc {
        return Err(Error::HypothesisViolated(format!(
            "speed v = {} is not below the critical speed {vc}",
            params.v
        )));
    }
    Ok(())
}

/// Guaranteed exponent `2 delta (1 - v - v^2) / (K (1 - v^2))`.
pub fn decay_rate(params: &StringParams) -> Result<f64> {
    require_theorem_hypotheses(params)?;
    let k = compute_k(params)?;
    let v = params.v;
    Ok(2.0 * params.delta * (1.0 - v - v * v) / (k * (1.0 - v * v)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub k: f64,
    pub v_c: f64,
    /// Zero when the decay theorem does not apply.
    pub lambda: f64,
}

impl BoundConstants {
    pub fn for_params(params: &StringParams) -> Result<Self> {
        Ok(Self {
            k: compute_k(params)?,
            v_c: critical_speed(),
            lambda: decay_rate(params).unwrap_or(0.0),
        })
    }
}

/// Prefactor `sqrt(K / (eps [(2 delta - eps K)(1 - v^2) - 2 delta v]))`.
fn bibo_prefactor(params: &StringParams, k: f64, lambda: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < lambda) {
        return Err(Error::EpsilonInfeasible {
            eps,
            reason: "need 0 < eps < 2 delta (1 - v - v^2) / (K (1 - v^2))",
        });
    }
    let StringParams { v, delta, .. } = *params;
    let denom = eps * ((2.0 * delta - eps * k) * (1.0 - v * v) - 2.0 * delta * v);
    if denom <= 0.0 {
        return Err(Error::EpsilonInfeasible {
            eps,
            reason: "bound denominator is not positive",
        });
    }
    Ok((k / denom).sqrt())
}

/// Upper bound on `sup_t sup_x |y|` given `sup_t ||F(., t)||_2`.
pub fn bibo_bound(params: &StringParams, eps: f64, f_x2_norm: f64) -> Result<f64> {
    require_theorem_hypotheses(params)?;
    if !(f_x2_norm >= 0.0 && f_x2_norm.is_finite()) {
        return Err(Error::OutOfRange {
            name: "f_x2_norm",
            value: f_x2_norm,
            reason: "need a finite nonnegative norm",
        });
    }
    let k = compute_k(params)?;
    let lambda = decay_rate(params)?;
    Ok(bibo_prefactor(params, k, lambda, eps)? * f_x2_norm)
}

/// Golden-section minimisation of the BIBO prefactor over the feasible
/// window `(0, lambda)`.
pub fn optimize_epsilon(params: &StringParams) -> Result<f64> {
    require_theorem_hypotheses(params)?;
    let k = compute_k(params)?;
    let lambda = decay_rate(params)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::EmptyFeasibleSet);
    }
    let cost = |eps: f64| bibo_prefactor(params, k, lambda, eps).unwrap_or(f64::INFINITY);

    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, lambda);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (cost(c), cost(d));
    while hi - lo > 1e-10 * lambda {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = cost(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = cost(d);
        }
    }
    let eps = 0.5 * (lo + hi);
    if cost(eps).is_finite() {
        Ok(eps)
    } else {
        Err(Error::EmptyFeasibleSet)
    }
}
