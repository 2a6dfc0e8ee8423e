//! Verdicts from trajectories: decay-bound checks, monotonicity, the
//! integration-by-parts residuals, BIBO experiments, grid convergence and
//! speed sweeps.

mod identities;
mod studies;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::SimState;
use crate::model::{decay_rate, energy_e, lyapunov_v, StringParams};

pub use identities::{
    identities_converge, lemma_residuals, poincare_slack, refinement_ratios, IdentityReport,
    ROUNDOFF_FLOOR,
};
pub use studies::{
    bibo_experiment, convergence_study, sweep, BiboReport, ConvergenceReport, SweepRow,
};

/// Minimum number of samples `fit_decay` accepts inside its window.
pub const MIN_FIT_SAMPLES: usize = 10;
/// Default relative slack of the decay-bound check.
pub const DEFAULT_DECAY_TOL: f64 = 0.02;
/// Default relative per-pair slack of the monotonicity check.
pub const DEFAULT_MONOTONE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub t: f64,
    pub e: f64,
    pub v: f64,
    pub sup_y: f64,
    /// Centered difference of `V`; absent at both ends of the series.
    pub dvdt_est: Option<f64>,
}

pub fn energy_series(states: &[SimState], params: &StringParams) -> Result<Vec<EnergySample>> {
    let mut out = states
        .iter()
        .map(|s| {
            Ok(EnergySample {
                t: s.t,
                e: energy_e(&s.y, &s.w, params)?,
                v: lyapunov_v(&s.y, &s.w, params)?,
                sup_y: s.y.max_abs(),
                dvdt_est: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    for k in 1..out.len().saturating_sub(1) {
        let (prev, next) = (out[k - 1], out[k + 1]);
        out[k].dvdt_est = Some((next.v - prev.v) / (next.t - prev.t));
    }
    Ok(out)
}

/// Negated least-squares slope of `ln V` against `t` over `window`
/// (default: the middle 80% of the time span).
pub fn fit_decay(series: &[EnergySample], window: Option<(f64, f64)>) -> Result<f64> {
    let (lo, hi) = window.unwrap_or_else(|| {
        let t_end = series.last().map_or(0.0, |s| s.t);
        (0.1 * t_end, 0.9 * t_end)
    });
    let picked: Vec<&EnergySample> = series.iter().filter(|s| s.t >= lo && s.t <= hi).collect();
    if picked.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_FIT_SAMPLES,
            found: picked.len(),
        });
    }
    if let Some(bad) = picked.iter().find(|s| s.v.is_nan() || s.v <= 0.0) {
        return Err(Error::NonPositiveV {
            t: bad.t,
            value: bad.v,
        });
    }
    let m = picked.len() as f64;
    let t_mean = picked.iter().map(|s| s.t).sum::<f64>() / m;
    let l_mean = picked.iter().map(|s| s.v.ln()).sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for s in &picked {
        let dt = s.t - t_mean;
        sxy += dt * (s.v.ln() - l_mean);
        sxx += dt * dt;
    }
    Ok(-sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub lambda_bound: f64,
    pub lambda_measured: f64,
    /// `max_k V(t_k) / (V(0) exp(-lambda t_k)) - 1`
    pub max_violation: f64,
    pub tol: f64,
    pub verdict: Verdict,
}

pub fn check_decay_bound(
    series: &[EnergySample],
    params: &StringParams,
    tol: f64,
) -> Result<DecayReport> {
    let lambda = decay_rate(params)?;
    let first = series.first().ok_or(Error::InsufficientSamples {
        needed: 1,
        found: 0,
    })?;
    let (t0, v0) = (first.t, first.v);
    let mut max_violation = f64::NEG_INFINITY;
    for s in series {
        let bound = v0 * (-lambda * (s.t - t0)).exp();
        let ratio = if bound > 0.0 {
            s.v / bound - 1.0
        } else if s.v > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        max_violation = max_violation.max(ratio);
    }
    let lambda_measured = fit_decay(series, None)?;
    Ok(DecayReport {
        lambda_bound: lambda,
        lambda_measured,
        max_violation,
        tol,
        verdict: Verdict::from_bool(max_violation <= tol),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Functional {
    E,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub which: Functional,
    pub tol: f64,
    /// Largest relative increase between consecutive samples (may be negative).
    pub worst_uptick: f64,
    /// Index `k` of the first pair `(k, k+1)` exceeding `tol`.
    pub first_offending: Option<usize>,
    pub verdict: Verdict,
}

pub fn check_monotone(series: &[EnergySample], which: Functional, tol: f64) -> MonotoneReport {
    let pick = |s: &EnergySample| match which {
        Functional::E => s.e,
        Functional::V => s.v,
    };
    let mut worst = f64::NEG_INFINITY;
    let mut first = None;
    for (k, pair) in series.windows(2).enumerate() {
        let (a, b) = (pick(&pair[0]), pick(&pair[1]));
        let rise = if a > 0.0 {
            (b - a) / a
        } else if b > a {
            f64::INFINITY
        } else {
            0.0
        };
        worst = worst.max(rise);
        if rise > tol && first.is_none() {
            first = Some(k);
        }
    }
    if series.len() < 2 {
        worst = 0.0;
    }
    MonotoneReport {
        which,
        tol,
        worst_uptick: worst,
        first_offending: first,
        verdict: Verdict::from_bool(first.is_none()),
    }
}

/// `max_k V_k / (K E_k) - 1`; nonpositive when the sandwich holds.
pub fn sandwich_excess(series: &[EnergySample], k: f64) -> f64 {
    series
        .iter()
        .map(|s| {
            if s.e > 0.0 {
                s.v / (k * s.e) - 1.0
            } else if s.v > 0.0 {
                f64::INFINITY
            } else {
                -1.0
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}
