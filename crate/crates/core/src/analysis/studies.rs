use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretization::{trapezoid, Field, GridSpec};
use crate::error::{Error, Result};
use crate::integrator::{run, Manufactured, SimConfig};
use crate::model::{bibo_bound, decay_rate, optimize_epsilon, ProfileSpec};

use super::{check_decay_bound, fit_decay, Verdict};

/// Lowest sample rate (per unit time) used for sup-in-time norms.
pub const BIBO_MIN_STRIDE: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiboReport {
    /// `sup_t ||F(., t)||_2` over the recorded samples.
    pub f_x2_norm: f64,
    /// `sup_{x,t} |F|` over the recorded samples.
    pub f_xinf_norm: f64,
    pub sup_y_measured: f64,
    pub epsilon_star: f64,
    pub bound: f64,
    pub verdict: Verdict,
}

/// Forced run from rest; compares the observed `sup |y|` with the bound at
/// the optimal `eps`. The initial profiles of `config` are replaced by zero.
pub fn bibo_experiment(config: &SimConfig) -> Result<BiboReport> {
    let eps = optimize_epsilon(&config.params)?;
    let mut cfg = config.clone();
    cfg.f = ProfileSpec::Zero;
    cfg.g = ProfileSpec::Zero;
    cfg.mms = None;
    cfg.output_stride = cfg.output_stride.max(BIBO_MIN_STRIDE);

    let traj = run(&cfg)?;
    let (mut f_x2, mut f_inf, mut sup_y) = (0.0_f64, 0.0_f64, 0.0_f64);
    for s in &traj.states {
        let load = cfg.forcing.sample(cfg.grid, s.t);
        f_x2 = f_x2.max(trapezoid(&load.map(|f| f * f)).sqrt());
        f_inf = f_inf.max(load.max_abs());
        sup_y = sup_y.max(s.y.max_abs());
    }
    let bound = bibo_bound(&cfg.params, eps, f_x2)?;
    Ok(BiboReport {
        f_x2_norm: f_x2,
        f_xinf_norm: f_inf,
        sup_y_measured: sup_y,
        epsilon_star: eps,
        bound,
        verdict: Verdict::from_bool(sup_y <= bound),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub levels: Vec<usize>,
    pub t_end: f64,
    /// Discrete L2 error against the closed-form field at `t_end`.
    pub errors: Vec<f64>,
    /// `log2(e_k / e_{k+1})`
    pub orders: Vec<f64>,
}

impl ConvergenceReport {
    pub fn orders_within(&self, expected: f64, tol: f64) -> bool {
        self.orders.iter().all(|p| (p - expected).abs() <= tol)
    }
}

fn check_levels(levels: &[usize]) -> Result<()> {
    if levels.len() < 3 {
        return Err(Error::InvalidLevels(format!(
            "need at least 3 levels, got {}",
            levels.len()
        )));
    }
    for p in levels.windows(2) {
        if p[1] != 2 * p[0] {
            return Err(Error::InvalidLevels(format!(
                "levels must double: {} then {}",
                p[0], p[1]
            )));
        }
    }
    Ok(())
}

/// Runs `base` driven by the source of `manufactured` on each grid and
/// measures the error at `base.t_end`. Levels run in parallel.
pub fn convergence_study(
    base: &SimConfig,
    levels: &[usize],
    manufactured: &Manufactured,
) -> Result<ConvergenceReport> {
    check_levels(levels)?;
    let errors = levels
        .par_iter()
        .map(|&n| {
            let mut cfg = base.clone();
            cfg.grid = GridSpec::new(n)?;
            cfg.mms = Some(*manufactured);
            let traj = run(&cfg)?;
            let end = traj.final_state();
            let exact = Field::from_fn(cfg.grid, |x| manufactured.displacement(x, end.t));
            let diff = end.y.zip_with(&exact, |a, b| (a - b) * (a - b))?;
            Ok(trapezoid(&diff).sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    let orders = errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    Ok(ConvergenceReport {
        levels: levels.to_vec(),
        t_end: base.t_end,
        errors,
        orders,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub v: f64,
    /// Absent outside the decay theorem's hypotheses.
    pub lambda_bound: Option<f64>,
    pub lambda_measured: Option<f64>,
    pub max_violation: Option<f64>,
    pub verdict: Option<Verdict>,
    pub error: Option<String>,
}

fn sweep_row(base: &SimConfig, v: f64, tol: f64) -> SweepRow {
    let mut row = SweepRow {
        v,
        lambda_bound: None,
        lambda_measured: None,
        max_violation: None,
        verdict: None,
        error: None,
    };
    let outcome = (|| -> Result<()> {
        let mut cfg = base.clone();
        cfg.params = cfg.params.with_v(v)?;
        let traj = run(&cfg)?;
        row.lambda_measured = fit_decay(&traj.energy, None).ok();
        if let Err(e) = decay_rate(&cfg.params) {
            row.error = Some(e.to_string());
            return Ok(());
        }
        let report = check_decay_bound(&traj.energy, &cfg.params, tol)?;
        row.lambda_bound = Some(report.lambda_bound);
        row.lambda_measured = Some(report.lambda_measured);
        row.max_violation = Some(report.max_violation);
        row.verdict = Some(report.verdict);
        Ok(())
    })();
    if let Err(e) = outcome {
        row.error = Some(e.to_string());
    }
    row
}

/// One free-decay analysis per speed, in parallel. Per-row failures are
/// recorded in the row rather than aborting the sweep.
pub fn sweep(base: &SimConfig, v_values: &[f64], tol: f64) -> Vec<SweepRow> {
    v_values.par_iter().map(|&v| sweep_row(base, v, tol)).collect()
}
