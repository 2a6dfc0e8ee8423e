use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::discretization::{
    first_derivative_central, gradient_half, second_derivative_closed, trapezoid_slice, Field,
};
use crate::error::Result;

use super::Verdict;

/// Residuals below this magnitude are treated as exact zeros when forming
/// refinement ratios (symmetric data can cancel an identity to round-off).
pub const ROUNDOFF_FLOOR: f64 = 1e-13;

/// Integration-by-parts residuals for one `(y, w)` pair on one grid.
///
/// Entries `a`..`h` in order; entry `e` is the slack of the inequality
/// `-2 int y w_x <= int y_x^2 + int w^2`, all others are `LHS - RHS` of an
/// identity whose continuum value is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub n: usize,
    pub residuals: [f64; 8],
}

impl IdentityReport {
    pub const LABELS: [&'static str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];
    pub const SLACK_INDEX: usize = 4;

    pub fn slack(&self) -> f64 {
        self.residuals[Self::SLACK_INDEX]
    }
}

/// Evaluates each integrand with nodal second-order differences (`w`
/// standing in for `y_t`) and integrates by the trapezoid rule.
///
/// The Kelvin-Voigt flux `(y_x^2 w_x)_x` is expanded by the product rule.
/// The right-hand sides of `d` and `h` are midpoint sums of half-node
/// differences: pairing them with the nodal left-hand sides keeps the
/// residual's leading term in the interior, so it falls off cleanly as
/// `h^2` rather than through end-stencil terms that can cancel.
pub fn lemma_residuals(y: &Field, w: &Field) -> Result<IdentityReport> {
    let grid = y.grid();
    grid.check_same(&w.grid())?;
    let h = grid.h();
    let yx = first_derivative_central(y);
    let yxx = second_derivative_closed(y);
    let wx = first_derivative_central(w);
    let wxx = second_derivative_closed(w);
    let s = gradient_half(y);
    let gw = gradient_half(w);
    let midpoint = |f: &dyn Fn(f64, f64) -> f64| -> f64 {
        s.values().iter().zip(gw.values()).map(|(&a, &b)| f(a, b)).sum::<f64>() * h
    };
    let (y, w, yx, yxx, wx, wxx) = (
        y.values(),
        w.values(),
        yx.values(),
        yxx.values(),
        wx.values(),
        wxx.values(),
    );
    let nodes = y.len();

    let flux_x: Vec<f64> = (0..nodes)
        .map(|i| 2.0 * yx[i] * yxx[i] * wx[i] + yx[i] * yx[i] * wxx[i])
        .collect();

    let int = |f: &dyn Fn(usize) -> f64| {
        let v: Vec<f64> = (0..nodes).map(f).collect();
        trapezoid_slice(&v, h)
    };

    let r_a = int(&|i| 2.0 * w[i] * wx[i]);
    let r_b = int(&|i| yxx[i] * w[i] + wx[i] * yx[i]);
    let r_c = int(&|i| 3.0 * yx[i] * yx[i] * yxx[i] * w[i] + yx[i].powi(3) * wx[i]);
    let r_d = int(&|i| w[i] * flux_x[i]) + midpoint(&|si, gi| si * si * gi * gi);
    let slack_e = int(&|i| yx[i] * yx[i]) + int(&|i| w[i] * w[i]) + 2.0 * int(&|i| y[i] * wx[i]);
    let r_f = int(&|i| y[i] * yxx[i]) + int(&|i| yx[i] * yx[i]);
    let r_g = int(&|i| 3.0 * y[i] * yx[i] * yx[i] * yxx[i]) + int(&|i| yx[i].powi(4));
    // (y_x^4)_t = 4 y_x^3 w_x
    let r_h = int(&|i| y[i] * flux_x[i]) + midpoint(&|si, gi| si.powi(3) * gi);

    Ok(IdentityReport {
        n: grid.cells(),
        residuals: [r_a, r_b, r_c, r_d, slack_e, r_f, r_g, r_h],
    })
}

/// `|r_coarse| / |r_fine|` for each identity; `None` when both sit below
/// [`ROUNDOFF_FLOOR`]. The slack entry is always `None`.
pub fn refinement_ratios(coarse: &IdentityReport, fine: &IdentityReport) -> [Option<f64>; 8] {
    let mut out = [None; 8];
    for (k, slot) in out.iter_mut().enumerate() {
        if k == IdentityReport::SLACK_INDEX {
            continue;
        }
        let (a, b) = (coarse.residuals[k].abs(), fine.residuals[k].abs());
        if a < ROUNDOFF_FLOOR && b < ROUNDOFF_FLOOR {
            continue;
        }
        *slot = Some(a / b);
    }
    out
}

/// PASS iff every identity ratio between consecutive levels lies in
/// `[lo, hi]` (round-off zeros count as converged) and every slack is at
/// least `-slack_tol`.
pub fn identities_converge(levels: &[IdentityReport], lo: f64, hi: f64, slack_tol: f64) -> Verdict {
    let ratios_ok = levels.windows(2).all(|p| {
        refinement_ratios(&p[0], &p[1])
            .iter()
            .flatten()
            .all(|r| (lo..=hi).contains(r))
    });
    let slack_ok = levels.iter().all(|r| r.slack() >= -slack_tol);
    Verdict::from_bool(ratios_ok && slack_ok)
}

/// `(1/pi^2) int y_x^2 - int y^2`, nonnegative up to discretization error
/// for Dirichlet `y`.
pub fn poincare_slack(y: &Field) -> f64 {
    let h = y.grid().h();
    let yx = first_derivative_central(y);
    let grad: Vec<f64> = yx.values().iter().map(|s| s * s).collect();
    let sq: Vec<f64> = y.values().iter().map(|v| v * v).collect();
    trapezoid_slice(&grad, h) / (PI * PI) - trapezoid_slice(&sq, h)
}
