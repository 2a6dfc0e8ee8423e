//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;

use kvstring::analysis::{
    bibo_experiment, check_decay_bound, check_monotone, convergence_study, identities_converge,
    lemma_residuals, refinement_ratios, sandwich_excess, sweep, Functional, IdentityReport,
};
use kvstring::discretization::{trapezoid, Field, GridSpec};
use kvstring::integrator::{run, Manufactured, Scheme, SimConfig, Trajectory};
use kvstring::model::{compute_k, critical_speed, decay_rate, ForcingSpec, ProfileSpec, StringParams};
use kvstring::Error;

const VC_TOL: f64 = 1e-12;
const DECAY_TOL: f64 = 0.02;
const RATE_FRACTION: f64 = 0.95;
const SWEEP_SPEEDS: [f64; 4] = [0.0, 0.2, 0.4, 0.6];
const RATIO_LO: f64 = 3.5;
const RATIO_HI: f64 = 4.5;
const SLACK_TOL: f64 = 1e-8;
const SANDWICH_TOL: f64 = 1e-3;
const MONOTONE_TOL: f64 = 1e-6;
const ORDER: f64 = 2.0;
const ORDER_TOL: f64 = 0.2;
const WAVE_L2_TOL: f64 = 1e-3;
const CROSS_L2_TOL: f64 = 1e-4;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn reference_params() -> StringParams {
    StringParams::new(0.3, 1.0, 0.2, 0.05).unwrap()
}

fn reference_config() -> SimConfig {
    let mut c = SimConfig::new(reference_params(), GridSpec::new(256).unwrap(), 10.0);
    c.f = ProfileSpec::sine(0.2, 1);
    c.scheme = Scheme::ImexCn;
    c
}

fn l2_diff(a: &Field, b: &Field) -> f64 {
    trapezoid(&a.zip_with(b, |x, y| (x - y) * (x - y)).unwrap()).sqrt()
}

fn c1_critical_speed() -> Outcome {
    let vc = critical_speed();
    outcome(
        (vc - 0.618_033_988_749_894_9).abs() <= VC_TOL,
        format!("v_c = {vc:.16}"),
    )
}

fn c2_decay(reference: &Trajectory) -> Outcome {
    let p = reference_params();
    let r = check_decay_bound(&reference.energy, &p, DECAY_TOL).unwrap();
    let rate_ok = r.lambda_measured >= RATE_FRACTION * r.lambda_bound;
    outcome(
        r.verdict.is_pass() && rate_ok,
        format!(
            "max violation {:.3e}, lambda bound {:.6}, measured {:.6}",
            r.max_violation, r.lambda_bound, r.lambda_measured
        ),
    )
}

fn c3_sweep() -> Outcome {
    let rows = sweep(&reference_config(), &SWEEP_SPEEDS, DECAY_TOL);
    let mut pass = true;
    let mut detail = Vec::new();
    for row in &rows {
        let ok = row.verdict.is_some_and(|v| v.is_pass())
            && matches!((row.lambda_measured, row.lambda_bound), (Some(m), Some(b)) if m >= RATE_FRACTION * b);
        pass &= ok;
        detail.push(format!(
            "v={} viol={:.2e} rate={:.4}/{:.4}",
            row.v,
            row.max_violation.unwrap_or(f64::NAN),
            row.lambda_measured.unwrap_or(f64::NAN),
            row.lambda_bound.unwrap_or(f64::NAN)
        ));
    }
    let fast = reference_params().with_v(0.7).unwrap();
    let rejected = matches!(decay_rate(&fast), Err(Error::HypothesisViolated(_)));
    let row = &sweep(&reference_config(), &[0.7], DECAY_TOL)[0];
    let row_ok = row.verdict.is_none()
        && row.lambda_bound.is_none()
        && row.error.as_deref().is_some_and(|e| e.contains("hypothesis violated"));
    pass &= rejected && row_ok;
    detail.push(format!("v=0.7 -> {}", row.error.as_deref().unwrap_or("no error")));
    outcome(pass, detail.join("; "))
}

fn c4_identities() -> Outcome {
    let levels: Vec<IdentityReport> = [64, 128, 256]
        .iter()
        .map(|&n| {
            let g = GridSpec::new(n).unwrap();
            let y = Field::from_fn(g, |x| x * (1.0 - x));
            let w = Field::from_fn(g, |x| (2.0 * PI * x).sin());
            lemma_residuals(&y, &w).unwrap()
        })
        .collect();
    let verdict = identities_converge(&levels, RATIO_LO, RATIO_HI, SLACK_TOL);
    let ratios: Vec<String> = levels
        .windows(2)
        .map(|p| {
            refinement_ratios(&p[0], &p[1])
                .iter()
                .zip(IdentityReport::LABELS)
                .map(|(r, l)| match r {
                    Some(r) => format!("{l}:{r:.3}"),
                    None => format!("{l}:-"),
                })
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    let min_slack = levels.iter().map(|r| r.slack()).fold(f64::INFINITY, f64::min);
    outcome(
        verdict.is_pass(),
        format!("ratios [{}], min slack {min_slack:.4}", ratios.join(" | ")),
    )
}

fn c5_sandwich(reference: &Trajectory) -> Outcome {
    let k = compute_k(&reference_params()).unwrap();
    let nonneg = reference.energy.iter().all(|s| s.v >= 0.0);
    let excess = sandwich_excess(&reference.energy, k);
    outcome(
        nonneg && excess <= SANDWICH_TOL,
        format!("K = {k:.6}, max V/(K E) - 1 = {excess:.3e}"),
    )
}

fn c6_kv_monotone() -> Outcome {
    let mut c = reference_config();
    c.params = StringParams::new(0.3, 1.0, 0.0, 0.05).unwrap();
    let traj = run(&c).unwrap();
    let r = check_monotone(&traj.energy, Functional::E, MONOTONE_TOL);
    outcome(
        r.verdict.is_pass(),
        format!("worst relative uptick {:.3e}", r.worst_uptick),
    )
}

fn c7_bibo() -> Outcome {
    let p = StringParams::new(0.2, 1.0, 0.5, 0.1).unwrap();
    let mut c = SimConfig::new(p, GridSpec::new(256).unwrap(), 30.0);
    c.forcing = ForcingSpec::Separable {
        profile: ProfileSpec::sine(1.0, 1),
        amplitude: 0.1,
        frequency: 2.0,
    };
    let r = bibo_experiment(&c).unwrap();
    outcome(
        r.verdict.is_pass(),
        format!(
            "sup|y| = {:.5}, bound = {:.5} (eps* = {:.5}, ||F||_X2 = {:.5})",
            r.sup_y_measured, r.bound, r.epsilon_star, r.f_x2_norm
        ),
    )
}

fn c8_mms() -> Outcome {
    let mut c = reference_config();
    c.t_end = 1.0;
    let r = convergence_study(&c, &[64, 128, 256], &Manufactured::decaying_sine()).unwrap();
    outcome(
        r.orders_within(ORDER, ORDER_TOL),
        format!("errors {:?}, orders {:.3?}", r.errors, r.orders),
    )
}

fn c9_linear_wave() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for scheme in [Scheme::ImexCn, Scheme::ExplicitRk4] {
        let p = StringParams::new(0.0, 0.0, 0.0, 0.0).unwrap();
        let mut c = SimConfig::new(p, GridSpec::new(128).unwrap(), 1.0);
        c.f = ProfileSpec::sine(1.0, 1);
        c.scheme = scheme;
        let traj = run(&c).unwrap();
        let end = traj.final_state();
        let exact = Field::from_fn(c.grid, |x| (PI * x).sin() * (PI * end.t).cos());
        let err = l2_diff(&end.y, &exact);
        worst = worst.max(err);
        detail.push(format!("{scheme:?} {err:.3e}"));
    }
    outcome(worst < WAVE_L2_TOL, detail.join(", "))
}

fn c10_cross_scheme() -> Outcome {
    let mut c = reference_config();
    c.t_end = 5.0;
    c.cfl_safety /= 4.0;
    let finals: Vec<_> = [Scheme::ExplicitRk4, Scheme::ImexCn]
        .into_iter()
        .map(|s| {
            let mut cs = c.clone();
            cs.scheme = s;
            run(&cs).unwrap().final_state().clone()
        })
        .collect();
    let diff = l2_diff(&finals[0].y, &finals[1].y);
    outcome(diff < CROSS_L2_TOL, format!("L2 difference at t=5: {diff:.3e}"))
}

fn main() -> ExitCode {
    let reference = run(&reference_config()).expect("reference run");
    let results: Vec<(&str, Outcome)> = vec![
        ("1 critical speed", c1_critical_speed()),
        ("2 decay bound", c2_decay(&reference)),
        ("3 speed sweep", c3_sweep()),
        ("4 identity residuals", c4_identities()),
        ("5 sandwich", c5_sandwich(&reference)),
        ("6 undamped KV monotonicity", c6_kv_monotone()),
        ("7 BIBO", c7_bibo()),
        ("8 MMS convergence", c8_mms()),
        ("9 linear wave", c9_linear_wave()),
        ("10 cross-scheme", c10_cross_scheme()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {name}: {}", o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
