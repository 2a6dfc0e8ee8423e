//! Command-line front end.
//!
//! Exit codes: 0 when every verdict passes, 1 when one fails, 2 on any error
//! (bad config, violated hypothesis, unstable run, I/O).

pub mod config;
pub mod output;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{
    bibo_experiment, check_decay_bound, check_monotone, convergence_study, fit_decay,
    identities_converge, lemma_residuals, sweep, EnergySample, Functional, IdentityReport,
    Verdict, DEFAULT_MONOTONE_TOL,
};
use crate::discretization::GridSpec;
use crate::error::{Error, Result};
use crate::integrator::{boundary_power, run, BoundaryModel, Scheme, TensionModel};
use crate::model::{decay_rate, ProfileSpec};

use config::{FileConfig, Overrides};
use output::{cell, cell_f, OutputDir};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

/// Identity refinement ratios accepted as second order.
const RATIO_BAND: (f64, f64) = (3.5, 4.5);
const SLACK_TOL: f64 = 1e-8;
const ORDER: f64 = 2.0;
const ORDER_TOL: f64 = 0.2;

#[derive(Debug, Parser)]
#[command(name = "kvstring", version, about = "Damped axially moving string: simulate and check decay, BIBO and identity claims")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub args: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Run the configured scenario and write the energy series.
    Simulate,
    /// Free decay against the guaranteed exponential bound.
    Decay,
    /// Forced run from rest against the displacement bound.
    Bibo,
    /// Integration-by-parts residuals on three nested grids.
    Identities,
    /// Energy monotonicity with viscous damping switched off.
    Undamped,
    /// Velocity feedback at the right eyelet.
    Control,
    /// Decay analysis over a list of speeds.
    Sweep,
    /// Grid convergence against a manufactured solution.
    Converge,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Decay => "decay",
            Command::Bibo => "bibo",
            Command::Identities => "identities",
            Command::Undamped => "undamped",
            Command::Control => "control",
            Command::Sweep => "sweep",
            Command::Converge => "converge",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Rk4,
    ImexCn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Sine,
    Polybump,
    Bump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TensionArg {
    Linear,
    Nonlinear,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonArgs {
    /// TOML or JSON config file; a previous manifest.json also works.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(long = "t-end", global = true)]
    pub t_end: Option<f64>,
    #[arg(long, global = true)]
    pub v: Option<f64>,
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    #[arg(long, global = true)]
    pub b: Option<f64>,
    /// Seed of bounded-noise forcing.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Displacement profile shape (initial `f`, and `y` for identities).
    #[arg(long, global = true, value_enum)]
    pub profile: Option<ProfileArg>,
    /// Feedback gain for `control`.
    #[arg(long = "k-v", global = true)]
    pub k_v: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub tension: Option<TensionArg>,
}

impl CommonArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            n: self.n,
            scheme: self.scheme.map(|s| match s {
                SchemeArg::Rk4 => Scheme::ExplicitRk4,
                SchemeArg::ImexCn => Scheme::ImexCn,
            }),
            t_end: self.t_end,
            v: self.v,
            delta: self.delta,
            eta: self.eta,
            b: self.b,
            seed: self.seed,
            tol: self.tol,
            profile: self.profile.map(|p| match p {
                ProfileArg::Sine => ProfileSpec::sine(0.2, 1),
                ProfileArg::Polybump => ProfileSpec::PolyBump { amplitude: 0.8 },
                ProfileArg::Bump => ProfileSpec::Bump {
                    center: 0.5,
                    width: 0.3,
                    amplitude: 0.2,
                },
            }),
            k_v: self.k_v,
            tension: self.tension.map(|t| match t {
                TensionArg::Linear => TensionModel::Linear,
                TensionArg::Nonlinear => TensionModel::Nonlinear,
            }),
        }
    }
}

/// Config file plus flags, validated.
pub fn parse_config(args: &CommonArgs) -> Result<FileConfig> {
    let mut cfg = match &args.config {
        Some(path) => FileConfig::from_path(path)?,
        None => FileConfig::default(),
    };
    cfg.apply(&args.overrides())?;
    cfg.to_sim_config()?;
    Ok(cfg)
}

#[derive(Debug, Serialize)]
struct SimulateReport {
    samples: usize,
    t_final: f64,
    e_initial: f64,
    e_final: f64,
    v_initial: f64,
    v_final: f64,
    sup_y: f64,
}

#[derive(Debug, Serialize)]
struct ControlReport {
    k_v: f64,
    tension: TensionModel,
    e_initial: f64,
    e_final: f64,
    /// Fitted exponential rate of `E`.
    lambda_measured_e: Option<f64>,
    /// Time integral of the boundary power over the recorded samples.
    boundary_work: f64,
    verdict: Verdict,
}

fn lambda_if_valid(cfg: &crate::integrator::SimConfig) -> Option<f64> {
    decay_rate(&cfg.params).ok()
}

fn e_as_v(series: &[EnergySample]) -> Vec<EnergySample> {
    series.iter().map(|s| EnergySample { v: s.e, ..*s }).collect()
}

/// Runs one command and writes its outputs; returns the verdicts.
pub fn dispatch(command: Command, cfg: &FileConfig, out: &mut OutputDir) -> Result<Vec<(String, Verdict)>> {
    let sim = cfg.to_sim_config()?;
    let mut verdicts = Vec::new();
    match command {
        Command::Simulate => {
            let traj = run(&sim)?;
            out.energy_csv(&traj.energy, lambda_if_valid(&sim))?;
            let first = traj.energy[0];
            let last = *traj.energy.last().expect("nonempty");
            out.report(
                "simulate_report",
                &SimulateReport {
                    samples: traj.energy.len(),
                    t_final: last.t,
                    e_initial: first.e,
                    e_final: last.e,
                    v_initial: first.v,
                    v_final: last.v,
                    sup_y: traj.energy.iter().fold(0.0, |m, s| f64::max(m, s.sup_y)),
                },
            )?;
        }
        Command::Decay => {
            decay_rate(&sim.params)?;
            let traj = run(&sim)?;
            let report = check_decay_bound(&traj.energy, &sim.params, cfg.decay_tol())?;
            out.energy_csv(&traj.energy, Some(report.lambda_bound))?;
            out.report("decay_report", &report)?;
            verdicts.push(("decay".into(), report.verdict));
        }
        Command::Bibo => {
            let report = bibo_experiment(&sim)?;
            out.report("bibo_report", &report)?;
            verdicts.push(("bibo".into(), report.verdict));
        }
        Command::Identities => {
            let n = cfg.grid.n;
            let levels = [n, 2 * n, 4 * n]
                .iter()
                .map(|&m| {
                    let g = GridSpec::new(m).map_err(|e| Error::config("grid.n", e.to_string()))?;
                    lemma_residuals(&cfg.identities.y.sample(g), &cfg.identities.w.sample(g))
                })
                .collect::<Result<Vec<IdentityReport>>>()?;
            let rows: Vec<Vec<String>> = levels
                .iter()
                .map(|r| {
                    let mut row = vec![r.n.to_string()];
                    row.extend(r.residuals.iter().map(|&x| cell_f(x)));
                    row
                })
                .collect();
            out.csv(
                "identities.csv",
                &["n", "r_a", "r_b", "r_c", "r_d", "slack_e", "r_f", "r_g", "r_h"],
                &rows,
            )?;
            let verdict = identities_converge(&levels, RATIO_BAND.0, RATIO_BAND.1, SLACK_TOL);
            #[derive(Serialize)]
            struct Report<'a> {
                levels: &'a [IdentityReport],
                ratio_band: (f64, f64),
                slack_tol: f64,
                verdict: Verdict,
            }
            out.report(
                "identities_report",
                &Report {
                    levels: &levels,
                    ratio_band: RATIO_BAND,
                    slack_tol: SLACK_TOL,
                    verdict,
                },
            )?;
            verdicts.push(("identities".into(), verdict));
        }
        Command::Undamped => {
            let mut sim = sim;
            sim.params = sim.params.with_delta(0.0)?;
            let traj = run(&sim)?;
            let report = check_monotone(&traj.energy, Functional::E, cfg.tol_or(DEFAULT_MONOTONE_TOL));
            out.energy_csv(&traj.energy, None)?;
            out.report("undamped_report", &report)?;
            verdicts.push(("undamped".into(), report.verdict));
        }
        Command::Control => {
            let mut sim = sim;
            sim.boundary = BoundaryModel::VelocityFeedback {
                k_v: cfg.control.k_v,
                tension: cfg.control.tension,
            };
            sim.validate()
                .map_err(|e| Error::config("control.k_v", e.to_string()))?;
            let traj = run(&sim)?;
            let power: Vec<f64> = traj
                .states
                .iter()
                .map(|s| boundary_power(s, &sim.boundary, &sim.params).unwrap_or(0.0))
                .collect();
            let times = traj.times();
            let boundary_work = power
                .windows(2)
                .zip(times.windows(2))
                .map(|(p, t)| 0.5 * (p[0] + p[1]) * (t[1] - t[0]))
                .sum();
            let e_initial = traj.energy[0].e;
            let e_final = traj.energy.last().expect("nonempty").e;
            let lambda = fit_decay(&e_as_v(&traj.energy), None).ok();
            let verdict = Verdict::from_bool(e_final <= e_initial && lambda.is_some_and(|l| l > 0.0));
            out.energy_csv(&traj.energy, None)?;
            out.report(
                "control_report",
                &ControlReport {
                    k_v: cfg.control.k_v,
                    tension: cfg.control.tension,
                    e_initial,
                    e_final,
                    lambda_measured_e: lambda,
                    boundary_work,
                    verdict,
                },
            )?;
            verdicts.push(("control".into(), verdict));
        }
        Command::Sweep => {
            let rows = sweep(&sim, &cfg.sweep.v_values, cfg.decay_tol());
            if let Some(bad) = rows.iter().find(|r| {
                r.error
                    .as_deref()
                    .is_some_and(|e| !e.starts_with("hypothesis violated"))
            }) {
                return Err(Error::SolverFailure(format!(
                    "sweep row v = {}: {}",
                    bad.v,
                    bad.error.as_deref().unwrap_or_default()
                )));
            }
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        cell_f(r.v),
                        cell(r.lambda_bound),
                        cell(r.lambda_measured),
                        cell(r.max_violation),
                        r.verdict.map_or(String::new(), |v| v.to_string()),
                    ]
                })
                .collect();
            out.csv(
                "sweep.csv",
                &["v", "lambda_bound", "lambda_measured", "max_violation", "verdict"],
                &table,
            )?;
            out.report("sweep_report", &rows)?;
            for r in &rows {
                if let Some(v) = r.verdict {
                    verdicts.push((format!("sweep v={}", r.v), v));
                }
            }
        }
        Command::Converge => {
            let mut base = sim;
            base.t_end = cfg.converge.t_end;
            let report = convergence_study(&base, &cfg.converge_levels(), &cfg.converge.solution)?;
            let rows: Vec<Vec<String>> = report
                .levels
                .iter()
                .enumerate()
                .map(|(k, n)| {
                    let order = if k == 0 { None } else { Some(report.orders[k - 1]) };
                    vec![n.to_string(), cell_f(report.errors[k]), cell(order)]
                })
                .collect();
            out.csv("converge.csv", &["n", "l2_error", "order"], &rows)?;
            out.report("converge_report", &report)?;
            verdicts.push((
                "converge".into(),
                Verdict::from_bool(report.orders_within(ORDER, ORDER_TOL)),
            ));
        }
    }
    Ok(verdicts)
}

fn execute(cli: &Cli) -> Result<u8> {
    let start = Instant::now();
    let cfg = parse_config(&cli.args)?;
    let mut out = OutputDir::create(&cli.args.out)?;
    let verdicts = dispatch(cli.command, &cfg, &mut out)?;
    for (name, v) in &verdicts {
        println!("{v} {name}");
    }
    let all_pass = verdicts.iter().all(|(_, v)| v.is_pass());
    out.manifest(
        cli.command.name(),
        &cfg,
        start.elapsed().as_secs_f64(),
        verdicts,
    )?;
    Ok(if all_pass { EXIT_PASS } else { EXIT_FAIL })
}

/// Parses `args` and runs; never panics on user input and always returns
/// one of the three exit codes.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
