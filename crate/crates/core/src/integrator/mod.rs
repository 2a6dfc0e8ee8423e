//! Time integration of the first-order system `y_t = w`, `w_t = a(y, w, t)`.
//!
//! Two schemes are provided:
//!
//! * [`Scheme::ExplicitRk4`]: classical four-stage Runge-Kutta, boundary
//!   conditions re-imposed on every stage. The step is limited by the wave
//!   speed and by the explicit Kelvin-Voigt diffusion.
//! * [`Scheme::ImexCn`]: drift-kick-drift. The displacement-dependent
//!   stiffness and the load are evaluated explicitly at the half-step
//!   displacement; the velocity-linear terms (viscous, gyroscopic and the
//!   Kelvin-Voigt flux with its coefficient frozen at the half step) are
//!   Crank-Nicolson weighted and solved as one tridiagonal system. Only the
//!   wave-speed limit applies.

mod mms;
mod tridiag;

use serde::{Deserialize, Serialize};

use crate::analysis::{energy_series, EnergySample};
use crate::discretization::{
    elastic_acceleration, gradient_half, rhs_acceleration, velocity_acceleration, Field, GridSpec,
};
use crate::error::{Error, Result};
use crate::model::{ForcingSpec, ProfileSpec, StringParams};

pub use mms::{mms_source, Jet, Manufactured};
pub use tridiag::solve_tridiagonal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ExplicitRk4,
    #[default]
    ImexCn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TensionModel {
    /// `T = 1 - v^2`
    #[default]
    Linear,
    /// `T = 1 - v^2 + (b/2) y_x^2 + eta y_x y_xt`
    Nonlinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryModel {
    #[default]
    FixedFixed,
    /// Right eyelet free to move transversally with `T y_x = -k_v y_t` at `x = 1`.
    VelocityFeedback {
        k_v: f64,
        #[serde(default)]
        tension: TensionModel,
    },
}

impl BoundaryModel {
    pub fn validate(&self) -> Result<()> {
        if let BoundaryModel::VelocityFeedback { k_v, .. } = *self {
            if !(k_v > 0.0 && k_v.is_finite()) {
                return Err(Error::OutOfRange {
                    name: "k_v",
                    value: k_v,
                    reason: "feedback gain must be positive",
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub params: StringParams,
    pub grid: GridSpec,
    pub f: ProfileSpec,
    pub g: ProfileSpec,
    pub forcing: ForcingSpec,
    pub scheme: Scheme,
    pub t_end: f64,
    pub cfl_safety: f64,
    /// Recorded samples per unit time.
    pub output_stride: f64,
    pub boundary: BoundaryModel,
    /// When set, the run starts from `y*(., 0)` and is driven by its source;
    /// `f`, `g` and `forcing` are ignored.
    pub mms: Option<Manufactured>,
}

impl SimConfig {
    pub fn new(params: StringParams, grid: GridSpec, t_end: f64) -> Self {
        Self {
            params,
            grid,
            f: ProfileSpec::Zero,
            g: ProfileSpec::Zero,
            forcing: ForcingSpec::Zero,
            scheme: Scheme::ImexCn,
            t_end,
            cfl_safety: 0.5,
            output_stride: 100.0,
            boundary: BoundaryModel::FixedFixed,
            mms: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::OutOfRange {
                name: "t_end",
                value: self.t_end,
                reason: "need a finite t_end >= 0",
            });
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::OutOfRange {
                name: "cfl_safety",
                value: self.cfl_safety,
                reason: "need 0 < cfl_safety <= 1",
            });
        }
        if !(self.output_stride > 0.0 && self.output_stride.is_finite()) {
            return Err(Error::OutOfRange {
                name: "output_stride",
                value: self.output_stride,
                reason: "need a positive sample rate",
            });
        }
        self.f.validate()?;
        self.g.validate()?;
        self.forcing.validate()?;
        self.boundary.validate()
    }

    /// The load actually applied during [`run`].
    pub fn effective_forcing(&self) -> ForcingSpec {
        match &self.mms {
            Some(m) => mms_source(m, &self.params),
            None => self.forcing.clone(),
        }
    }

    pub fn initial_state(&self) -> Result<SimState> {
        let grid = self.grid;
        let (y, w) = match &self.mms {
            Some(m) => (
                Field::from_fn(grid, |x| m.displacement(x, 0.0)),
                Field::from_fn(grid, |x| m.velocity(x, 0.0)),
            ),
            None => (self.f.sample(grid), self.g.sample(grid)),
        };
        apply_boundary(SimState { t: 0.0, y, w }, &self.boundary, &self.params)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub y: Field,
    pub w: Field,
}

impl SimState {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            t: 0.0,
            y: Field::zeros(grid),
            w: Field::zeros(grid),
        }
    }

    fn is_finite(&self) -> bool {
        self.y.is_finite() && self.w.is_finite()
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<SimState>,
    pub energy: Vec<EnergySample>,
}

impl Trajectory {
    pub fn final_state(&self) -> &SimState {
        self.states.last().expect("trajectory always holds the initial state")
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }
}

/// Largest stable step for the current state, scaled by `cfl_safety`.
pub fn stable_dt(state: &SimState, config: &SimConfig) -> f64 {
    let p = &config.params;
    let h = config.grid.h();
    let s = gradient_half(&state.y);
    let s2_max = s.values().iter().fold(0.0_f64, |m, &si| m.max(si * si));
    let v = p.v();

    let c_max = (1.0 - v * v + 1.5 * p.b() * s2_max).sqrt();
    let mut dt = h / (c_max + 2.0 * v);
    if config.scheme == Scheme::ExplicitRk4 {
        dt = dt.min(h * h / (2.0 * p.eta() * s2_max + f64::EPSILON));
    }
    if let BoundaryModel::VelocityFeedback { k_v, .. } = config.boundary {
        // the free end relaxes like y_n' ~ -(3T / 2 h k_v) y_n
        let tension = 1.0 - v * v + 0.5 * p.b() * s2_max;
        dt = dt.min(h * k_v / tension);
    }
    config.cfl_safety * dt
}

/// Enforces the boundary model on a state.
///
/// Fixed eyelets zero both end values of `y` and `w`. Velocity feedback
/// pins `x = 0` and sets the right-end velocity from the discrete Robin
/// condition `T(1,t) y_x(1,t) = -k_v w_n`, with `y_x` and `w_x` taken from
/// second-order one-sided differences.
pub fn apply_boundary(
    mut state: SimState,
    model: &BoundaryModel,
    params: &StringParams,
) -> Result<SimState> {
    let n = state.y.grid().cells();
    match *model {
        BoundaryModel::FixedFixed => {
            state.y.set_dirichlet();
            state.w.set_dirichlet();
        }
        BoundaryModel::VelocityFeedback { k_v, tension } => {
            state.y.values_mut()[0] = 0.0;
            state.w.values_mut()[0] = 0.0;
            let h = state.y.grid().h();
            let y = state.y.values();
            let slope = (3.0 * y[n] - 4.0 * y[n - 1] + y[n - 2]) / (2.0 * h);
            let base = 1.0 - params.v() * params.v();
            let w = state.w.values();
            let (w_end, t_end) = match tension {
                TensionModel::Linear => (-base * slope / k_v, base),
                TensionModel::Nonlinear => {
                    let elastic = base + 0.5 * params.b() * slope * slope;
                    let rest = -4.0 * w[n - 1] + w[n - 2];
                    let eta_p2 = params.eta() * slope * slope;
                    let w_end = -(elastic * slope + eta_p2 * rest / (2.0 * h))
                        / (k_v + 3.0 * eta_p2 / (2.0 * h));
                    let slope_t = (3.0 * w_end + rest) / (2.0 * h);
                    (w_end, elastic + params.eta() * slope * slope_t)
                }
            };
            if t_end <= 0.0 || !t_end.is_finite() {
                return Err(Error::TensionNonpositive {
                    t: state.t,
                    tension: t_end,
                });
            }
            state.w.values_mut()[n] = w_end;
        }
    }
    Ok(state)
}

/// Boundary power `T(1,t) y_x(1,t) w_n` under velocity feedback; `None` for
/// fixed eyelets.
pub fn boundary_power(state: &SimState, model: &BoundaryModel, params: &StringParams) -> Option<f64> {
    let BoundaryModel::VelocityFeedback { k_v, .. } = *model else {
        return None;
    };
    let n = state.y.grid().cells();
    let w_end = state.w.values()[n];
    // T y_x = -k_v w_n holds by construction of `apply_boundary`
    let _ = params;
    Some(-k_v * w_end * w_end)
}

fn check_finite(state: SimState) -> Result<SimState> {
    if state.is_finite() {
        Ok(state)
    } else {
        Err(Error::NonFiniteState { t: state.t })
    }
}

struct Derivative {
    dy: Field,
    dw: Field,
}

fn derivative(state: &SimState, forcing: &ForcingSpec, params: &StringParams) -> Result<Derivative> {
    let load = forcing.sample(state.y.grid(), state.t);
    let dw = rhs_acceleration(&state.y, &state.w, params, &load)?;
    Ok(Derivative {
        dy: state.w.clone(),
        dw,
    })
}

fn advance(base: &SimState, t: f64, scale: f64, d: &Derivative) -> SimState {
    SimState {
        t,
        y: base.y.axpy(scale, &d.dy),
        w: base.w.axpy(scale, &d.dw),
    }
}

/// One classical RK4 step.
pub fn step_rk4(state: &SimState, dt: f64, config: &SimConfig) -> Result<SimState> {
    let forcing = config.effective_forcing();
    step_rk4_with(state, dt, config, &forcing)
}

fn step_rk4_with(
    state: &SimState,
    dt: f64,
    config: &SimConfig,
    forcing: &ForcingSpec,
) -> Result<SimState> {
    let p = &config.params;
    let bc = |s: SimState| apply_boundary(s, &config.boundary, p);
    let t = state.t;

    let k1 = derivative(state, forcing, p)?;
    let s1 = bc(advance(state, t + 0.5 * dt, 0.5 * dt, &k1))?;
    let k2 = derivative(&s1, forcing, p)?;
    let s2 = bc(advance(state, t + 0.5 * dt, 0.5 * dt, &k2))?;
    let k3 = derivative(&s2, forcing, p)?;
    let s3 = bc(advance(state, t + dt, dt, &k3))?;
    let k4 = derivative(&s3, forcing, p)?;

    let combine = |a: &Field, b: &Field, c: &Field, d: &Field, base: &Field| {
        let mut out = base.clone();
        for (i, o) in out.values_mut().iter_mut().enumerate() {
            *o += dt / 6.0
                * (a.values()[i] + 2.0 * b.values()[i] + 2.0 * c.values()[i] + d.values()[i]);
        }
        out
    };
    let next = SimState {
        t: t + dt,
        y: combine(&k1.dy, &k2.dy, &k3.dy, &k4.dy, &state.y),
        w: combine(&k1.dw, &k2.dw, &k3.dw, &k4.dw, &state.w),
    };
    check_finite(bc(next)?)
}

/// One drift-kick-drift step with a Crank-Nicolson velocity block.
pub fn step_imex(state: &SimState, dt: f64, config: &SimConfig) -> Result<SimState> {
    let forcing = config.effective_forcing();
    step_imex_with(state, dt, config, &forcing)
}

fn step_imex_with(
    state: &SimState,
    dt: f64,
    config: &SimConfig,
    forcing: &ForcingSpec,
) -> Result<SimState> {
    let p = &config.params;
    let grid = state.y.grid();
    let n = grid.cells();
    let h = grid.h();
    let t_half = state.t + 0.5 * dt;

    let y_half = state.y.axpy(0.5 * dt, &state.w);
    // boundary velocity implied by the half-step displacement
    let half = apply_boundary(
        SimState {
            t: t_half,
            y: y_half,
            w: state.w.clone(),
        },
        &config.boundary,
        p,
    )?;
    let y_half = half.y;
    let w_end_new = half.w.values()[n];

    let s = gradient_half(&y_half);
    let q = s.map(|si| si * si);
    let mut explicit = elastic_acceleration(&y_half, p);
    let load = forcing.sample(grid, t_half);
    let lw_old = velocity_acceleration(&state.w, &q, p);

    let (v, delta, eta) = (p.v(), p.delta(), p.eta());
    let qv = q.values();
    let m = n - 1;
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    let half_dt = 0.5 * dt;
    let w_old = state.w.values();
    let ex = explicit.values_mut();
    for row in 0..m {
        let i = row + 1;
        let l_lower = v / h + eta * qv[i - 1] / (h * h);
        let l_upper = -v / h + eta * qv[i] / (h * h);
        let l_diag = -2.0 * delta - eta * (qv[i - 1] + qv[i]) / (h * h);
        lower[row] = -half_dt * l_lower;
        upper[row] = -half_dt * l_upper;
        diag[row] = 1.0 - half_dt * l_diag;
        ex[i] += load.values()[i];
        rhs[row] = w_old[i] + dt * ex[i] + half_dt * lw_old.values()[i];
    }
    // known boundary velocities at the new level
    rhs[0] -= lower[0] * 0.0;
    rhs[m - 1] -= upper[m - 1] * w_end_new;

    let interior = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
    let mut w_new = Field::zeros(grid);
    w_new.values_mut()[1..n].copy_from_slice(&interior);
    w_new.values_mut()[n] = w_end_new;

    let y_new = y_half.axpy(0.5 * dt, &w_new);
    let next = SimState {
        t: state.t + dt,
        y: y_new,
        w: w_new,
    };
    check_finite(apply_boundary(next, &config.boundary, p)?)
}

/// Integrates from `t = 0` to `t_end`, recording a sample every
/// `1 / output_stride` time units (and at `t_end`).
pub fn run(config: &SimConfig) -> Result<Trajectory> {
    config.validate()?;
    let forcing = config.effective_forcing();
    let mut state = config.initial_state()?;
    let mut states = vec![state.clone()];

    let mut k: u64 = 1;
    while state.t < config.t_end {
        let target = (k as f64 / config.output_stride).min(config.t_end);
        while state.t < target {
            let remaining = target - state.t;
            let mut dt = stable_dt(&state, config);
            let last = dt >= remaining * (1.0 - 1e-9);
            if last {
                dt = remaining;
            }
            let mut next = match config.scheme {
                Scheme::ExplicitRk4 => step_rk4_with(&state, dt, config, &forcing),
                Scheme::ImexCn => step_imex_with(&state, dt, config, &forcing),
            }?;
            if last {
                next.t = target;
            }
            state = next;
        }
        states.push(state.clone());
        k += 1;
    }

    let energy = energy_series(&states, &config.params)?;
    Ok(Trajectory { states, energy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::trapezoid;
    use std::f64::consts::PI;

    fn params(v: f64, b: f64, delta: f64, eta: f64) -> StringParams {
        StringParams::new(v, b, delta, eta).unwrap()
    }

    fn config(p: StringParams, n: usize, t_end: f64) -> SimConfig {
        SimConfig::new(p, GridSpec::new(n).unwrap(), t_end)
    }

    fn l2(a: &Field, b: &Field) -> f64 {
        trapezoid(&a.zip_with(b, |x, y| (x - y) * (x - y)).unwrap()).sqrt()
    }

    #[test]
    fn stable_dt_cases() {
        let mut c = config(params(0.0, 1.0, 0.0, 0.0), 64, 1.0);
        c.scheme = Scheme::ExplicitRk4;
        let zero = SimState::zeros(c.grid);
        assert!((stable_dt(&zero, &c) - 0.5 * c.grid.h()).abs() < 1e-15);

        let mut c = config(params(0.3, 1.0, 0.2, 50.0), 128, 1.0);
        c.f = ProfileSpec::sine(0.5, 1);
        let state = c.initial_state().unwrap();
        c.scheme = Scheme::ExplicitRk4;
        let explicit = stable_dt(&state, &c);
        let h = c.grid.h();
        assert!(explicit < 0.5 * h * h * 10.0);
        c.scheme = Scheme::ImexCn;
        let imex = stable_dt(&state, &c);
        assert!(imex >= explicit);
        assert!(imex > 10.0 * explicit);
    }

    #[test]
    fn equilibrium_is_fixed_point() {
        let c = config(params(0.3, 1.0, 0.2, 0.05), 32, 1.0);
        let zero = SimState::zeros(c.grid);
        for step in [step_rk4, step_imex] {
            let next = step(&zero, 0.01, &c).unwrap();
            assert_eq!(next.y.max_abs(), 0.0);
            assert_eq!(next.w.max_abs(), 0.0);
            assert!((next.t - 0.01).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_wave_after_unit_time() {
        for scheme in [Scheme::ExplicitRk4, Scheme::ImexCn] {
            let mut c = config(params(0.0, 0.0, 0.0, 0.0), 128, 1.0);
            c.scheme = scheme;
            c.f = ProfileSpec::sine(1.0, 1);
            let traj = run(&c).unwrap();
            let end = traj.final_state();
            assert!((end.t - 1.0).abs() < 1e-12);
            let exact = Field::from_fn(c.grid, |x| (PI * x).sin() * (PI * end.t).cos());
            let err = l2(&end.y, &exact);
            assert!(err < 1e-3, "{scheme:?}: {err}");
        }
    }

    #[test]
    fn rk4_time_reversal() {
        let mut c = config(params(0.0, 0.0, 0.0, 0.0), 64, 1.0);
        c.scheme = Scheme::ExplicitRk4;
        c.f = ProfileSpec::sine(1.0, 1);
        c.g = ProfileSpec::sine(0.5, 2);
        let start = c.initial_state().unwrap();
        let dt = stable_dt(&start, &c);
        let mut s = start.clone();
        for _ in 0..10 {
            s = step_rk4(&s, dt, &c).unwrap();
        }
        s.w = s.w.map(|v| -v);
        for _ in 0..10 {
            s = step_rk4(&s, dt, &c).unwrap();
        }
        s.w = s.w.map(|v| -v);
        let err = l2(&s.y, &start.y).max(l2(&s.w, &start.w));
        // each step errs by O(dt^5) with dt ~ 8e-3
        assert!(err < 20.0 * dt.powi(5) * 100.0, "{err}");
        assert!(err < 1e-6);
    }

    /// Plain Stormer-Verlet for the undamped, non-moving string.
    fn verlet_step(state: &SimState, dt: f64, p: &StringParams) -> SimState {
        let y_half = state.y.axpy(0.5 * dt, &state.w);
        let mut a = elastic_acceleration(&y_half, p);
        a.set_dirichlet();
        let w = state.w.axpy(dt, &a);
        let y = y_half.axpy(0.5 * dt, &w);
        SimState {
            t: state.t + dt,
            y,
            w,
        }
    }

    #[test]
    fn imex_without_velocity_terms_is_verlet() {
        let p = params(0.0, 1.0, 0.0, 0.0);
        let mut c = config(p, 64, 1.0);
        c.f = ProfileSpec::sine(0.3, 1);
        let mut a = c.initial_state().unwrap();
        let mut b = a.clone();
        let dt = stable_dt(&a, &c);
        for _ in 0..200 {
            a = step_imex(&a, dt, &c).unwrap();
            b = verlet_step(&b, dt, &p);
        }
        for (x, y) in a.y.values().iter().zip(b.y.values()) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn imex_pure_kv_relaxation_dissipates() {
        // semi-discrete energy on half nodes: sum w^2/2 h + sum (s^2/2 + b s^4/8) h
        let p = params(0.0, 0.01, 0.0, 0.5);
        let mut c = config(p, 64, 1.0);
        c.f = ProfileSpec::sine(0.5, 1);
        c.g = ProfileSpec::sine(1.0, 2);
        let energy = |s: &SimState| {
            let h = c.grid.h();
            let kinetic: f64 = s.w.values().iter().map(|w| 0.5 * w * w * h).sum();
            let potential: f64 = gradient_half(&s.y)
                .values()
                .iter()
                .map(|g| (0.5 * g * g + p.b() / 8.0 * g.powi(4)) * h)
                .sum();
            kinetic + potential
        };
        let mut s = c.initial_state().unwrap();
        let mut prev = energy(&s);
        let mut max_rise: f64 = 0.0;
        for _ in 0..400 {
            let dt = stable_dt(&s, &c);
            s = step_imex(&s, dt, &c).unwrap();
            let e = energy(&s);
            max_rise = max_rise.max((e - prev) / prev);
            prev = e;
        }
        // the Verlet split carries an O(dt^2) oscillation in this energy
        assert!(max_rise < 1e-4, "{max_rise}");
        assert!(prev < energy(&c.initial_state().unwrap()));
    }

    #[test]
    fn t_end_zero_yields_initial_state() {
        let mut c = config(params(0.3, 1.0, 0.2, 0.05), 32, 0.0);
        c.f = ProfileSpec::sine(0.2, 1);
        let traj = run(&c).unwrap();
        assert_eq!(traj.states.len(), 1);
        assert_eq!(traj.states[0], c.initial_state().unwrap());
    }

    #[test]
    fn zero_forcing_from_rest_stays_zero() {
        let c = config(params(0.3, 1.0, 0.2, 0.05), 32, 2.0);
        let traj = run(&c).unwrap();
        assert!(traj.states.iter().all(|s| s.y.max_abs() == 0.0 && s.w.max_abs() == 0.0));
        assert_eq!(traj.states.len(), 201);
    }

    #[test]
    fn samples_strictly_increase_and_bcs_hold() {
        let mut c = config(params(0.3, 1.0, 0.2, 0.05), 64, 1.234);
        c.f = ProfileSpec::sine(0.2, 1);
        c.scheme = Scheme::ExplicitRk4;
        let traj = run(&c).unwrap();
        let t = traj.times();
        assert!(t.windows(2).all(|p| p[1] > p[0]));
        assert!((t.last().unwrap() - 1.234).abs() < 1e-12);
        assert!(traj.states.iter().all(|s| s.y.is_dirichlet() && s.w.is_dirichlet()));
    }

    #[test]
    fn feedback_with_still_end_is_free_end() {
        let p = params(0.2, 1.0, 0.1, 0.05);
        let grid = GridSpec::new(32).unwrap();
        let h = grid.h();
        // y_x(1) = 0 under a one-sided stencil: y = -(1-x)^2 + 1 flattened at x=1
        let y = Field::from_fn(grid, |x| x * (2.0 - x));
        let state = SimState {
            t: 0.0,
            y,
            w: Field::zeros(grid),
        };
        for tension in [TensionModel::Linear, TensionModel::Nonlinear] {
            let model = BoundaryModel::VelocityFeedback { k_v: 2.0, tension };
            let out = apply_boundary(state.clone(), &model, &p).unwrap();
            assert!(out.w.values()[32].abs() < 1e-12 / h);
        }
    }

    #[test]
    fn feedback_boundary_power_dissipates() {
        let p = params(0.2, 1.0, 0.1, 0.05);
        let mut c = config(p, 64, 2.0);
        c.f = ProfileSpec::sine(0.2, 1);
        c.boundary = BoundaryModel::VelocityFeedback {
            k_v: 1.0,
            tension: TensionModel::Linear,
        };
        let traj = run(&c).unwrap();
        let n = c.grid.cells();
        let h = c.grid.h();
        for s in &traj.states {
            let y = s.y.values();
            let slope = (3.0 * y[n] - 4.0 * y[n - 1] + y[n - 2]) / (2.0 * h);
            let power = (1.0 - 0.04) * slope * s.w.values()[n];
            assert!(power <= 1e-14);
            let reported = boundary_power(s, &c.boundary, &p).unwrap();
            assert!((power - reported).abs() < 1e-10);
            assert_eq!(s.y.values()[0], 0.0);
        }
    }

    #[test]
    fn nonlinear_tension_run_completes() {
        let p = params(0.2, 1.0, 0.1, 0.05);
        let mut c = config(p, 64, 1.0);
        c.f = ProfileSpec::sine(0.2, 1);
        c.boundary = BoundaryModel::VelocityFeedback {
            k_v: 0.5,
            tension: TensionModel::Nonlinear,
        };
        for scheme in [Scheme::ImexCn, Scheme::ExplicitRk4] {
            c.scheme = scheme;
            let traj = run(&c).unwrap();
            assert!(traj.final_state().y.is_finite());
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let mut c = config(params(0.3, 1.0, 0.2, 0.05), 32, 1.0);
        c.cfl_safety = 1.5;
        assert!(run(&c).is_err());
        c.cfl_safety = 0.5;
        c.boundary = BoundaryModel::VelocityFeedback {
            k_v: 0.0,
            tension: TensionModel::Linear,
        };
        assert!(run(&c).is_err());
    }

    #[test]
    fn runaway_step_reports_non_finite() {
        let mut c = config(params(0.0, 1.0, 0.0, 5.0), 64, 1.0);
        c.scheme = Scheme::ExplicitRk4;
        c.f = ProfileSpec::sine(1.0, 1);
        let mut s = c.initial_state().unwrap();
        let dt = 100.0 * stable_dt(&s, &c);
        let mut failed = None;
        for _ in 0..200 {
            match step_rk4(&s, dt, &c) {
                Ok(next) => s = next,
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
        }
        assert!(matches!(failed, Some(Error::NonFiniteState { .. })));
    }
}
