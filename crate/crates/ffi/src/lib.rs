//! C ABI over the `kvstring` core.
//!
//! Every fallible function returns a [`KvsStatus`]; on failure the message is
//! kept per thread and read back with [`kvs_last_error`]. Simulations are
//! opaque [`KvsSimulation`] handles released with [`kvs_simulation_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kvstring::analysis::check_decay_bound;
use kvstring::cli::config::FileConfig;
use kvstring::integrator::{run, SimConfig, Trajectory};
use kvstring::model::{self, StringParams};
use kvstring::Error;
use libc::size_t;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KvsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    OutOfRange = 3,
    HypothesisViolated = 4,
    Infeasible = 5,
    Numerical = 6,
    Config = 7,
    NotRun = 8,
    IndexOutOfBounds = 9,
    BufferTooSmall = 10,
    Panic = 11,
    Internal = 12,
}

/// Dimensionless parameters, validated on every call.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct KvsParams {
    pub v: f64,
    pub b: f64,
    pub delta: f64,
    pub eta: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct KvsEnergySample {
    pub t: f64,
    pub e: f64,
    pub v: f64,
    pub sup_y: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct KvsDecayCheck {
    pub lambda_bound: f64,
    pub lambda_measured: f64,
    pub max_violation: f64,
    /// 1 on pass, 0 on fail.
    pub pass: i32,
}

/// Opaque simulation handle.
pub struct KvsSimulation {
    config: SimConfig,
    trajectory: Option<Trajectory>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> KvsStatus {
    match err {
        Error::OutOfRange { .. } | Error::InvalidGrid(_) | Error::InvalidProfile(_) | Error::InvalidLevels(_) => {
            KvsStatus::OutOfRange
        }
        Error::HypothesisViolated(_) => KvsStatus::HypothesisViolated,
        Error::EpsilonInfeasible { .. } | Error::EmptyFeasibleSet => KvsStatus::Infeasible,
        Error::NonFiniteState { .. }
        | Error::SolverFailure(_)
        | Error::TensionNonpositive { .. }
        | Error::NonPositiveV { .. }
        | Error::InsufficientSamples { .. }
        | Error::FormMismatch { .. }
        | Error::DegenerateInitialData => KvsStatus::Numerical,
        Error::Config { .. } | Error::Json(_) => KvsStatus::Config,
        _ => KvsStatus::Internal,
    }
}

/// Runs `f`, records any error or panic, and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), (KvsStatus, String)>) -> KvsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KvsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside kvstring".into());
            KvsStatus::Panic
        }
    }
}

fn core(err: Error) -> (KvsStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (KvsStatus, String) {
    (KvsStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn params_from(p: *const KvsParams) -> Result<StringParams, (KvsStatus, String)> {
    let p = p.as_ref().ok_or_else(|| null("params"))?;
    StringParams::new(p.v, p.b, p.delta, p.eta).map_err(core)
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (KvsStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

unsafe fn sim_ref<'a>(sim: *const KvsSimulation) -> Result<&'a KvsSimulation, (KvsStatus, String)> {
    sim.as_ref().ok_or_else(|| null("sim"))
}

fn trajectory(sim: &KvsSimulation) -> Result<&Trajectory, (KvsStatus, String)> {
    sim.trajectory
        .as_ref()
        .ok_or_else(|| (KvsStatus::NotRun, "simulation has not been run".into()))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kvs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kvs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn kvs_critical_speed() -> f64 {
    model::critical_speed()
}

/// # Safety
/// `params` must point to a `KvsParams`.
#[no_mangle]
pub unsafe extern "C" fn kvs_params_validate(params: *const KvsParams) -> KvsStatus {
    guard(|| unsafe { params_from(params).map(|_| ()) })
}

/// # Safety
/// `params` must point to a `KvsParams`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kvs_compute_k(params: *const KvsParams, out: *mut f64) -> KvsStatus {
    guard(|| unsafe {
        let p = params_from(params)?;
        write_out(out, model::compute_k(&p).map_err(core)?)
    })
}

/// # Safety
/// `params` must point to a `KvsParams`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kvs_decay_rate(params: *const KvsParams, out: *mut f64) -> KvsStatus {
    guard(|| unsafe {
        let p = params_from(params)?;
        write_out(out, model::decay_rate(&p).map_err(core)?)
    })
}

/// # Safety
/// `params` must point to a `KvsParams`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kvs_optimize_epsilon(params: *const KvsParams, out: *mut f64) -> KvsStatus {
    guard(|| unsafe {
        let p = params_from(params)?;
        write_out(out, model::optimize_epsilon(&p).map_err(core)?)
    })
}

/// # Safety
/// `params` must point to a `KvsParams`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kvs_bibo_bound(
    params: *const KvsParams,
    epsilon: f64,
    forcing_norm: f64,
    out: *mut f64,
) -> KvsStatus {
    guard(|| unsafe {
        let p = params_from(params)?;
        write_out(out, model::bibo_bound(&p, epsilon, forcing_norm).map_err(core)?)
    })
}

/// Builds a simulation from a TOML or JSON config (same schema as the
/// command-line tool; a run manifest is accepted too).
///
/// # Safety
/// `config` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kvs_simulation_new(config: *const c_char, out: *mut *mut KvsSimulation) -> KvsStatus {
    guard(|| unsafe {
        if config.is_null() {
            return Err(null("config"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(config)
            .to_str()
            .map_err(|e| (KvsStatus::InvalidUtf8, e.to_string()))?;
        let file = FileConfig::parse(text).map_err(core)?;
        let config = file.to_sim_config().map_err(core)?;
        let sim = Box::new(KvsSimulation {
            config,
            trajectory: None,
        });
        out.write(Box::into_raw(sim));
        Ok(())
    })
}

/// Integrates to `t_end`. Running again replaces the previous trajectory.
///
/// # Safety
/// `sim` must come from `kvs_simulation_new` and not be freed.
#[no_mangle]
pub unsafe extern "C" fn kvs_simulation_run(sim: *mut KvsSimulation) -> KvsStatus {
    guard(|| unsafe {
        let sim = sim.as_mut().ok_or_else(|| null("sim"))?;
        sim.trajectory = Some(run(&sim.config).map_err(core)?);
        Ok(())
    })
}

/// # Safety
/// `sim` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kvs_simulation_sample_count(sim: *const KvsSimulation, out: *mut size_t) -> KvsStatus {
    guard(|| unsafe {
        let n = trajectory(sim_ref(sim)?)?.energy.len();
        write_out(out, n)
    })
}

/// # Safety
/// `sim` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kvs_simulation_energy_sample(
    sim: *const KvsSimulation,
    index: size_t,
    out: *mut KvsEnergySample,
) -> KvsStatus {
    guard(|| unsafe {
        let series = &trajectory(sim_ref(sim)?)?.energy;
        let s = series.get(index).ok_or_else(|| {
            (
                KvsStatus::IndexOutOfBounds,
                format!("sample {index} of {}", series.len()),
            )
        })?;
        write_out(
            out,
            KvsEnergySample {
                t: s.t,
                e: s.e,
                v: s.v,
                sup_y: s.sup_y,
            },
        )
    })
}

/// Number of grid nodes, `n + 1`.
///
/// # Safety
/// `sim` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kvs_simulation_node_count(sim: *const KvsSimulation, out: *mut size_t) -> KvsStatus {
    guard(|| unsafe { write_out(out, sim_ref(sim)?.config.grid.nodes()) })
}

/// Copies the final displacement into `buf`, which must hold at least
/// `kvs_simulation_node_count` values.
///
/// # Safety
/// `sim` must be a live handle; `buf` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn kvs_simulation_final_displacement(
    sim: *const KvsSimulation,
    buf: *mut f64,
    len: size_t,
) -> KvsStatus {
    guard(|| unsafe {
        let y = trajectory(sim_ref(sim)?)?.final_state().y.values();
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < y.len() {
            return Err((
                KvsStatus::BufferTooSmall,
                format!("need {} values, buffer holds {len}", y.len()),
            ));
        }
        ptr::copy_nonoverlapping(y.as_ptr(), buf, y.len());
        Ok(())
    })
}

/// Checks the recorded series against `V(0) exp(-lambda t)` with relative
/// slack `tol`.
///
/// # Safety
/// `sim` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kvs_simulation_check_decay(
    sim: *const KvsSimulation,
    tol: f64,
    out: *mut KvsDecayCheck,
) -> KvsStatus {
    guard(|| unsafe {
        let sim = sim_ref(sim)?;
        let r = check_decay_bound(&trajectory(sim)?.energy, &sim.config.params, tol).map_err(core)?;
        write_out(
            out,
            KvsDecayCheck {
                lambda_bound: r.lambda_bound,
                lambda_measured: r.lambda_measured,
                max_violation: r.max_violation,
                pass: r.verdict.is_pass() as i32,
            },
        )
    })
}

/// Releases a handle. Null is a no-op.
///
/// # Safety
/// `sim` must come from `kvs_simulation_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn kvs_simulation_free(sim: *mut KvsSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}
