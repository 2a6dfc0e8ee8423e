use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{name}` = {value} out of range: {reason}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("fields live on different grids (n = {left} vs n = {right})")]
    GridMismatch { left: usize, right: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("Lyapunov forms disagree: expanded form {expanded}, sum-of-squares form {squares}")]
    FormMismatch { expanded: f64, squares: f64 },

    #[error("initial displacement and velocity are both identically zero")]
    DegenerateInitialData,

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("epsilon = {eps} infeasible: {reason}")]
    EpsilonInfeasible { eps: f64, reason: &'static str },

    #[error("no feasible epsilon for the BIBO bound")]
    EmptyFeasibleSet,

    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("tridiagonal solve failed: {0}")]
    SolverFailure(String),

    #[error("boundary tension T(1,t) = {tension} is not positive at t = {t}")]
    TensionNonpositive { t: f64, tension: f64 },

    #[error("Lyapunov value V = {value} at t = {t} is not positive; shrink the fit window")]
    NonPositiveV { t: f64, value: f64 },

    #[error("need at least {needed} samples in the fit window, found {found}")]
    InsufficientSamples { needed: usize, found: usize },

    #[error("invalid grid levels: {0}")]
    InvalidLevels(String),

    #[error("config error at `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }
}
