use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("detuning {symbol} is zero; the effective parameters divide by it")]
    ZeroDetuning { symbol: &'static str },

    #[error("unknown preset `{0}` (expected two-axis, isotropic or one-axis)")]
    UnknownPreset(String),

    #[error("spin count {requested} exceeds the dimension cap {cap}")]
    DimensionCap { requested: usize, cap: usize },

    #[error("operator dimensions disagree: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("mean spin vanishes (|<J>| = {norm:e}); squeezing frame undefined")]
    DegenerateDirection { norm: f64 },

    #[error("integration diverged at t = {t}")]
    Divergence { t: f64 },

    #[error("state lost positivity at t = {t}: minimum eigenvalue {min_eig:e}")]
    Positivity { t: f64, min_eig: f64 },

    #[error("moment physicality violated at t = {t}: relative excess of |m|^2 over n(n+1) is {excess:e}")]
    Physicality { t: f64, excess: f64 },

    #[error("Fock truncation unhealthy at t = {t}: top occupation {top:e} (try n_max > {n_max})")]
    Truncation { t: f64, top: f64, n_max: usize },

    #[error("no broken-phase solution: {0}")]
    NoBrokenSolution(String),

    #[error("root finder did not converge after {starts} starts (best residual {best:e})")]
    NoConvergence { starts: usize, best: f64 },
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name: name.into(), reason: reason.into() }
    }

    /// Whether the failure comes from bad input rather than from a numerical run.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::ZeroDetuning { .. }
                | Error::UnknownPreset(_)
                | Error::DimensionCap { .. }
                | Error::DimensionMismatch { .. }
        )
    }
}
