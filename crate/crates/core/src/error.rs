use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("power iteration did not converge in {iterations} iterations (last Rayleigh quotient {rayleigh})")]
    NormNotConverged { iterations: usize, rayleigh: f64 },

    #[error("minimum is not attained: {0}")]
    Unbounded(String),

    #[error("oracle capability missing: {0}")]
    Unsupported(String),

    #[error("backtracking failed after {doublings} doublings (last L = {last_lipschitz})")]
    Backtracking {
        doublings: usize,
        last_lipschitz: f64,
    },

    #[error("invalid schedule at k = {k}: {reason}")]
    InvalidSchedule { k: usize, reason: String },

    #[error("schedule exhausted at k = {0}")]
    ScheduleExhausted(usize),

    #[error("operator is rank deficient (pivot {pivot:e} at row {row})")]
    RankDeficient { row: usize, pivot: f64 },

    #[error("reference solve refused: {0}")]
    Refused(String),

    #[error("no stationary active-set pattern found among {patterns} candidates")]
    NoStationaryPattern { patterns: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
