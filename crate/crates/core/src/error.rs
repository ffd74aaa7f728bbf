use alloc::string::String;

/// Errors produced by the measure algebra and the experiments built on it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("support of {size} points exceeds the cap of {cap}")]
    SupportCap { size: usize, cap: usize },

    #[error("invalid weight {value} at index {index}")]
    InvalidWeight { index: i64, value: f64 },

    #[error("total mass {mass} (defect {defect}) is not 1")]
    NotProbability { mass: f64, defect: f64 },

    #[error("empty measure")]
    Empty,

    #[error("{0}")]
    Domain(String),

    #[error("sequence generator failed at n = {n}: {reason}")]
    Generator { n: usize, reason: String },

    #[error("sequence has no decomposition at n = {n}")]
    MissingDecomposition { n: usize },

    #[error("precondition violated at t = {t}: |μ̂(t)| = {value} exceeds {bound}")]
    Precondition { t: f64, value: f64, bound: f64 },

    #[error("quadrature did not converge: last estimates {last} and {previous}")]
    NonConvergence { last: f64, previous: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = core::result::Result<T, Error>;
