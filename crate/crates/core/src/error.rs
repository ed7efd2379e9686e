use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("trivial instance: ||b||_{norm} = {b_norm} <= sigma = {sigma}, zero is optimal")]
    TrivialInstance {
        norm: &'static str,
        b_norm: f64,
        sigma: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("invalid norm exponent q = {0} (need q >= 1)")]
    InvalidNorm(f64),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error(
        "line search stalled after {doublings} doublings at inner iteration {iter} (L = {l:e})"
    )]
    LineSearchStalled { iter: usize, doublings: u32, l: f64 },

    #[error("infeasible start: residual {residual:e} exceeds sigma {sigma:e}")]
    InfeasibleStart { residual: f64, sigma: f64 },

    #[error("{what} exceeds the size cap ({limit})")]
    TooLarge { what: String, limit: usize },

    #[error("point is not feasible: residual {residual:e} > sigma {sigma:e}")]
    NotFeasible { residual: f64, sigma: f64 },

    #[error("empty support: x = 0")]
    EmptySupport,
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParam(msg.into())
    }
}
