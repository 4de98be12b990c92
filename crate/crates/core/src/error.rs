use thiserror::Error;

use crate::profile::Endpoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("block size mismatch: {left} vs {right}")]
    BlockSizeMismatch { left: usize, right: usize },

    #[error("window half-width {window} is smaller than the required {required}")]
    WindowTooSmall { window: i64, required: i64 },

    #[error("window half-width {window} exceeds the dense solver budget {max}")]
    WindowTooLarge { window: i64, max: i64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("phase assignment inconsistent with q at site {site}: |q e^{{-i theta}} - |q|| = {residual:e}")]
    PhaseMismatch { site: i64, residual: f64 },

    #[error("chiral pair is not Fredholm at {endpoint}: ||p_gamma| - |a|| = {margin:e}")]
    NotFredholm { endpoint: Endpoint, margin: f64 },

    #[error("symbol vanishes on the unit circle at {endpoint} (min |f| = {min_modulus:e})")]
    SymbolVanishes {
        endpoint: Endpoint,
        min_modulus: f64,
    },

    #[error("index routes disagree: {0}")]
    IndexDisagreement(String),

    #[error("g(x) requires |x| >= 1, got {0}")]
    OutsideDomain(f64),

    #[error("{check} residual {residual:e} exceeds tolerance {tol:e}")]
    ResidualTooLarge {
        check: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("operation requires a unitary instance (gamma identically zero)")]
    NotUnitary,

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error("csv error: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
