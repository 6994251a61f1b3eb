use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("strategy was built for horizon {strategy} but play was asked for {requested} rounds")]
    HorizonMismatch { strategy: usize, requested: usize },

    #[error("statistic already covers the full horizon of {0} rounds")]
    HorizonExceeded(usize),

    #[error("arms must share a common variance (left {left}, right {right})")]
    VarianceMismatch { left: f64, right: f64 },

    #[error("trajectory mixes arms; the single-arm statistic needs every pull on arm 1")]
    MixedArms,

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("quadrature did not converge on [{a}, {b}] (error estimate {error:e})")]
    QuadratureNoConvergence { a: f64, b: f64, error: f64 },

    #[error("bisection bracket has no sign change: {0}")]
    NoSignChange(String),

    #[error("moment generating function ordering violated at lambda = {lambda}")]
    Mgf2Violated { lambda: f64 },

    #[error("empty tail: {0}")]
    EmptyTail(String),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
