use thiserror::Error;

/// Errors produced by the simulation, learning and tuning routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("length error: {0}")]
    Length(String),

    #[error("inconsistent decomposition: {0}")]
    Inconsistent(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("learning diverged at iteration {iteration}: rms {rms:.6e} exceeds guard {guard:.6e}")]
    Divergence {
        iteration: usize,
        rms: f64,
        guard: f64,
    },

    #[error("no sustained oscillation for proportional gains in [{lo}, {hi}]")]
    UltimateGainNotFound { lo: f64, hi: f64 },

    #[error("denominator vanishes at s = j{omega}")]
    PoleOnAxis { omega: f64 },

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
