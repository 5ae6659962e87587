use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {0}: expected 1, 2 or 3")]
    InvalidDimension(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("invalid loading: {0}")]
    InvalidLoading(String),

    #[error("potential/domain incompatible: {0}")]
    Incompatible(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("step size underflow at t = {t:.6e} (h = {h:.3e}); try a smaller eps range or a tighter tolerance")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("integration failure: {0}")]
    Integration(String),

    #[error("incremental step failed at t = {t:.6e}: {reason}; try reducing tau")]
    StepFailure { t: f64, reason: String },

    #[error("invalid correlation: {0}")]
    InvalidCorrelation(String),

    #[error("inconclusive limit fit: {0}")]
    Inconclusive(String),

    #[error("no data to plot")]
    NoData,

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name: name.to_string(), reason: reason.into() }
    }

    pub(crate) fn config(field: &str, reason: impl Into<String>) -> Self {
        Error::Config { field: field.to_string(), reason: reason.into() }
    }

    /// True for errors caused by bad input rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidDimension(_)
                | Error::InvalidParameter { .. }
                | Error::InvalidLoading(_)
                | Error::Incompatible(_)
                | Error::Unsupported(_)
                | Error::Domain(_)
                | Error::InvalidCorrelation(_)
                | Error::Config { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
