use thiserror::Error;

/// Errors raised by field arithmetic, transforms, operators and probes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A digit that decides the result lies outside the known precision window.
    #[error("precision error: {0}")]
    Precision(String),

    /// The requested index is not resolvable at the given level.
    #[error("resolution error: {what} needs level {needed}, have level {have}")]
    Resolution {
        what: String,
        needed: u32,
        have: u32,
    },

    #[error("domain error: {0}")]
    Domain(String),

    /// Power function not locally integrable at the origin.
    #[error("non-integrable: |x|^{alpha} requires alpha > -1")]
    NonIntegrable { alpha: f64 },

    #[error("window error: {reason}; try m >= {suggested_m}")]
    Window { reason: String, suggested_m: u32 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn precision(msg: impl Into<String>) -> Self {
        Error::Precision(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
