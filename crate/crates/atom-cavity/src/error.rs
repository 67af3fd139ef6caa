use thiserror::Error;

/// Library error type. Variants map onto the CLI exit codes: invalid
/// arguments and unsupported operations are usage problems, invariant
/// violations are physics bookkeeping failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// A numerical grid too coarse for the requested accuracy.
    #[error("insufficient resolution: {0}")]
    Resolution(String),

    /// A computed quantity violated a structural guarantee (non-finite
    /// value, negative power ratio, transmission above one).
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// Estimator failure inside a Monte-Carlo run, tagged with the sample.
    #[error("sample {index}: {source}")]
    Sample {
        index: u64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

/// Rejects non-finite or out-of-range scalars at API boundaries.
pub(crate) fn require_finite(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(format!("{name} must be finite, got {value}")))
    }
}

pub(crate) fn require_positive(name: &str, value: f64) -> Result<f64> {
    require_finite(name, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(format!("{name} must be > 0, got {value}")))
    }
}

pub(crate) fn require_non_negative(name: &str, value: f64) -> Result<f64> {
    require_finite(name, value)?;
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(format!("{name} must be >= 0, got {value}")))
    }
}
