use thiserror::Error;

/// Errors produced by the pulse-design library.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric or structural argument violated its contract.
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A pulse or profile file could not be parsed. `location` names the
    /// offending field or line.
    #[error("parse error at {location}: {reason}")]
    Parse { location: String, reason: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(location: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            reason: reason.into(),
        }
    }
}

/// Reject non-finite and non-positive values (NaN fails the comparison too).
pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be a positive finite number, got {value}"),
        ))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
