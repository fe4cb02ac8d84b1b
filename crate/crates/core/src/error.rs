use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("resolution mismatch: {left} vs {right}")]
    ResolutionMismatch { left: u32, right: u32 },

    #[error("insufficient resolution: {what} needs resolution {needed}, have {have}")]
    InsufficientResolution {
        what: String,
        needed: u32,
        have: u32,
    },

    #[error("resolution {0} exceeds the supported maximum")]
    ResolutionTooLarge(u32),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn insufficient(what: impl Into<String>, needed: u32, have: u32) -> Self {
        Error::InsufficientResolution {
            what: what.into(),
            needed,
            have,
        }
    }
}
