use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument or configuration value is outside its domain.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// A matrix that must be positive definite is not.
    #[error("numeric domain error: {0}")]
    Numeric(String),

    /// Exhaustive search refused because the instance is too large.
    #[error("instance too large: {vertices} vertices exceeds the cap of {cap}")]
    TooLarge { vertices: usize, cap: usize },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
