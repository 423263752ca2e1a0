use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input outside the operation's domain; `param` names the offending input.
    #[error("invalid `{param}`: {reason}")]
    Domain { param: String, reason: String },

    /// A configuration the closed-form model does not cover.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub fn domain(param: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Domain {
            param: param.into(),
            reason: reason.into(),
        }
    }
}
