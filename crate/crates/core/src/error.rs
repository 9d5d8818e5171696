use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The request needs more memory or table coverage than allowed.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Two computation paths that must agree did not.
    #[error("internal consistency failure in `{identity}`: {detail}")]
    InternalConsistency { identity: String, detail: String },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub(crate) fn consistency(identity: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::InternalConsistency {
            identity: identity.into(),
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
