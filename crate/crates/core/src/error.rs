use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An item or agent outside the instance's universe.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller-side precondition did not hold.
    #[error("contract violated: {0}")]
    Contract(String),

    /// An exhaustive routine would exceed its configured budget or cap.
    #[error("resource limit: {0}")]
    Resource(String),

    #[error("unsupported for {mode} preferences: {what}")]
    UnsupportedMode { mode: &'static str, what: String },

    /// No perfect exchange matching exists; impossible for matroids.
    #[error("constraint is not a matroid: {0}")]
    NotMatroid(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource(_) => 2,
            _ => 1,
        }
    }
}
