use thiserror::Error;

/// Errors produced by the synthesis, transform and analysis stages.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical self-check failed (for example a non-real autocorrelation sum).
    #[error("numerical consistency failure: {0}")]
    Consistency(String),

    /// Too few detections to estimate a revival time.
    #[error("revival time cannot be estimated: {0}")]
    EstimationImpossible(String),

    /// Invalid run configuration. `line` is 1-based when known.
    #[error("{}", match .line { Some(l) => format!("config error (line {l}): {message}"), None => format!("config error: {message}") })]
    Config {
        line: Option<usize>,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

impl Error {
    /// Process exit status for the command-line tool.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config { .. } => 2,
            Error::Domain(_) | Error::Consistency(_) => 3,
            Error::EstimationImpossible(_) => 4,
            Error::Io(_) => 1,
        }
    }
}
