use thiserror::Error;

/// Failure classes of the command-line tool, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: modeiso::Error,
    },

    #[error("{0}")]
    Failed(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("pattern correlation {correlation:.6} is below the threshold {threshold}")]
    BelowThreshold { correlation: f64, threshold: f64 },
}

impl CliError {
    pub const CONFIG: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const IO: i32 = 4;
    pub const BELOW_THRESHOLD: i32 = 5;

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => Self::CONFIG,
            Self::Numerical { .. } | Self::Failed(_) => Self::NUMERICAL,
            Self::Io(_) => Self::IO,
            Self::BelowThreshold { .. } => Self::BELOW_THRESHOLD,
        }
    }

    /// Wraps a library error, keeping file and parse problems in the i/o class.
    pub fn context(context: impl Into<String>) -> impl FnOnce(modeiso::Error) -> CliError {
        let context = context.into();
        move |source| match source {
            modeiso::Error::Io(e) => CliError::Io(format!("{context}: {e}")),
            modeiso::Error::Parse { .. } => CliError::Io(format!("{context}: {source}")),
            source => CliError::Numerical { context, source },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
