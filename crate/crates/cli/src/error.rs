use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Core(#[from] ksns_core::Error),

    #[error("plot: {0}")]
    Plot(String),

    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(ksns_core::Error::InvalidParameter(_) | ksns_core::Error::InvalidGrid { .. }) => 2,
            CliError::Core(ksns_core::Error::Io(_) | ksns_core::Error::Csv(_) | ksns_core::Error::Checkpoint(_)) => 3,
            CliError::Io(_) | CliError::Plot(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Config(msg.into()))
}
