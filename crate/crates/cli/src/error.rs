use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config files or parameter combinations.
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Numerical(mim_core::Error),

    /// A requested check ran and did not pass.
    #[error("{0}")]
    Check(String),

    #[error("{0}")]
    Io(String),
}

impl From<mim_core::Error> for CliError {
    fn from(e: mim_core::Error) -> Self {
        use mim_core::Error::*;
        match e {
            InvalidConfig(_) | OutOfRange { .. } | InvalidArgument(_) | WidthMismatch { .. } => {
                Self::Usage(e.to_string())
            }
            other => Self::Numerical(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Numerical(_) | Self::Check(_) | Self::Io(_) => 1,
        }
    }
}
