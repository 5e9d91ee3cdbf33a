use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("bad config: {0}")]
    Config(String),

    #[error("cannot write {path}: {reason}")]
    Output { path: String, reason: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) | CliError::Output { .. } => 2,
            CliError::Solver(_) => 3,
        }
    }
}

impl From<degjc_core::Error> for CliError {
    fn from(e: degjc_core::Error) -> Self {
        use degjc_core::Error as E;
        match e {
            E::InvalidParameter(_) | E::NonDegenerate(_) | E::Unsupported(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Solver(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
