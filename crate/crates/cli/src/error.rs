use latent_evolve_core::bridge::BridgeError;
use latent_evolve_core::Error as CoreError;
use thiserror::Error;

/// Failure categories, each with its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or configuration (exit 1).
    #[error("{0}")]
    Config(String),
    /// Evaluator or worker protocol failure (exit 2).
    #[error("{0}")]
    Evaluator(String),
    /// Filesystem or artifact problem (exit 3).
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Evaluator(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn io(context: impl std::fmt::Display, err: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }

    /// Classifies an error raised while evaluating.
    pub fn from_evaluation(err: CoreError) -> Self {
        match err {
            CoreError::InvalidConfig(m) => CliError::Config(m),
            CoreError::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Evaluator(one_line(&other.to_string())),
        }
    }
}

impl From<BridgeError> for CliError {
    fn from(err: BridgeError) -> Self {
        CliError::Evaluator(one_line(&err.to_string()))
    }
}

/// Collapses a possibly multi-line message (e.g. with captured worker
/// stderr) into one line.
pub fn one_line(msg: &str) -> String {
    msg.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" | ")
}

pub type CliResult<T> = Result<T, CliError>;
