use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Input(String),
    #[error("{path}: {msg}")]
    Definition { path: String, msg: String },
    #[error(transparent)]
    Engine(#[from] lambda_forge::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
