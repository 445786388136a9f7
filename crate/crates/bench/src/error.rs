use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("unknown algorithm '{0}'")]
    UnknownAlgorithm(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed report: {0}")]
    Report(String),
    #[error(transparent)]
    Core(#[from] joinopt_core::Error),
    #[error(transparent)]
    Format(#[from] joinopt_core::io::FormatError),
    #[error(transparent)]
    Milp(#[from] joinopt_milp::MilpError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, BenchError>;
