use thiserror::Error;

use crate::tree::TreeViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid join tree: {}", join_violations(.0))]
    InvalidTree(Vec<TreeViolation>),

    /// The instance exceeds the size an exhaustive method is willing to handle.
    #[error("{algorithm} refuses {relations} relations (limit {limit})")]
    TooLarge {
        algorithm: &'static str,
        relations: usize,
        limit: usize,
    },
}

fn join_violations(v: &[TreeViolation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
