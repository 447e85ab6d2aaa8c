use thiserror::Error;

use crate::expr::ExprError;
use crate::model::ModelError;

/// Errors from the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("singular rebase matrix: {0}")]
    SingularRebase(String),
    #[error("generator-rank: R has rank {rank} < {m} at point {point}")]
    GeneratorRank { point: usize, rank: usize, m: usize },
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
    #[error("invalid ambiguity parameter: {0}")]
    Ambiguity(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
