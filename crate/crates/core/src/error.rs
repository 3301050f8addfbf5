use thiserror::Error;

use crate::model::BlockId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("malformed block id {0:?}")]
    MalformedBlockId(String),
    #[error("inconsistent branch block {block}: {reason}")]
    InconsistentBranchBlock { block: BlockId, reason: String },
    #[error("invalid response record: {0}")]
    InvalidRecord(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("answer for {got} but the pending question is {expected}")]
    AnswerMismatch { expected: String, got: String },
    #[error("no question is pending; the survey has finished")]
    NotRunning,
    #[error("branch target {0} is not a pending top-level block")]
    UnknownBranchTarget(BlockId),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("survey has {} well-formedness violation(s); run the checker first", .0.len())]
    CompileOnInvalidSurvey(Vec<crate::static_analysis::Violation>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("invalid profile: {0}")]
    Invalid(String),
    #[error("profile JSON: {0}")]
    Json(#[from] serde_json::Error),
}
