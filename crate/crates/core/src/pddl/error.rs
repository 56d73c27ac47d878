use thiserror::Error;

use super::sexpr::Pos;

/// Errors raised while reading PDDL text. Positions are 1-based line:column;
/// callers prepend the file name when reporting to users.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: unsupported feature `{feature}`")]
    UnsupportedFeature { pos: Pos, feature: String },
    #[error("{pos}: undeclared symbol `{symbol}`")]
    UndeclaredSymbol { pos: Pos, symbol: String },
    #[error("{pos}: `{predicate}` expects {expected} argument(s), got {got}")]
    ArityMismatch { pos: Pos, predicate: String, expected: usize, got: usize },
    #[error("{pos}: duplicate parameter `{name}`")]
    DuplicateParameter { pos: Pos, name: String },
    #[error("{pos}: `{object}` has type `{actual}`, expected `{expected}`")]
    TypeMismatch { pos: Pos, object: String, actual: String, expected: String },
    #[error("{pos}: problem requires domain `{declared}` but `{actual}` was parsed")]
    DomainMismatch { pos: Pos, declared: String, actual: String },
}

/// Errors from applying an action outside its precondition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("action {action} is not applicable in the given state")]
    NotApplicable { action: u32 },
}

/// Violations of the grounded-task structural invariants, reported when a
/// task is assembled directly rather than through the grounder.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error("action `{action}` references fact id {fact} out of range {num_facts}")]
    FactOutOfRange { action: String, fact: u32, num_facts: usize },
    #[error("action `{action}` adds and deletes the same fact")]
    AddDelOverlap { action: String },
    #[error("duplicate fact `{fact}` in the fact universe")]
    DuplicateFact { fact: String },
}
