use thiserror::Error;

use crate::model::{Constant, SourceSpan, Symbol};

/// Failure while evaluating an arithmetic term.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable {0} is unbound")]
    Unbound(Symbol),
    #[error("arithmetic on non-integer constant {0:?}")]
    NonInteger(Constant),
    #[error("integer overflow")]
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{span}: {message}")]
    Parse { message: String, span: SourceSpan },

    #[error("rule {rule}{}: variable {var} does not occur as an argument of a regular literal", fmt_span(.span))]
    UnsafeRule {
        rule: usize,
        var: Symbol,
        span: Option<SourceSpan>,
    },

    #[error("rule {rule}{}: {source}", fmt_span(.span))]
    Eval {
        rule: usize,
        span: Option<SourceSpan>,
        source: EvalError,
    },

    #[error("{what}: size {size} exceeds the configured cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid splitting set: {0}")]
    InvalidSplit(String),

    #[error("expected a ground construct: {0}")]
    NonGround(String),
}

fn fmt_span(span: &Option<SourceSpan>) -> String {
    match span {
        Some(s) => format!(" (at {s})"),
        None => String::new(),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
