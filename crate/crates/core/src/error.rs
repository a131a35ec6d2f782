//! Shared error type for every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the field, expression, sequence and
/// microscope layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite real input: {0}")]
    NonFiniteInput(f64),

    #[error("division by zero")]
    DivisionByZero,

    #[error("valuation {0} exceeds the tracked bound ±{1}")]
    ValuationOverflow(i64, i64),

    #[error("operands have different truncation orders ({0} vs {1})")]
    OrderMismatch(usize, usize),

    #[error("indistinguishable at order {0}")]
    Indistinguishable(usize),

    #[error("no standard part: element is infinite")]
    NoStandardPart,

    #[error("{func}: argument {value} is outside the domain {domain}")]
    DomainViolation {
        func: String,
        value: f64,
        domain: String,
    },

    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("{0} is not analytic at standard part {1}")]
    NonAnalytic(String, f64),

    #[error("derivative order {0} is beyond working order {1}")]
    BeyondWorkingOrder(usize, usize),

    #[error("not differentiable at {0} (infinite quotient)")]
    InfiniteQuotient(f64),

    #[error("sequence rule failed at index {index}: {message}")]
    SeqRule { index: u64, message: String },

    #[error("sample at t = {t} failed: {message}")]
    SampleFailure { t: f64, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite accumulation in evaluation")]
    NonFiniteResult,
}

impl Error {
    /// Stable machine-readable code, used by the CLI diagnostic line.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonFiniteInput(_) => "NONFINITE_INPUT",
            Error::DivisionByZero => "DIV_ZERO",
            Error::ValuationOverflow(..) => "VALUATION_OVERFLOW",
            Error::OrderMismatch(..) => "ORDER_MISMATCH",
            Error::Indistinguishable(_) => "INDISTINGUISHABLE",
            Error::NoStandardPart => "NO_STANDARD_PART",
            Error::DomainViolation { .. } => "DOMAIN",
            Error::Syntax { .. } => "SYNTAX",
            Error::UnknownFunction(_) => "UNKNOWN_FUNCTION",
            Error::UnboundVariable(_) => "UNBOUND_VAR",
            Error::NonAnalytic(..) => "NON_ANALYTIC",
            Error::BeyondWorkingOrder(..) => "BEYOND_ORDER",
            Error::InfiniteQuotient(_) => "INFINITE_QUOTIENT",
            Error::SeqRule { .. } => "SEQ_RULE",
            Error::SampleFailure { .. } => "SAMPLE",
            Error::InvalidArgument(_) => "BAD_ARG",
            Error::NonFiniteResult => "NONFINITE_RESULT",
        }
    }
}
