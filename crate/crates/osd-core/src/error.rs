use thiserror::Error;

/// Errors raised by exact algebraic computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraicError {
    #[error("interval endpoint is a root of the polynomial")]
    EndpointIsRoot,
    #[error("polynomial has no real root")]
    NoRealRoot,
    #[error("root certification failed at maximum working precision")]
    PrecisionExhausted,
    #[error("a conjugate modulus cannot be separated from 1")]
    BoundaryCase,
}

/// Errors raised while building rule data.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("substitution rule is not primitive")]
    NotPrimitive,
    #[error("eigenvector elimination hit a degenerate pivot")]
    DegeneratePivot,
    #[error(transparent)]
    Algebraic(#[from] AlgebraicError),
}

/// Errors raised by the balanced-pair machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PairError {
    #[error("words do not have equal geometric length")]
    UnbalancedInput,
    #[error("pair closure exceeded the node cap ({0} nodes)")]
    CapExceeded(usize),
    #[error(transparent)]
    Algebraic(#[from] AlgebraicError),
}

/// Errors raised by dimension computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OsdError {
    #[error("product factor does not have an exact finite dimension")]
    NonExactFactor,
    #[error("spectral data is inconsistent: {0}")]
    InvalidSpectrum(String),
    #[error(transparent)]
    Algebraic(#[from] AlgebraicError),
}

/// Errors raised by the empirical decay estimator.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("not enough usable trajectory steps after burn-in")]
    InsufficientData,
    #[error(transparent)]
    Pair(#[from] PairError),
}

/// Errors raised while parsing rule files.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("letter `{letter}` is used in an image but has no rule")]
    UndefinedLetter { letter: String },
    #[error("letter `{letter}` has more than one rule")]
    DuplicateRule { letter: String },
}
