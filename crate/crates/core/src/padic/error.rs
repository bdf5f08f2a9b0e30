use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("operands live in different fields ({left} vs {right})")]
    IncompatibleField { left: String, right: String },
    #[error("division by a value that is zero to working precision")]
    DivisionByZeroToPrecision,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("not a square in the working field")]
    NotASquare,
    #[error("extension parameter is already a square in Q_{0}")]
    SquareExtensionParameter(u64),
    #[error("radius p^-({0}) is not in the value group of the field")]
    RadiusNotRepresentable(String),
    #[error("malformed literal: {0}")]
    MalformedLiteral(String),
}
