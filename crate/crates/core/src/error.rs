use thiserror::Error;

/// Errors produced by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("invalid spiral set: endpoints coincide")]
    InvalidSpiral,
    #[error("degenerate jump: one-sided limits coincide")]
    DegenerateJump,
    #[error("invalid exponent: p = {value} violates 1 < p < inf")]
    InvalidExponent { value: f64 },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("point is off the curve (distance {distance:e})")]
    OffCurve { distance: f64 },
    #[error("need at least {needed} usable nodes, found {found}")]
    TooFewNodes { needed: usize, found: usize },
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("matrix size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("mu = {mu} is not on the spiral fibre over t = {t}")]
    OffBundle { t: f64, mu: num_complex::Complex64 },
    #[error("singular integral operator is not bounded: {0}")]
    NotBounded(String),
    #[error("no integer m exists: quantity {quantity} is within tolerance of an integer")]
    NoIntegerExists { quantity: f64 },
    #[error("refinement budget exhausted while tracking the argument")]
    RefinementExhausted,
    #[error("symbol curve passes within {distance:e} of the origin")]
    CurveNearZero { distance: f64 },
    #[error("operator is not Fredholm: {0}")]
    NotFredholm(String),
    #[error("unsupported matrix size n = {n} (maximum {max})")]
    UnsupportedSize { n: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
