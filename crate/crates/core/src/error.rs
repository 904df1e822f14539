use thiserror::Error;

use crate::quadratic::Violation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("division by zero")]
    DivisionByZero,
    #[error("characteristic {found} not supported here (expected {expected})")]
    WrongCharacteristic { expected: &'static str, found: u32 },
    #[error("field or search space too large: {0}")]
    FieldTooLarge(String),
    #[error("invalid field specification: {0}")]
    InvalidField(String),
    #[error("gcd of two zero polynomials is undefined")]
    BothZero,
    #[error("input must be nonconstant")]
    ConstantInput,
    #[error("input must be nonzero")]
    ZeroInput,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("degenerate equation: {0}")]
    DegenerateEquation(&'static str),
    #[error("curve rejected: {}", join_violations(.0))]
    CurveRejected(Vec<Violation>),
    #[error("invalid Hasse form: {0}")]
    BadHasseForm(String),
    #[error("elements belong to different curves")]
    MixedCurves,
    #[error("element is zero")]
    ZeroElement,
    #[error("element is not a unit")]
    NotUnit,
    #[error("unit must have the shape a(x) + y")]
    WrongShape,
    #[error("curve is inseparable; no unit search")]
    InseparableCurve,
    #[error("element is not an S-integer: {0}")]
    NotAnSInteger(String),
    #[error("bad place set: {0}")]
    BadPlaceSet(String),
    #[error("ring of integers does not have unit sum number omega")]
    NotOmega,
    #[error("series precision {0} exhausted")]
    PrecisionExhausted(usize),
    #[error("no fundamental unit of the shape a(x) + y")]
    NoFundamentalUnit,
    #[error("no certified n found up to {0}")]
    NoneFound(u64),
    #[error("search budget exceeded after completing sums of {reached} units")]
    BudgetExceeded { reached: usize },
    #[error("{0}")]
    Parse(#[from] crate::parse::ParseError),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
