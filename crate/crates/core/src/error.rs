use thiserror::Error;

use crate::coords::CoordSystem;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library. Scalar values are carried as rendered
/// strings so the type stays independent of the scalar mode.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed parameters: {0}")]
    MalformedParameters(String),
    #[error("malformed distribution: {0}")]
    MalformedDistribution(String),
    #[error("expected a {expected} distribution, found {found}")]
    WrongSystem { expected: CoordSystem, found: CoordSystem },
    #[error("{0}")]
    OutOfRange(String),
    #[error("no real lift: v = {v} is negative")]
    NoRealLift { v: String },
    #[error("not in the image of the quotient map: v = 0 but a = {a}, c = {c}")]
    NotInImage { a: String, c: String },
    #[error("v = {v} has no square root in the scalar field")]
    IrrationalLift { v: String },
    #[error("recovery guard {guard} vanished (value {value})")]
    GuardVanished { guard: &'static str, value: String },
    #[error("parameters are not stochastic: {0}")]
    NonStochastic(String),
    #[error("distribution is not in the model: {0}")]
    NotInModel(String),
    #[error("identification failed: {0}")]
    IdentificationFailed(String),
    #[error("not a model distribution: {0}")]
    NotAModelDistribution(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}
