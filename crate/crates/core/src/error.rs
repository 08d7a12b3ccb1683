use thiserror::Error;

use crate::expr::ParseError;

/// Errors raised by scale construction, calculus operations and checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("time scale must contain at least one point")]
    EmptyScale,
    #[error("non-finite segment endpoint [{lo}, {hi}]")]
    NonFinite { lo: f64, hi: f64 },
    #[error("segment has lo > hi: [{lo}, {hi}]")]
    ReversedSegment { lo: f64, hi: f64 },
    #[error("point {t} is not in the time scale")]
    NotInScale { t: f64 },
    #[error("bad interval: need a < b, got a = {a}, b = {b}")]
    BadInterval { a: f64, b: f64 },
    #[error("point {t} is a left-scattered maximum; the delta derivative is undefined there")]
    OutsideKappaDomain { t: f64 },
    #[error("{what} did not converge (residual {residual:e})")]
    NoConvergence { what: &'static str, residual: f64 },
    #[error("evaluation domain error: {0}")]
    EvalDomain(String),
    #[error("tabulated function has no value at {t}")]
    TabulationGap { t: f64 },
    #[error("substitution map is not strictly increasing near {t}")]
    BadSubstitution { t: f64 },
    #[error("quotient undefined at {t}: g(t)*g(sigma(t)) = 0")]
    QuotientUndefined { t: f64 },
    #[error("expression is not differentiable: {0}")]
    NotDifferentiable(String),
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("invalid exponents: {0}")]
    BadExponents(String),
    #[error("invalid bounds: need 0 < m <= M < inf, got m = {m}, M = {big_m}")]
    BadBounds { m: f64, big_m: f64 },
    #[error("unknown theorem `{0}`")]
    UnknownTheorem(String),
    #[error("invalid scale description: {0}")]
    InvalidScaleSpec(String),
    #[error("invalid tabulation: {0}")]
    InvalidTabulation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
