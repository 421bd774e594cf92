use thiserror::Error;

/// Errors raised by the measure, integral, convexity and bound routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval [{lo}, {hi}]: need finite lo <= hi")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("threshold must be non-negative, got {0}")]
    InvalidThreshold(f64),

    #[error("closed-form level sets need a monotone function; hint is Unknown")]
    StrategyMismatch,

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("function is negative on the integration interval: f({x}) = {value}")]
    NegativeFunction { x: f64, value: f64 },

    #[error("function is not finite at x = {x}")]
    NonFinite { x: f64 },

    #[error("function must be positive for r <= 0: f({x}) = {value}")]
    NonPositiveFunction { x: f64, value: f64 },

    #[error("point {point} escapes domain [{lo}, {hi}]")]
    DomainEscape { point: f64, lo: f64, hi: f64 },

    #[error("F(beta) - beta does not change sign on [0, {hi}]")]
    NoSignChange { hi: f64 },

    #[error("no root found: equation has no sign change on [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },

    #[error("r = 0 has no bound theorem")]
    RZero,

    #[error("(alpha,m) bounds need f((a + eta)/m)")]
    MissingScaledValue,

    #[error("f(a) = 0 in the decreasing (alpha,m) branch")]
    DivisionByZero,
}

pub type Result<T> = std::result::Result<T, Error>;
