use thiserror::Error;

/// Errors produced by the model, solver and simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid simulation config `{name}` = {value}: {reason}")]
    InvalidConfig {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("root of {what} not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    NotBracketed {
        what: &'static str,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("{what} did not converge after {iterations} iterations (last residual {residual})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("evaluation point z = {0} is outside [0, inf)")]
    Domain(f64),

    #[error("non-finite {what}; parameters are outside the representable range")]
    NonFinite { what: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;
