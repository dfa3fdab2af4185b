use thiserror::Error;

use crate::classify::Endpoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter left the open interval (-1, inf).
    #[error("range violation: {name} = {value} must satisfy {name} > -1")]
    Range { name: &'static str, value: String },

    #[error("equality violation: alpha = beta = {value}, but alpha != beta is required")]
    Equality { value: String },

    /// Mixed signs, or a zero parameter.
    #[error("sign violation: sgn(alpha) = sgn(beta) != 0 is required (alpha = {alpha}, beta = {beta})")]
    Sign { alpha: String, beta: String },

    /// Admissible signs but neither `beta > alpha > 0` nor `beta < alpha < 0`.
    #[error("order violation: alpha = {alpha}, beta = {beta} fits neither Case 1 (beta > alpha > 0) nor Case 2 (-1 < beta < alpha < 0)")]
    Order { alpha: String, beta: String },

    #[error("domain error: x = {x} is outside the open interval (-1, 1) for {what}")]
    Domain { x: String, what: &'static str },

    /// The pencil `A - lambda B` did not have a one-dimensional null space.
    #[error("nullity error: expected a one-dimensional null space at lambda = {lambda}, found nullity {nullity}")]
    Nullity { nullity: usize, lambda: String },

    #[error("precision error: {0}")]
    Precision(String),

    #[error("convergence error: {0}")]
    Convergence(String),

    #[error("threshold error: {0}")]
    Threshold(String),

    #[error("degenerate input: the bracket [f, phi1] vanishes identically at {endpoint:?}")]
    Degenerate { endpoint: Endpoint },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("parse error: {0}")]
    Parse(String),
}
