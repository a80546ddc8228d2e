//! Crate-wide error type.

/// Errors surfaced by the numerical routines.
///
/// Domain violations are caught eagerly at construction / entry; divergence
/// and non-convergence are distinguished so callers can tell "the integral
/// does not exist" from "the quadrature budget ran out".
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside the mathematical domain of the operation.
    #[error("{name} = {value} violates {requirement}")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// The requested integral diverges (no finite value exists).
    #[error("integral diverges: {0}")]
    Divergent(String),

    /// Evaluation requested at a point where the expression is singular.
    #[error("singular evaluation: {0}")]
    Singular(String),

    /// Adaptive quadrature exhausted its subdivision budget. The best
    /// estimate and its error bound are attached for diagnostics.
    #[error("quadrature did not converge (estimate {estimate:e}, error bound {error:e})")]
    NonConvergent { estimate: f64, error: f64 },

    /// The integrand produced NaN or ±inf at a quadrature node.
    #[error("integrand returned a non-finite value at x = {0:e}")]
    NonFiniteIntegrand(f64),

    /// Invalid radial profile data (grid ordering, length mismatch, ...).
    #[error("radial profile: {0}")]
    Profile(String),

    /// Richardson/Neville extrapolation failed to settle.
    #[error("extrapolation did not converge: {0}")]
    Extrapolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Helper for the ubiquitous "x must satisfy ..." checks.
    pub(crate) fn domain(name: &'static str, value: f64, requirement: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            requirement,
        }
    }
}
