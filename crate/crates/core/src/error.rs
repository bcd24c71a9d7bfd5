use thiserror::Error;

use crate::system::SystemKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QtmError {
    /// An argument lies outside the domain of the operation.
    #[error("{name} = {value} is outside the domain: {requirement}")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// The closed-form collision map is not exact for this pair of species.
    #[error(
        "closed-form collision is not exact for a {cold:?}-{hot:?} pair; enable approximate mode to use it anyway"
    )]
    UnsupportedPair { cold: SystemKind, hot: SystemKind },

    /// Two coupled oscillators with g >= sqrt(omega_c omega_h) have an unbounded Hamiltonian.
    #[error("coupling g = {g} is not below the oscillator stability bound {bound}")]
    UnstableCoupling { g: f64, bound: f64 },

    #[error("dense dimension {dimension} exceeds the configured cap {cap}")]
    Resource { dimension: usize, cap: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An optimizer stopped before reaching its tolerance.
    #[error("{routine} did not converge after {iterations} iterations (bracket width {width:e})")]
    NonConvergence {
        routine: &'static str,
        iterations: usize,
        width: f64,
    },

    /// A truncated-oscillator oracle result could not be certified.
    #[error("truncation unconverged: {0}")]
    Unconverged(String),

    /// The mediator cycle has no contracting fixed point (A_c^u_c A_h^u_h = 1).
    #[error("mediator cycle does not contract: A_c^u_c * A_h^u_h = {product}")]
    NoContraction { product: f64 },

    #[error("operation requires the {expected} regime, parameters give {found}")]
    Regime {
        expected: &'static str,
        found: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, QtmError>;

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(QtmError::Domain {
            name,
            value,
            requirement: "must be finite and > 0",
        })
    }
}

pub(crate) fn require_non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(QtmError::Domain {
            name,
            value,
            requirement: "must be finite and >= 0",
        })
    }
}
