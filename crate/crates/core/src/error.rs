use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{op}: argument outside domain ({detail})")]
    Domain { op: &'static str, detail: String },

    #[error("{op}: result overflows double precision ({detail})")]
    Overflow { op: &'static str, detail: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed field: {0}")]
    Shape(String),

    #[error("{op}: numerical failure ({detail})")]
    Numerical { op: &'static str, detail: String },

    #[error("{op}: truncation radius {radius} exceeds box half-width {half_width}")]
    Truncation {
        op: &'static str,
        radius: f64,
        half_width: f64,
    },

    #[error("projection onto the Nehari manifold failed: {0}")]
    Projection(String),

    #[error("descent stopped after {iterations} iterations with residual {residual:e}")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("solution has a negative part of size {min:e}")]
    Positivity { min: f64 },

    #[error("epsilon {eps} is infeasible on this grid: {detail}")]
    Infeasible { eps: f64, detail: String },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        op,
        detail: detail.into(),
    }
}

pub(crate) fn numerical(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Numerical {
        op,
        detail: detail.into(),
    }
}
