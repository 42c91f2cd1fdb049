use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("evaluation point {point:?} lies outside the interpolation domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("mesh invariant violated: {0}")]
    MeshInvariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

impl Error {
    /// True for failures caused by the numerical setup (mesh/quadrature
    /// invariants) rather than by bad user input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::OutsideDomain { .. } | Error::MeshInvariant(_))
    }
}
