use thiserror::Error;

/// Errors raised by the field operations, the solver and the diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PcfError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Λ came within the singularity floor of zero, where the φ-equation
    /// coefficient 2·coth(Λ) blows up.
    #[error("singularity approach at node {node}: Lambda = {value:e} (floor {floor:e})")]
    SingularityApproach { node: usize, value: f64, floor: f64 },

    #[error("numerical overflow in {what} at node {node}")]
    NumericalOverflow { node: usize, what: &'static str },

    #[error("domain error: {0}")]
    DomainError(String),
}

impl PcfError {
    /// Short machine-readable category, used by the CLI for exit reporting.
    pub fn category(&self) -> &'static str {
        match self {
            PcfError::InvalidInput(_) => "invalid-input",
            PcfError::SingularityApproach { .. } => "singularity",
            PcfError::NumericalOverflow { .. } => "overflow",
            PcfError::DomainError(_) => "domain",
        }
    }
}

pub type Result<T, E = PcfError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> PcfError {
    PcfError::InvalidInput(msg.into())
}
