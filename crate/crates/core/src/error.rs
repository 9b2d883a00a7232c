use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A matrix that should be a density matrix is not Hermitian, not unit
    /// trace, or has an eigenvalue below the PSD tolerance.
    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Sampling-test parameters outside `0 <= Delta < epsilon/3`, `epsilon, delta in (0, 1]`.
    #[error("invalid test parameters: {0}")]
    Parameter(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    /// A closed-form bound evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("estimation impossible: {0}")]
    EstimationImpossible(String),

    /// The server's assumed state carries no information about the phase.
    #[error("unestimable: {0}")]
    Unestimable(String),

    /// A party received a message out of the step order.
    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
