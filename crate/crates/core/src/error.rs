use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An instance, position or parameter set violates one of its invariants.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("nothing to place")]
    NothingToPlace,
    #[error("degenerate boundary: total bracket length is zero")]
    DegenerateBoundary,
    #[error("degenerate instance: every bracket has zero area")]
    DegenerateInstance,
    #[error("instance too large for brute force: {0}")]
    TooLarge(String),
    #[error("integration diverged at t = {0}")]
    IntegrationDiverged(f64),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
