use thiserror::Error;

/// Errors raised anywhere in the workbench.
///
/// The variants split along the lines the experiment runner needs for exit
/// codes: bad input, numerical refusal, and a measured bound that failed.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the inputs was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A shifted solve hit (or came too close to) the spectrum.
    #[error("near-singular shift: condition estimate {condition:.3e}")]
    NearSingular { condition: f64 },

    /// A computation declined to produce a result it could not certify
    /// (truncation certificates, quadrature budgets, too few fit bins).
    #[error("refused: {0}")]
    Refused(String),

    /// A deterministic bound was measured to fail.
    #[error("bound violated: {0}")]
    BoundViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
