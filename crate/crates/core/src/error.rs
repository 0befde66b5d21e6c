use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid setup: {0}")]
    InvalidSetup(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("exact-mode log obstruction: {0}")]
    LogObstruction(String),
    #[error("not available in exact mode: {0}")]
    ExactUnsupported(String),
    #[error("ansatz not applicable: {0}")]
    AnsatzNotApplicable(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("singular linear system: {0}")]
    Singular(String),
    #[error("mathematical inconsistency: {0}")]
    Inconsistency(String),
    #[error("solver did not converge: {0}")]
    NoConvergence(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
