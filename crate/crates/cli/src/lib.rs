//! Library surface behind the `loanliq` binary: the run configuration
//! schema, result records, region exports, and the error-to-exit-code
//! mapping. Kept as a library so integration tests drive the same
//! code the binary runs.

pub mod config;
pub mod region;
pub mod report;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unusable configuration, flags, or data.
    #[error("{0}")]
    BadInput(String),
    /// The requested problem has no feasible answer.
    #[error("{0}")]
    Infeasible(String),
    /// A failure that is not the user's fault.
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Infeasible(_) => 1,
            CliError::BadInput(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<loanliq::Error> for CliError {
    fn from(err: loanliq::Error) -> Self {
        match err {
            loanliq::Error::Invalid { .. }
            | loanliq::Error::DimensionMismatch { .. }
            | loanliq::Error::SafeLoanDefault => CliError::BadInput(err.to_string()),
            loanliq::Error::NoShortfall
            | loanliq::Error::Infeasible(_)
            | loanliq::Error::InsufficientLiquidity { .. }
            | loanliq::Error::RiskFloorUnattainable { .. } => CliError::Infeasible(err.to_string()),
            loanliq::Error::Numerical(_) => CliError::Internal(err.to_string()),
        }
    }
}
