//! Error type shared by validation, model assembly, and the solvers.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input failed validation; `field` names the offending value.
    #[error("invalid {field}: {message}")]
    Invalid { field: String, message: String },

    /// Two inputs that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A defaulted payoff was requested for the safe loan.
    #[error("the safe loan cannot default")]
    SafeLoanDefault,

    /// New deposits cover withdrawals, so there is nothing to liquidate.
    #[error("no liquidation needed: deposits placed cover withdrawals")]
    NoShortfall,

    /// Selling the whole portfolio would still not raise the required cash.
    #[error(
        "required cash {required:.6} exceeds the maximal raisable {max_raisable:.6} \
         (gap {gap:.6})"
    )]
    InsufficientLiquidity {
        required: f64,
        max_raisable: f64,
        gap: f64,
    },

    /// The risk floor cannot be met given the cash equality and the bounds.
    #[error(
        "risk floor {floor:.6} unattainable: the maximal liquidated risk \
         consistent with the cash requirement is {max_achievable:.6}"
    )]
    RiskFloorUnattainable { floor: f64, max_achievable: f64 },

    /// A model's feasible region is empty.
    #[error("model infeasible: {0}")]
    Infeasible(String),

    /// The solver could not certify a solution within tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }
}
