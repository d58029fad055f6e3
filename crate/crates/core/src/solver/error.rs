use thiserror::Error;

use crate::model::ModelError;

/// Errors raised by the allocation solvers. Infeasibility variants carry
/// enough detail to name the binding users or budgets in CLI output.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("no subcarriers assigned: the power subproblem is empty")]
    EmptyAssignment,

    #[error("power budget must be positive, got {budget_watts} W")]
    NonPositiveBudget { budget_watts: f64 },

    #[error("all assigned channels have zero gain; no power allocation can carry data")]
    UnusableChannels,

    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("solver requires n_users <= n_subcarriers, got {n_users} users over {n_subcarriers} subcarriers")]
    UnsupportedShape {
        n_users: usize,
        n_subcarriers: usize,
    },

    #[error(
        "minimum-rate floors are infeasible: floors need {required_watts} W \
         but the budget is {budget_watts} W"
    )]
    InfeasiblePowerBudget {
        required_watts: f64,
        budget_watts: f64,
    },

    #[error("minimum rates are unreachable for users {users:?}")]
    InfeasibleUsers { users: Vec<usize> },

    #[error("slot {slot} holds {users} users but only {n_subcarriers} subcarriers exist")]
    SlotOverflow {
        slot: usize,
        users: usize,
        n_subcarriers: usize,
    },

    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),

    #[error(transparent)]
    Model(#[from] ModelError),
}

impl SolverError {
    /// True for the infeasibility family, which maps to its own CLI exit code.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            SolverError::InfeasiblePowerBudget { .. }
                | SolverError::InfeasibleUsers { .. }
                | SolverError::SlotOverflow { .. }
        )
    }
}
