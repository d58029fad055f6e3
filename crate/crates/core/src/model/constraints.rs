//! Constraint evaluation. Violations are data, not errors, so penalty-based
//! solvers and reports share one source of truth for the constraint math.

use serde::Serialize;

use super::{rate, Allocation, ChannelMatrix, ModelError, QosSpec, SystemConfig};
use crate::scalar::Scalar;

/// Subcarrier-exclusivity check: each subcarrier serves at most one user.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExclusivityCheck {
    pub passed: bool,
    /// Total number of assignments beyond one per subcarrier.
    pub excess: usize,
}

/// Total-power check against the station budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerBudgetCheck<T> {
    pub passed: bool,
    pub total_watts: T,
    /// `max(0, total - budget)`, without the feasibility tolerance.
    pub overshoot_watts: T,
}

/// Per-user minimum-rate check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QosCheck<T> {
    pub passed: bool,
    /// `max(0, r_min - r)` per user, in bits/s.
    pub shortfall_bps: Vec<T>,
    pub total_shortfall_bps: T,
}

/// Outcome of evaluating the allocation constraints. The binary-assignment
/// constraint holds by construction: assignments are stored as booleans.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintReport<T> {
    pub exclusivity: ExclusivityCheck,
    pub power_budget: PowerBudgetCheck<T>,
    pub qos: QosCheck<T>,
}

impl<T: Scalar> ConstraintReport<T> {
    pub fn is_feasible(&self) -> bool {
        self.exclusivity.passed && self.power_budget.passed && self.qos.passed
    }
}

/// Evaluate exclusivity, power budget, and QoS for an allocation.
/// The power comparison is made inclusive of the feasibility tolerance so a
/// budget-exact allocation passes.
pub fn check_constraints<T: Scalar>(
    alloc: &Allocation<T>,
    h: &ChannelMatrix<T>,
    config: &SystemConfig<T>,
    qos: &QosSpec<T>,
) -> Result<ConstraintReport<T>, ModelError> {
    h.check_dims(config.n_users, config.n_subcarriers)?;
    let report = rate(alloc, h, config)?;
    check_constraints_with_rates(alloc, config, qos, &report)
}

/// Constraint math over an already-computed rate report, for callers that
/// evaluate rates anyway (the GA fitness does, every individual).
pub fn check_constraints_with_rates<T: Scalar>(
    alloc: &Allocation<T>,
    config: &SystemConfig<T>,
    qos: &QosSpec<T>,
    rates: &super::RateReport<T>,
) -> Result<ConstraintReport<T>, ModelError> {
    if qos.n_users() != config.n_users {
        return Err(ModelError::DimensionMismatch {
            expected_rows: config.n_users,
            expected_cols: 1,
            rows: qos.n_users(),
            cols: 1,
        });
    }

    let excess: usize = (0..alloc.n_subcarriers())
        .map(|sc| {
            let claims = alloc.assignment().column(sc).iter().filter(|&&a| a).count();
            claims.saturating_sub(1)
        })
        .sum();
    let exclusivity = ExclusivityCheck {
        passed: excess == 0,
        excess,
    };

    let total_watts = alloc.total_power();
    let overshoot = (total_watts - config.power_budget).max(T::zero());
    let power_budget = PowerBudgetCheck {
        passed: total_watts <= config.power_budget + config.feasibility_eps(),
        total_watts,
        overshoot_watts: overshoot,
    };

    let shortfall_bps: Vec<T> = rates
        .per_user_bps
        .iter()
        .enumerate()
        .map(|(user, &r)| (qos.floor(user) - r).max(T::zero()))
        .collect();
    let total_shortfall_bps: T = shortfall_bps.iter().copied().sum();
    let qos_check = QosCheck {
        passed: total_shortfall_bps.is_zero(),
        shortfall_bps,
        total_shortfall_bps,
    };

    Ok(ConstraintReport {
        exclusivity,
        power_budget,
        qos: qos_check,
    })
}
