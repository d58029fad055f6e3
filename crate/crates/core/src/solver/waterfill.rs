//! Water-filling power allocation over parallel interference-free channels.
//!
//! `waterfill` maximizes `sum_i B log2(1 + p_i h_i / noise)` subject to
//! `sum_i p_i = budget`, `p_i >= 0`. The optimum has the form
//! `p_i = max(0, mu - noise / h_i)`; the water level `mu` is located by
//! bisection on the monotone budget residual, driving it below
//! [`BUDGET_RESIDUAL_TOL_WATTS`].
//!
//! `floored_waterfill` adds per-channel lower bounds: users whose
//! water-filling power would fall below their floor are clamped to it and the
//! residual budget is re-filled over the rest, iterating until the clamp set
//! is stable. For this concave problem the clamping rule is exact.

use crate::scalar::{cast, to_f64, Scalar};

use super::SolverError;

/// Bisection target for `|sum(p) - budget|`, in watts.
pub const BUDGET_RESIDUAL_TOL_WATTS: f64 = 1e-12;

fn validate_inputs<T: Scalar>(gains: &[T], budget: T) -> Result<(), SolverError> {
    if gains.is_empty() {
        return Err(SolverError::EmptyAssignment);
    }
    if !(budget > T::zero()) || !budget.is_finite() {
        return Err(SolverError::NonPositiveBudget {
            budget_watts: to_f64(budget),
        });
    }
    Ok(())
}

/// Classic water-filling. Channels with zero gain receive zero power; at
/// least one gain must be positive. `noise` must be positive.
pub fn waterfill<T: Scalar>(gains: &[T], budget: T, noise: T) -> Result<Vec<T>, SolverError> {
    validate_inputs(gains, budget)?;
    if !(noise > T::zero()) || !noise.is_finite() {
        return Err(SolverError::InvalidParams(format!(
            "noise power must be positive, got {noise}"
        )));
    }

    // Water levels: a channel takes power once mu rises above noise/h.
    let levels: Vec<T> = gains
        .iter()
        .map(|&h| if h > T::zero() { noise / h } else { T::infinity() })
        .collect();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for &l in &levels {
        if l.is_finite() {
            lo = lo.min(l);
            hi = hi.max(l);
        }
    }
    if !lo.is_finite() {
        return Err(SolverError::UnusableChannels);
    }
    let mut hi = hi + budget;

    let spilled = |mu: T| -> T {
        levels
            .iter()
            .map(|&l| (mu - l).max(T::zero()))
            .sum::<T>()
    };

    let tol = cast::<T>(BUDGET_RESIDUAL_TOL_WATTS);
    let mut mu = (lo + hi) / cast(2.0);
    for _ in 0..256 {
        mu = (lo + hi) / cast(2.0);
        let residual = spilled(mu) - budget;
        if residual.abs() <= tol {
            break;
        }
        if residual > T::zero() {
            hi = mu;
        } else {
            lo = mu;
        }
        // Interval collapsed to the scalar type's resolution.
        if (hi - lo) <= T::epsilon() * mu.abs().max(T::one()) {
            mu = (lo + hi) / cast(2.0);
            break;
        }
    }

    Ok(levels.iter().map(|&l| (mu - l).max(T::zero())).collect())
}

/// Water-filling with per-channel minimum powers. Every returned power
/// satisfies `p_i >= floors_i` exactly and the powers sum to the budget.
/// Errors when the floors alone exceed the budget.
pub fn floored_waterfill<T: Scalar>(
    gains: &[T],
    budget: T,
    noise: T,
    floors: &[T],
) -> Result<Vec<T>, SolverError> {
    validate_inputs(gains, budget)?;
    if floors.len() != gains.len() {
        return Err(SolverError::LengthMismatch {
            expected: gains.len(),
            actual: floors.len(),
        });
    }
    if floors.iter().any(|&f| f < T::zero() || !f.is_finite()) {
        return Err(SolverError::InvalidParams(
            "power floors must be finite and nonnegative".into(),
        ));
    }
    let required: T = floors.iter().copied().sum();
    if required > budget + cast(crate::model::FEASIBILITY_EPS_WATTS) {
        return Err(SolverError::InfeasiblePowerBudget {
            required_watts: to_f64(required),
            budget_watts: to_f64(budget),
        });
    }

    let n = gains.len();
    let mut clamped = vec![false; n];
    // Channels that cannot carry rate stay at their floor.
    for i in 0..n {
        if gains[i] <= T::zero() {
            clamped[i] = true;
        }
    }

    loop {
        let free: Vec<usize> = (0..n).filter(|&i| !clamped[i]).collect();
        let held: T = (0..n)
            .filter(|&i| clamped[i])
            .map(|i| floors[i])
            .sum();
        let residual = budget - held;

        if free.is_empty() || residual <= cast(BUDGET_RESIDUAL_TOL_WATTS) {
            // Only the floors fit (or nothing is free): everyone at floor.
            return Ok(floors.to_vec());
        }

        let free_gains: Vec<T> = free.iter().map(|&i| gains[i]).collect();
        let wf = waterfill(&free_gains, residual, noise)?;

        let mut newly_clamped = false;
        for (slot, &i) in free.iter().enumerate() {
            if wf[slot] < floors[i] {
                clamped[i] = true;
                newly_clamped = true;
            }
        }
        if !newly_clamped {
            let mut out = floors.to_vec();
            for (slot, &i) in free.iter().enumerate() {
                out[i] = wf[slot];
            }
            return Ok(out);
        }
    }
}
