//! Damped iterative water-filling under a fixed one-to-one subcarrier
//! mapping.
//!
//! Minimum rates are first converted into per-user minimum powers via the
//! inverse Shannon formula; the run is infeasible when those floors alone
//! exceed the budget. Otherwise each iteration blends the previous power
//! vector with the floored water-filling solution,
//! `p <- (1 - alpha) * p + alpha * p_wf`, which damps oscillations and keeps
//! the sum rate monotone (the objective is concave and `p_wf` maximizes it).

use crate::model::{sum_rate_one_to_one, ChannelMatrix, ConvergenceTrace, SystemConfig};
use crate::scalar::{to_f64, Scalar};

use super::waterfill::floored_waterfill;
use super::SolverError;

/// Minimum-rate floors for the DIWF run, in bits/s.
#[derive(Debug, Clone, PartialEq)]
pub enum RateFloor<T> {
    Uniform(T),
    PerUser(Vec<T>),
}

impl<T: Scalar> RateFloor<T> {
    fn per_user(&self, n_users: usize) -> Result<Vec<T>, SolverError> {
        match self {
            RateFloor::Uniform(r) => Ok(vec![*r; n_users]),
            RateFloor::PerUser(v) => {
                if v.len() != n_users {
                    return Err(SolverError::LengthMismatch {
                        expected: n_users,
                        actual: v.len(),
                    });
                }
                Ok(v.clone())
            }
        }
    }
}

/// DIWF tuning: rate floors, damping factor, and the relative sum-rate
/// change treated as converged.
#[derive(Debug, Clone, PartialEq)]
pub struct DiwfParams<T> {
    pub r_min: RateFloor<T>,
    pub damping: T,
    pub tolerance: T,
}

impl<T: Scalar> DiwfParams<T> {
    pub fn new(r_min: RateFloor<T>, damping: T, tolerance: T) -> Result<Self, SolverError> {
        let params = Self {
            r_min,
            damping,
            tolerance,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.damping > T::zero() && self.damping <= T::one()) {
            return Err(SolverError::InvalidParams(format!(
                "damping must be in (0, 1], got {}",
                self.damping
            )));
        }
        if !(self.tolerance > T::zero()) {
            return Err(SolverError::InvalidParams(format!(
                "tolerance must be > 0, got {}",
                self.tolerance
            )));
        }
        let floors = match &self.r_min {
            RateFloor::Uniform(r) => std::slice::from_ref(r),
            RateFloor::PerUser(v) => v.as_slice(),
        };
        if floors.iter().any(|&r| r < T::zero() || !r.is_finite()) {
            return Err(SolverError::InvalidParams(
                "minimum rates must be finite and nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Result of a DIWF run over per-user channel gains.
#[derive(Debug, Clone)]
pub struct DiwfResult<T> {
    /// Final per-user powers in watts.
    pub powers: Vec<T>,
    /// Final per-user rates in bits/s.
    pub per_user_bps: Vec<T>,
    pub trace: ConvergenceTrace<T>,
    pub converged: bool,
    /// Per-user minimum powers implied by the rate floors, in watts.
    pub power_floor: Vec<T>,
    /// Power vector after each iteration, for feasibility auditing.
    pub power_iterates: Vec<Vec<T>>,
}

/// Convert per-user minimum rates into the minimum powers needed to meet
/// them: `gamma_min = 2^(r_min / B) - 1`, `p_min = gamma_min * noise / h`.
/// A user with zero gain and a positive floor is unreachable.
pub fn min_power_floor<T: Scalar>(
    gains: &[T],
    r_min_bps: &[T],
    bandwidth_hz: T,
    noise_power: T,
) -> Result<Vec<T>, SolverError> {
    if gains.len() != r_min_bps.len() {
        return Err(SolverError::LengthMismatch {
            expected: gains.len(),
            actual: r_min_bps.len(),
        });
    }
    let mut unreachable = Vec::new();
    let mut floors = Vec::with_capacity(gains.len());
    for (user, (&h, &r)) in gains.iter().zip(r_min_bps).enumerate() {
        if r.is_zero() {
            floors.push(T::zero());
            continue;
        }
        if h <= T::zero() {
            unreachable.push(user);
            floors.push(T::infinity());
            continue;
        }
        let gamma_min = (r / bandwidth_hz).exp2() - T::one();
        floors.push(gamma_min * noise_power / h);
    }
    if !unreachable.is_empty() {
        return Err(SolverError::InfeasibleUsers { users: unreachable });
    }
    Ok(floors)
}

/// Deterministic one-to-one user-to-subcarrier matching: users are processed
/// in descending order of their best remaining gain, each claiming the
/// unclaimed subcarrier that maximizes their gain.
pub fn greedy_subcarrier_matching<T: Scalar>(
    h: &ChannelMatrix<T>,
) -> Result<Vec<usize>, SolverError> {
    let (k, n) = (h.n_users(), h.n_subcarriers());
    if k > n {
        return Err(SolverError::UnsupportedShape {
            n_users: k,
            n_subcarriers: n,
        });
    }
    let mut mapping = vec![usize::MAX; k];
    let mut user_done = vec![false; k];
    let mut claimed = vec![false; n];
    for _ in 0..k {
        let mut best: Option<(T, usize, usize)> = None;
        for user in 0..k {
            if user_done[user] {
                continue;
            }
            for sc in 0..n {
                if claimed[sc] {
                    continue;
                }
                let g = h.gain(user, sc);
                let better = match best {
                    None => true,
                    Some((bg, bu, bs)) => {
                        g > bg || (g == bg && (user, sc) < (bu, bs))
                    }
                };
                if better {
                    best = Some((g, user, sc));
                }
            }
        }
        let (_, user, sc) = best.expect("k <= n leaves an unclaimed subcarrier");
        mapping[user] = sc;
        user_done[user] = true;
        claimed[sc] = true;
    }
    Ok(mapping)
}

/// Run DIWF over per-user gains (user `k` owns one subcarrier with gain
/// `gains[k]`). Stops when the relative sum-rate change drops below the
/// tolerance or at the iteration cap.
pub fn diwf_solve<T: Scalar>(
    gains: &[T],
    config: &SystemConfig<T>,
    params: &DiwfParams<T>,
) -> Result<DiwfResult<T>, SolverError> {
    config.validate()?;
    params.validate()?;
    if gains.len() != config.n_users {
        return Err(SolverError::LengthMismatch {
            expected: config.n_users,
            actual: gains.len(),
        });
    }

    let r_min = params.r_min.per_user(config.n_users)?;
    let floors = min_power_floor(gains, &r_min, config.bandwidth_hz, config.noise_power)?;
    let required: T = floors.iter().copied().sum();
    if required > config.power_budget + config.feasibility_eps() {
        return Err(SolverError::InfeasiblePowerBudget {
            required_watts: to_f64(required),
            budget_watts: to_f64(config.power_budget),
        });
    }

    // The undamped target is constant for a fixed instance; damping walks the
    // iterate toward it without overshooting.
    let target = floored_waterfill(gains, config.power_budget, config.noise_power, &floors)?;

    let share = (config.power_budget - required) / T::from_usize(gains.len()).unwrap();
    let mut powers: Vec<T> = floors.iter().map(|&f| f + share).collect();
    let mut prev_rate = sum_rate_one_to_one(gains, &powers, config);

    let alpha = params.damping;
    let keep = T::one() - alpha;
    let mut trace = Vec::new();
    let mut iterates = Vec::new();
    let mut converged_at = None;
    for iteration in 1..=config.max_iterations {
        for (i, p) in powers.iter_mut().enumerate() {
            // Clamp guards the floor against last-ulp rounding in the blend.
            *p = (keep * *p + alpha * target[i]).max(floors[i]);
        }
        iterates.push(powers.clone());
        let sum_rate = sum_rate_one_to_one(gains, &powers, config);
        trace.push(sum_rate);

        let rel_change = (to_f64(sum_rate) - to_f64(prev_rate)).abs()
            / to_f64(prev_rate).abs().max(f64::MIN_POSITIVE);
        prev_rate = sum_rate;
        if rel_change < to_f64(params.tolerance) {
            converged_at = Some(iteration);
            break;
        }
    }

    let per_user_bps = gains
        .iter()
        .zip(&powers)
        .map(|(&h, &p)| config.bandwidth_hz * (T::one() + p * h / config.noise_power).log2())
        .collect();

    Ok(DiwfResult {
        powers,
        per_user_bps,
        converged: converged_at.is_some(),
        trace: ConvergenceTrace {
            sum_rates_bps: trace,
            converged_at,
        },
        power_floor: floors,
        power_iterates: iterates,
    })
}

/// Convenience pipeline: greedy one-to-one matching on the full channel
/// matrix, then DIWF over the matched gains. Returns the mapping alongside
/// the result.
pub fn diwf_solve_matrix<T: Scalar>(
    h: &ChannelMatrix<T>,
    config: &SystemConfig<T>,
    params: &DiwfParams<T>,
) -> Result<(Vec<usize>, DiwfResult<T>), SolverError> {
    h.check_dims(config.n_users, config.n_subcarriers)?;
    let mapping = greedy_subcarrier_matching(h)?;
    let gains: Vec<T> = mapping
        .iter()
        .enumerate()
        .map(|(user, &sc)| h.gain(user, sc))
        .collect();
    let result = diwf_solve(&gains, config, params)?;
    Ok((mapping, result))
}
