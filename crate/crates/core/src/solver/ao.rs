//! Alternating optimization: water-filling on a fixed assignment, then a
//! greedy per-subcarrier reassignment with powers held fixed, repeated until
//! the assignment stops changing. Each half-step solves its subproblem
//! exactly, so the sum rate never decreases across iterations.
//!
//! When there are more users than subcarriers, [`ao_priority_schedule`]
//! partitions the users over time slots: responders take the first slot,
//! remaining users share later slots round-robin, and each slot is solved
//! independently with the full power budget.

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{
    rate, Allocation, ChannelMatrix, ConvergenceTrace, QosSpec, RateReport, SystemConfig,
    UserClass,
};
use crate::scalar::{cast, to_f64, Scalar};
use crate::seed::derive_seed;

use super::waterfill::{floored_waterfill, waterfill};
use super::SolverError;

/// Relative sum-rate change below which an unchanged assignment counts as
/// converged. Assignment equality is the real fixed-point test; this guards
/// against rate drift while the assignment cycles.
pub const AO_REL_TOL: f64 = 1e-6;

/// Outcome of one alternating-optimization run.
#[derive(Debug, Clone)]
pub struct AoResult<T> {
    pub allocation: Allocation<T>,
    pub report: RateReport<T>,
    pub trace: ConvergenceTrace<T>,
    pub iterations_used: usize,
    pub converged: bool,
}

/// Slot membership of one user in the priority schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityClass {
    pub user: usize,
    pub class: UserClass,
    pub slot: usize,
}

/// Per-slot solution of the priority schedule.
#[derive(Debug, Clone)]
pub struct SlotResult<T> {
    pub slot: usize,
    /// User ids (rows of the full channel matrix) served in this slot.
    pub users: Vec<usize>,
    pub result: AoResult<T>,
}

/// Full output of the time-slotted priority variant.
#[derive(Debug, Clone)]
pub struct PrioritySchedule<T> {
    pub assignments: Vec<PriorityClass>,
    pub slots: Vec<SlotResult<T>>,
}

/// Assign every subcarrier to the user that would achieve the highest rate
/// on it, holding the power currently allocated to that subcarrier fixed.
/// For a fixed per-subcarrier power the rate is monotone in the gain, so the
/// winner is the argmax of `gain * power`. Ties go to the lowest user index.
pub fn greedy_assignment<T: Scalar>(h: &ChannelMatrix<T>, power: &Array2<T>) -> Array2<bool> {
    let (k, n) = (h.n_users(), h.n_subcarriers());
    let mut assignment = Array2::from_elem((k, n), false);
    for sc in 0..n {
        let subcarrier_power: T = (0..k).map(|u| power[[u, sc]]).sum();
        let mut best_user = 0usize;
        let mut best_metric = h.gain(0, sc) * subcarrier_power;
        for user in 1..k {
            let metric = h.gain(user, sc) * subcarrier_power;
            if metric > best_metric {
                best_metric = metric;
                best_user = user;
            }
        }
        assignment[[best_user, sc]] = true;
    }
    assignment
}

/// Water-fill the budget over the currently assigned pairs, returning the
/// new power matrix. Pair order is deterministic (row-major).
fn waterfill_assigned<T: Scalar>(
    assignment: &Array2<bool>,
    h: &ChannelMatrix<T>,
    config: &SystemConfig<T>,
) -> Result<Array2<T>, SolverError> {
    let pairs: Vec<(usize, usize)> = assignment
        .indexed_iter()
        .filter(|(_, &a)| a)
        .map(|(idx, _)| idx)
        .collect();
    let gains: Vec<T> = pairs.iter().map(|&(u, s)| h.gain(u, s)).collect();
    let powers = waterfill(&gains, config.power_budget, config.noise_power)?;
    let mut out = Array2::from_elem(assignment.dim(), T::zero());
    for (&(u, s), &p) in pairs.iter().zip(&powers) {
        out[[u, s]] = p;
    }
    Ok(out)
}

/// Random one-to-one starting assignment (a permutation when K = N) with the
/// budget spread uniformly over the assigned pairs.
fn random_initial<T: Scalar>(
    config: &SystemConfig<T>,
    seed: u64,
) -> (Array2<bool>, Array2<T>) {
    let (k, n) = (config.n_users, config.n_subcarriers);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut subcarriers: Vec<usize> = (0..n).collect();
    subcarriers.shuffle(&mut rng);

    let mut assignment = Array2::from_elem((k, n), false);
    let mut power = Array2::from_elem((k, n), T::zero());
    let share = config.power_budget / cast(k as f64);
    for (user, &sc) in subcarriers.iter().take(k).enumerate() {
        assignment[[user, sc]] = true;
        power[[user, sc]] = share;
    }
    (assignment, power)
}

/// Alternating optimization for K <= N. Deterministic for a fixed seed.
///
/// Stops when the assignment matrix repeats between iterations and the
/// relative sum-rate change is below [`AO_REL_TOL`], or at the iteration cap.
/// When QoS floors are supplied and violated at convergence, powers are
/// re-filled over the converged assignment with per-user minimum-power
/// floors; the reported allocation reflects that pass while the trace keeps
/// the unconstrained optimization path.
pub fn ao_solve<T: Scalar>(
    h: &ChannelMatrix<T>,
    config: &SystemConfig<T>,
    qos: Option<&QosSpec<T>>,
    seed: u64,
) -> Result<AoResult<T>, SolverError> {
    config.validate()?;
    h.check_dims(config.n_users, config.n_subcarriers)?;
    if config.n_users > config.n_subcarriers {
        return Err(SolverError::UnsupportedShape {
            n_users: config.n_users,
            n_subcarriers: config.n_subcarriers,
        });
    }

    let (mut assignment, mut power) = random_initial(config, seed);
    let mut prev_rate = {
        let alloc = Allocation::new(assignment.clone(), power.clone())?;
        rate(&alloc, h, config)?.sum_rate_bps
    };

    let mut trace = Vec::new();
    let mut converged_at = None;
    for iteration in 1..=config.max_iterations {
        power = waterfill_assigned(&assignment, h, config)?;
        let next_assignment = greedy_assignment(h, &power);

        // The new owner of each subcarrier inherits its power.
        let mut next_power = Array2::from_elem(power.dim(), T::zero());
        for sc in 0..config.n_subcarriers {
            let subcarrier_power: T = (0..config.n_users).map(|u| power[[u, sc]]).sum();
            for user in 0..config.n_users {
                if next_assignment[[user, sc]] {
                    next_power[[user, sc]] = subcarrier_power;
                }
            }
        }

        let alloc = Allocation::new(next_assignment.clone(), next_power.clone())?;
        debug_assert!(alloc.is_exclusive());
        debug_assert!(
            alloc.total_power() <= config.power_budget + config.feasibility_eps(),
            "budget violated mid-iteration"
        );
        let sum_rate = rate(&alloc, h, config)?.sum_rate_bps;
        trace.push(sum_rate);

        let assignment_stable = next_assignment == assignment;
        let rel_change = (to_f64(sum_rate) - to_f64(prev_rate)).abs()
            / to_f64(prev_rate).abs().max(f64::MIN_POSITIVE);
        assignment = next_assignment;
        power = next_power;
        prev_rate = sum_rate;

        if assignment_stable && rel_change < AO_REL_TOL {
            converged_at = Some(iteration);
            break;
        }
    }

    let iterations_used = trace.len();
    let mut allocation = Allocation::new(assignment, power)?;
    let mut report = rate(&allocation, h, config)?;

    if let Some(qos) = qos {
        if let Some(adjusted) = enforce_qos(&allocation, h, config, qos, &report)? {
            allocation = adjusted;
            report = rate(&allocation, h, config)?;
        }
    }

    Ok(AoResult {
        allocation,
        report,
        trace: ConvergenceTrace {
            sum_rates_bps: trace,
            converged_at,
        },
        iterations_used,
        converged: converged_at.is_some(),
    })
}

/// Re-fill powers over the converged assignment with per-user floors that
/// guarantee each minimum rate on the user's best assigned subcarrier.
/// Returns `None` when the QoS already holds.
fn enforce_qos<T: Scalar>(
    allocation: &Allocation<T>,
    h: &ChannelMatrix<T>,
    config: &SystemConfig<T>,
    qos: &QosSpec<T>,
    report: &RateReport<T>,
) -> Result<Option<Allocation<T>>, SolverError> {
    if qos.n_users() != config.n_users {
        return Err(SolverError::LengthMismatch {
            expected: config.n_users,
            actual: qos.n_users(),
        });
    }
    let violated = report
        .per_user_bps
        .iter()
        .enumerate()
        .any(|(user, &r)| r < qos.floor(user));
    if !violated {
        return Ok(None);
    }

    let pairs: Vec<(usize, usize)> = allocation
        .assigned_pairs()
        .map(|(u, s, _)| (u, s))
        .collect();

    // Floor each user's requirement on their best assigned subcarrier.
    let mut floors = vec![T::zero(); pairs.len()];
    let mut unreachable = Vec::new();
    for user in 0..config.n_users {
        let r_min = qos.floor(user);
        if r_min.is_zero() {
            continue;
        }
        let best = pairs
            .iter()
            .enumerate()
            .filter(|(_, &(u, _))| u == user)
            .max_by(|(_, &(_, a)), (_, &(_, b))| {
                h.gain(user, a)
                    .partial_cmp(&h.gain(user, b))
                    .expect("gains are finite")
            });
        match best {
            Some((slot, &(_, sc))) if h.gain(user, sc) > T::zero() => {
                let gamma_min = (r_min / config.bandwidth_hz).exp2() - T::one();
                floors[slot] = gamma_min * config.noise_power / h.gain(user, sc);
            }
            _ => unreachable.push(user),
        }
    }
    if !unreachable.is_empty() {
        return Err(SolverError::InfeasibleUsers { users: unreachable });
    }
    let required: T = floors.iter().copied().sum();
    if required > config.power_budget + config.feasibility_eps() {
        let binding: Vec<usize> = pairs
            .iter()
            .zip(&floors)
            .filter(|(_, &f)| f > T::zero())
            .map(|(&(u, _), _)| u)
            .collect();
        return Err(SolverError::InfeasibleUsers { users: binding });
    }

    let gains: Vec<T> = pairs.iter().map(|&(u, s)| h.gain(u, s)).collect();
    let powers = floored_waterfill(&gains, config.power_budget, config.noise_power, &floors)?;
    let mut power = Array2::from_elem((config.n_users, config.n_subcarriers), T::zero());
    let mut assignment = Array2::from_elem((config.n_users, config.n_subcarriers), false);
    for (&(u, s), &p) in pairs.iter().zip(&powers) {
        assignment[[u, s]] = true;
        power[[u, s]] = p;
    }
    Ok(Some(Allocation::new(assignment, power)?))
}

/// Time-slotted priority scheduling for the K > N regime.
///
/// Responders occupy slot 0 (error if they outnumber the subcarriers);
/// remaining users are partitioned round-robin over the later slots. Every
/// slot is solved independently by [`ao_solve`] with the full power budget.
/// `classes[user]` is the class of channel-matrix row `user`.
pub fn ao_priority_schedule<T: Scalar>(
    classes: &[UserClass],
    h: &ChannelMatrix<T>,
    config: &SystemConfig<T>,
    n_slots: usize,
    seed: u64,
) -> Result<PrioritySchedule<T>, SolverError> {
    config.validate()?;
    if classes.len() != h.n_users() {
        return Err(SolverError::LengthMismatch {
            expected: h.n_users(),
            actual: classes.len(),
        });
    }
    if n_slots == 0 {
        return Err(SolverError::InvalidParams("n_slots must be >= 1".into()));
    }

    let responders: Vec<usize> = classes
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == UserClass::Responder)
        .map(|(u, _)| u)
        .collect();
    let civilians: Vec<usize> = classes
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == UserClass::Civilian)
        .map(|(u, _)| u)
        .collect();

    if responders.len() > config.n_subcarriers {
        return Err(SolverError::SlotOverflow {
            slot: 0,
            users: responders.len(),
            n_subcarriers: config.n_subcarriers,
        });
    }

    let mut groups: Vec<Vec<usize>> = Vec::with_capacity(n_slots);
    let civilian_slots = if responders.is_empty() {
        groups.resize(n_slots, Vec::new());
        n_slots
    } else {
        groups.push(responders.clone());
        groups.resize(n_slots, Vec::new());
        n_slots - 1
    };
    if civilian_slots == 0 && !civilians.is_empty() {
        return Err(SolverError::InvalidParams(format!(
            "{} civilians but no slots remain after the responder slot",
            civilians.len()
        )));
    }
    let offset = n_slots - civilian_slots;
    for (i, &user) in civilians.iter().enumerate() {
        groups[offset + i % civilian_slots].push(user);
    }

    for (slot, group) in groups.iter().enumerate() {
        if group.is_empty() {
            return Err(SolverError::InvalidParams(format!(
                "slot {slot} is empty; reduce n_slots"
            )));
        }
        if group.len() > config.n_subcarriers {
            return Err(SolverError::SlotOverflow {
                slot,
                users: group.len(),
                n_subcarriers: config.n_subcarriers,
            });
        }
    }

    let mut assignments = Vec::with_capacity(classes.len());
    let mut slots = Vec::with_capacity(groups.len());
    for (slot, group) in groups.iter().enumerate() {
        for &user in group {
            assignments.push(PriorityClass {
                user,
                class: classes[user],
                slot,
            });
        }
        let rows = h.gains().select(Axis(0), group);
        let sub_h = ChannelMatrix::new(rows)?;
        let sub_config = SystemConfig {
            n_users: group.len(),
            ..config.clone()
        };
        let result = ao_solve(&sub_h, &sub_config, None, derive_seed(seed, slot as u64, 0))?;
        slots.push(SlotResult {
            slot,
            users: group.clone(),
            result,
        });
    }
    assignments.sort_by_key(|a| a.user);

    Ok(PrioritySchedule { assignments, slots })
}
