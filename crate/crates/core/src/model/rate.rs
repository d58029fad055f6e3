//! SINR and Shannon-rate evaluation.

use ndarray::Array2;

use super::{Allocation, ChannelMatrix, ModelError, SystemConfig};
use crate::scalar::{cast, Scalar};

/// Per-pair rates, per-user totals, and the sum rate, all in bits/s.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport<T> {
    /// K x N achievable rate for each (user, subcarrier) pair.
    pub rates: Array2<T>,
    /// Row sums over assigned pairs.
    pub per_user_bps: Vec<T>,
    /// Total over all users.
    pub sum_rate_bps: T,
}

/// Signal-to-interference-plus-noise ratio for every (user, subcarrier) pair:
/// received power over the noise plus the power of every other user assigned
/// to the same subcarrier. Under subcarrier exclusivity the interference sum
/// is empty and this reduces to `p * h / noise`.
pub fn sinr<T: Scalar>(
    alloc: &Allocation<T>,
    h: &ChannelMatrix<T>,
    noise_power: T,
) -> Result<Array2<T>, ModelError> {
    h.check_dims(alloc.n_users(), alloc.n_subcarriers())?;
    if !(noise_power > T::zero()) || !noise_power.is_finite() {
        return Err(ModelError::NonPositiveNoise);
    }

    let (k, n) = (alloc.n_users(), alloc.n_subcarriers());
    let mut out = Array2::from_elem((k, n), T::zero());
    for sc in 0..n {
        let mut column_rx = T::zero();
        for user in 0..k {
            if alloc.is_assigned(user, sc) {
                column_rx = column_rx + alloc.power()[[user, sc]] * h.gain(user, sc);
            }
        }
        for user in 0..k {
            let own = alloc.power()[[user, sc]] * h.gain(user, sc);
            if own.is_zero() {
                continue;
            }
            let interference = column_rx - own;
            out[[user, sc]] = own / (interference + noise_power);
        }
    }
    Ok(out)
}

/// Shannon-Hartley rates `B * log2(1 + sinr)` plus per-user and total sums
/// over the assigned pairs.
pub fn rate<T: Scalar>(
    alloc: &Allocation<T>,
    h: &ChannelMatrix<T>,
    config: &SystemConfig<T>,
) -> Result<RateReport<T>, ModelError> {
    h.check_dims(config.n_users, config.n_subcarriers)?;
    let gamma = sinr(alloc, h, config.noise_power)?;
    let rates = gamma.mapv(|g| config.bandwidth_hz * (T::one() + g).log2());

    let per_user_bps: Vec<T> = (0..alloc.n_users())
        .map(|user| {
            (0..alloc.n_subcarriers())
                .filter(|&sc| alloc.is_assigned(user, sc))
                .map(|sc| rates[[user, sc]])
                .sum()
        })
        .collect();
    let sum_rate_bps = per_user_bps.iter().copied().sum();
    Ok(RateReport {
        rates,
        per_user_bps,
        sum_rate_bps,
    })
}

/// Sum rate of a one-to-one allocation given per-user gains and powers,
/// with no interference. Shared by the water-filling solvers.
pub fn sum_rate_one_to_one<T: Scalar>(gains: &[T], powers: &[T], config: &SystemConfig<T>) -> T {
    gains
        .iter()
        .zip(powers)
        .map(|(&h, &p)| config.bandwidth_hz * (T::one() + p * h / config.noise_power).log2())
        .sum()
}

/// Convert bits/s to Mbps for reporting.
pub fn bps_to_mbps<T: Scalar>(bps: T) -> T {
    bps / cast(1e6)
}
