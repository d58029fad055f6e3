//! Channel gain matrices and the stochastic models that generate them.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use super::{ModelError, SystemConfig};
use crate::scalar::{cast, Scalar};

/// Distribution of the per-link power gains.
///
/// The default is unit-mean exponential fading (Rayleigh power fading):
/// with the bundled 20 W / 1e-9 W profile it puts per-subcarrier spectral
/// efficiencies near 30 bits/s/Hz, i.e. sum rates in the tens of Mbps.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    /// i.i.d. Exponential(mean 1) power gains.
    UnitExp,
    /// Every gain equals the given constant. Useful for degenerate tests.
    Constant(f64),
    /// Distance-based path loss per user, with multiplicative unit-mean
    /// exponential fading: `h = d^-exponent * X`, one distance per user.
    PathLoss {
        distances_m: Vec<f64>,
        exponent: f64,
    },
}

impl Default for ChannelModel {
    fn default() -> Self {
        ChannelModel::UnitExp
    }
}

/// K x N matrix of nonnegative power gains, user-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix<T> {
    gains: Array2<T>,
}

impl<T: Scalar> ChannelMatrix<T> {
    pub fn new(gains: Array2<T>) -> Result<Self, ModelError> {
        for ((user, subcarrier), &g) in gains.indexed_iter() {
            if !g.is_finite() || g < T::zero() {
                return Err(ModelError::InvalidGain { user, subcarrier });
            }
        }
        Ok(Self { gains })
    }

    pub fn n_users(&self) -> usize {
        self.gains.nrows()
    }

    pub fn n_subcarriers(&self) -> usize {
        self.gains.ncols()
    }

    pub fn gain(&self, user: usize, subcarrier: usize) -> T {
        self.gains[[user, subcarrier]]
    }

    pub fn gains(&self) -> &Array2<T> {
        &self.gains
    }

    pub(crate) fn check_dims(&self, n_users: usize, n_subcarriers: usize) -> Result<(), ModelError> {
        if self.n_users() != n_users || self.n_subcarriers() != n_subcarriers {
            return Err(ModelError::DimensionMismatch {
                expected_rows: n_users,
                expected_cols: n_subcarriers,
                rows: self.n_users(),
                cols: self.n_subcarriers(),
            });
        }
        Ok(())
    }
}

/// Draw a K x N gain matrix. Deterministic for a fixed seed: entries are
/// produced row-major from a counter-seeded stream cipher RNG.
pub fn sample_channel<T: Scalar>(
    seed: u64,
    config: &SystemConfig<T>,
    model: &ChannelModel,
) -> Result<ChannelMatrix<T>, ModelError> {
    config.validate()?;
    let (k, n) = (config.n_users, config.n_subcarriers);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exp = Exp::new(1.0_f64).expect("unit rate is valid");

    let gains = match model {
        ChannelModel::UnitExp => {
            Array2::from_shape_fn((k, n), |_| cast::<T>(exp.sample(&mut rng)))
        }
        ChannelModel::Constant(value) => {
            if !value.is_finite() || *value < 0.0 {
                return Err(ModelError::InvalidConfig(format!(
                    "constant channel gain must be finite and >= 0, got {value}"
                )));
            }
            Array2::from_elem((k, n), cast::<T>(*value))
        }
        ChannelModel::PathLoss {
            distances_m,
            exponent,
        } => {
            if distances_m.len() != k {
                return Err(ModelError::InvalidConfig(format!(
                    "path-loss model needs one distance per user: got {} for {k} users",
                    distances_m.len()
                )));
            }
            if distances_m.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
                return Err(ModelError::InvalidConfig(
                    "path-loss distances must be finite and > 0".into(),
                ));
            }
            Array2::from_shape_fn((k, n), |(user, _)| {
                let loss = distances_m[user].powf(-exponent);
                cast::<T>(loss * exp.sample(&mut rng))
            })
        }
    };
    ChannelMatrix::new(gains)
}
