//! System-level dimensions and budgets shared by every solver.

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::scalar::{cast, Scalar};

/// Tolerance applied to total-power feasibility comparisons, in watts.
/// Absorbs floating-point drift accumulated by iterative power updates.
pub const FEASIBILITY_EPS_WATTS: f64 = 1e-9;

/// Dimensions, bandwidth, noise, and power budget of one aerial cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig<T> {
    /// Number of OFDMA subcarriers available at the station.
    pub n_subcarriers: usize,
    /// Number of users served by the station.
    pub n_users: usize,
    /// Bandwidth of each subcarrier in Hz.
    pub bandwidth_hz: T,
    /// Noise power in watts.
    pub noise_power: T,
    /// Total transmit power budget in watts.
    pub power_budget: T,
    /// Iteration cap for the iterative solvers.
    pub max_iterations: usize,
    /// Default Monte Carlo trial count for campaign runs.
    pub mc_runs: usize,
}

impl<T: Scalar> SystemConfig<T> {
    pub fn new(
        n_subcarriers: usize,
        n_users: usize,
        bandwidth_hz: T,
        noise_power: T,
        power_budget: T,
        max_iterations: usize,
        mc_runs: usize,
    ) -> Result<Self, ModelError> {
        let config = Self {
            n_subcarriers,
            n_users,
            bandwidth_hz,
            noise_power,
            power_budget,
            max_iterations,
            mc_runs,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n_subcarriers == 0 {
            return Err(ModelError::InvalidConfig("n_subcarriers must be >= 1".into()));
        }
        if self.n_users == 0 {
            return Err(ModelError::InvalidConfig("n_users must be >= 1".into()));
        }
        if !(self.bandwidth_hz > T::zero()) || !self.bandwidth_hz.is_finite() {
            return Err(ModelError::InvalidConfig("bandwidth_hz must be > 0".into()));
        }
        if !(self.noise_power > T::zero()) || !self.noise_power.is_finite() {
            return Err(ModelError::InvalidConfig("noise_power must be > 0".into()));
        }
        if !(self.power_budget > T::zero()) || !self.power_budget.is_finite() {
            return Err(ModelError::InvalidConfig("power_budget must be > 0".into()));
        }
        if self.max_iterations == 0 {
            return Err(ModelError::InvalidConfig("max_iterations must be >= 1".into()));
        }
        Ok(())
    }

    /// Power-budget feasibility tolerance in the scalar type.
    pub fn feasibility_eps(&self) -> T {
        cast(FEASIBILITY_EPS_WATTS)
    }
}

impl<T: Scalar> Default for SystemConfig<T> {
    /// The bundled benchmark profile: 12 users on 12 subcarriers of 100 kHz,
    /// noise 1e-9 W, a 20 W budget, 100-iteration cap, 10,000-trial campaigns.
    fn default() -> Self {
        Self {
            n_subcarriers: 12,
            n_users: 12,
            bandwidth_hz: cast(1e5),
            noise_power: cast(1e-9),
            power_budget: cast(20.0),
            max_iterations: 100,
            mc_runs: 10_000,
        }
    }
}

/// Per-user minimum rate requirements in bits/s.
#[derive(Debug, Clone, PartialEq)]
pub struct QosSpec<T> {
    r_min_bps: Vec<T>,
}

impl<T: Scalar> QosSpec<T> {
    pub fn new(r_min_bps: Vec<T>) -> Result<Self, ModelError> {
        for (user, &r) in r_min_bps.iter().enumerate() {
            if !(r >= T::zero()) || !r.is_finite() {
                return Err(ModelError::NegativeRateFloor { user });
            }
        }
        Ok(Self { r_min_bps })
    }

    /// Same floor for every user.
    pub fn uniform(n_users: usize, r_min_bps: T) -> Result<Self, ModelError> {
        Self::new(vec![r_min_bps; n_users])
    }

    /// No rate requirements.
    pub fn none(n_users: usize) -> Self {
        Self {
            r_min_bps: vec![T::zero(); n_users],
        }
    }

    pub fn n_users(&self) -> usize {
        self.r_min_bps.len()
    }

    pub fn floor(&self, user: usize) -> T {
        self.r_min_bps[user]
    }

    pub fn floors(&self) -> &[T] {
        &self.r_min_bps
    }

    /// True when every floor is zero.
    pub fn is_trivial(&self) -> bool {
        self.r_min_bps.iter().all(|r| r.is_zero())
    }
}

/// Service class of a ground user. Responders get scheduling priority.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UserClass {
    Responder,
    Civilian,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_profile_is_valid() {
        let config = SystemConfig::<f64>::default();
        assert!(config.validate().is_ok());
        assert_eq!(config.n_subcarriers, 12);
        assert_eq!(config.n_users, 12);
        assert_eq!(config.bandwidth_hz, 1e5);
        assert_eq!(config.noise_power, 1e-9);
        assert_eq!(config.power_budget, 20.0);
        assert_eq!(config.max_iterations, 100);
        assert_eq!(config.mc_runs, 10_000);
    }

    #[test]
    fn rejects_degenerate_dimensions() {
        assert!(SystemConfig::new(0, 1, 1.0, 1.0, 1.0, 1, 1).is_err());
        assert!(SystemConfig::new(1, 0, 1.0, 1.0, 1.0, 1, 1).is_err());
        assert!(SystemConfig::new(1, 1, 0.0, 1.0, 1.0, 1, 1).is_err());
        assert!(SystemConfig::new(1, 1, 1.0, -1.0, 1.0, 1, 1).is_err());
        assert!(SystemConfig::new(1, 1, 1.0, 1.0, 0.0, 1, 1).is_err());
        assert!(SystemConfig::new(1, 1, 1.0, 1.0, 1.0, 0, 1).is_err());
    }

    #[test]
    fn qos_rejects_negative_floor() {
        assert!(QosSpec::new(vec![0.0, -1.0]).is_err());
        let qos = QosSpec::uniform(3, 5.0).unwrap();
        assert_eq!(qos.floor(2), 5.0);
        assert!(!qos.is_trivial());
        assert!(QosSpec::<f64>::none(3).is_trivial());
    }
}
