//! OFDMA subcarrier-and-power allocation for a UAV-mounted aerial base
//! station standing in for a failed terrestrial cell.
//!
//! The crate provides:
//!
//! - [`model`]: system configuration, stochastic channel matrices, SINR /
//!   Shannon-rate evaluation, and constraint checking;
//! - [`solver`]: three allocation strategies — alternating optimization,
//!   damped iterative water-filling, and a permutation-encoded genetic
//!   algorithm — over shared water-filling primitives;
//! - [`mc`]: a deterministic Monte Carlo campaign harness with active-trial
//!   averaging and CSV/JSON outputs;
//! - [`scenario`]: hex-grid network topology, user association policies,
//!   station failures, and rotating UAV coverage schedules.
//!
//! The numerical core is generic over the scalar type (any [`Scalar`],
//! i.e. `f32` or `f64`); the `*64` aliases below fix the main types to `f64`,
//! which is what the CLI and the bundled benchmarks use.

pub mod mc;
pub mod model;
pub mod scalar;
pub mod scenario;
mod seed;
pub mod solver;

pub use scalar::Scalar;
pub use seed::derive_seed;

/// `f64` aliases for the headline types.
pub type SystemConfig64 = model::SystemConfig<f64>;
pub type QosSpec64 = model::QosSpec<f64>;
pub type ChannelMatrix64 = model::ChannelMatrix<f64>;
pub type Allocation64 = model::Allocation<f64>;
pub type RateReport64 = model::RateReport<f64>;
pub type ConvergenceTrace64 = model::ConvergenceTrace<f64>;
pub type AoResult64 = solver::AoResult<f64>;
pub type DiwfParams64 = solver::DiwfParams<f64>;
pub type DiwfResult64 = solver::DiwfResult<f64>;
pub type GaParams64 = solver::GaParams<f64>;
pub type GaResult64 = solver::GaResult<f64>;
pub type AlgoSpec64 = mc::AlgoSpec<f64>;
