//! Domain types shared by every solver: system configuration, channel
//! matrices, allocations, rate evaluation, and constraint checking.
//!
//! All types are immutable values after construction and safe to share
//! across concurrent workers.

mod alloc;
mod channel;
mod config;
mod constraints;
mod error;
mod rate;
mod trace;

pub use alloc::Allocation;
pub use channel::{sample_channel, ChannelMatrix, ChannelModel};
pub use config::{QosSpec, SystemConfig, UserClass, FEASIBILITY_EPS_WATTS};
pub use constraints::{
    check_constraints, check_constraints_with_rates, ConstraintReport, ExclusivityCheck,
    PowerBudgetCheck, QosCheck,
};
pub use error::ModelError;
pub use rate::{bps_to_mbps, rate, sinr, sum_rate_one_to_one, RateReport};
pub use trace::ConvergenceTrace;
