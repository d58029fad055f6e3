//! Allocation strategies: alternating optimization, damped iterative
//! water-filling, and a genetic algorithm, plus the shared water-filling
//! primitives they build on.

mod ao;
mod diwf;
mod error;
mod ga;
mod waterfill;

pub use ao::{
    ao_priority_schedule, ao_solve, greedy_assignment, AoResult, PriorityClass, PrioritySchedule,
    SlotResult, AO_REL_TOL,
};
pub use diwf::{
    diwf_solve, diwf_solve_matrix, greedy_subcarrier_matching, min_power_floor, DiwfParams,
    DiwfResult, RateFloor,
};
pub use error::SolverError;
pub use ga::{fitness, ga_solve, repair, Chromosome, GaParams, GaResult, PopulationStats};
pub use waterfill::{floored_waterfill, waterfill, BUDGET_RESIDUAL_TOL_WATTS};
