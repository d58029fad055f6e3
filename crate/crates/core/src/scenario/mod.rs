//! Network-level scenario layer: hex-grid topology, stations and users,
//! association policies, failures, rotating UAV coverage, and the three
//! bundled presets. Geometry and reporting run in `f64`.

mod error;
mod grid;
mod preset;
mod report;
mod schedule;
mod world;

pub use error::ScenarioError;
pub use grid::{build_grid, Cell, CellGrid, Cluster, Point};
pub use preset::{build_world, run_preset, Preset, PresetOutcome, PresetParams};
pub use report::{coverage_report, ClusterCoverage, CoverageReport};
pub use schedule::{uav_rotation, PhaseAssignment, UavSchedule};
pub use world::{
    associate, AssocParams, Association, AssociationPolicy, GroundUser, LatencyTolerance,
    ScenarioWorld, Station, StationKind,
};
