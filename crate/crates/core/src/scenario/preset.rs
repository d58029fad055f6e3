//! Named end-to-end scenarios: a single failed cell site, a whole-cluster
//! outage served by a rotating UAV fleet, and event-driven offloading.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::UserClass;

use super::grid::{build_grid, Point};
use super::report::{coverage_report, CoverageReport};
use super::schedule::{uav_rotation, UavSchedule};
use super::world::{
    AssocParams, AssociationPolicy, GroundUser, LatencyTolerance, ScenarioWorld, Station,
    StationKind,
};
use super::ScenarioError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// One failed cell site, backfilled by a hovering aerial station.
    SingleFailure,
    /// Every site in one cluster down; a UAV fleet rotates coverage.
    ClusterOutage,
    /// A crowded event cell offloads its overflow onto an aerial station.
    EventOffload,
}

impl Preset {
    pub const ALL: [Preset; 3] = [
        Preset::SingleFailure,
        Preset::ClusterOutage,
        Preset::EventOffload,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::SingleFailure => "scenario1-single-failure",
            Preset::ClusterOutage => "scenario2-cluster-outage",
            Preset::EventOffload => "scenario3-event-offload",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, ScenarioError> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| ScenarioError::UnknownPreset(name.to_string()))
    }
}

/// Sizing and radio defaults for the preset worlds. None of these values are
/// dictated by the allocation problem; they are documented, overridable
/// deployment choices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetParams {
    pub seed: u64,
    pub n_uavs: usize,
    pub cell_radius_m: f64,
    pub users_per_cell: usize,
    pub tbs_power_watts: f64,
    pub abs_power_watts: f64,
    pub tbs_capacity: usize,
    pub abs_capacity: usize,
    pub abs_altitude_m: f64,
    pub abs_coverage_radius_m: f64,
    pub dwell_secs: f64,
    pub load_threshold: f64,
    /// Extra users dropped on the event cell in the offload scenario.
    pub event_extra_users: usize,
}

impl Default for PresetParams {
    fn default() -> Self {
        Self {
            seed: 1,
            n_uavs: 3,
            cell_radius_m: 500.0,
            users_per_cell: 10,
            tbs_power_watts: 40.0,
            abs_power_watts: 20.0,
            tbs_capacity: 25,
            abs_capacity: 12,
            abs_altitude_m: 100.0,
            abs_coverage_radius_m: 1500.0,
            dwell_secs: 60.0,
            load_threshold: 0.9,
            event_extra_users: 30,
        }
    }
}

/// Everything a preset run produces.
#[derive(Debug, Clone)]
pub struct PresetOutcome {
    pub world: ScenarioWorld,
    pub schedule: Option<UavSchedule>,
    pub report: CoverageReport,
}

fn drop_users_in_cell(
    rng: &mut ChaCha8Rng,
    users: &mut Vec<GroundUser>,
    center: &Point,
    radius: f64,
    count: usize,
) {
    for _ in 0..count {
        let r = radius * rng.random::<f64>().sqrt();
        let theta = std::f64::consts::TAU * rng.random::<f64>();
        users.push(GroundUser {
            id: users.len(),
            x: center.x + r * theta.cos(),
            y: center.y + r * theta.sin(),
            priority: UserClass::Civilian,
            latency: LatencyTolerance::Relaxed,
        });
    }
}

/// Build the 7x7 world: one terrestrial station per cell and users dropped
/// uniformly in each cell disc from the preset seed.
pub fn build_world(params: &PresetParams) -> Result<ScenarioWorld, ScenarioError> {
    let grid = build_grid(7, 7, params.cell_radius_m)?;
    let stations: Vec<Station> = grid
        .cells
        .iter()
        .map(|cell| Station {
            id: cell.id,
            kind: StationKind::Tbs,
            x: cell.center.x,
            y: cell.center.y,
            altitude_m: 0.0,
            tx_power_watts: params.tbs_power_watts,
            capacity: params.tbs_capacity,
            coverage_radius_m: params.cell_radius_m,
            operational: true,
            cell: Some(cell.id),
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut users = Vec::with_capacity(grid.cells.len() * params.users_per_cell);
    for cell in &grid.cells {
        drop_users_in_cell(
            &mut rng,
            &mut users,
            &cell.center,
            cell.radius_m,
            params.users_per_cell,
        );
    }

    Ok(ScenarioWorld {
        grid,
        stations,
        users,
        association: None,
    })
}

fn abs_station(id: usize, at: Point, params: &PresetParams) -> Station {
    Station {
        id,
        kind: StationKind::Abs,
        x: at.x,
        y: at.y,
        altitude_m: params.abs_altitude_m,
        tx_power_watts: params.abs_power_watts,
        capacity: params.abs_capacity,
        coverage_radius_m: params.abs_coverage_radius_m,
        operational: true,
        cell: None,
    }
}

fn assoc_params(params: &PresetParams) -> AssocParams {
    AssocParams {
        load_threshold: params.load_threshold,
        ..AssocParams::default()
    }
}

/// Run a named preset end to end: build the world, apply its failures,
/// deploy aerial stations, associate users, and report coverage.
pub fn run_preset(preset: Preset, params: &PresetParams) -> Result<PresetOutcome, ScenarioError> {
    if params.n_uavs == 0 {
        return Err(ScenarioError::InvalidParams("n_uavs must be >= 1".into()));
    }
    let mut world = build_world(params)?;
    let radio = assoc_params(params);

    match preset {
        Preset::SingleFailure => {
            let failed_cell = 0usize;
            world.apply_failure(&[failed_cell])?;
            let site = world.grid.cells[failed_cell].center;
            let abs_id = world.grid.cells.len();
            world.stations.push(abs_station(abs_id, site, params));
            world.associate(AssociationPolicy::MaxSinr, &radio);
            let report = coverage_report(&world, None)?;
            Ok(PresetOutcome {
                world,
                schedule: None,
                report,
            })
        }
        Preset::ClusterOutage => {
            let failed: Vec<usize> = world.grid.clusters[0].cells.clone();
            world.apply_failure(&failed)?;
            let schedule = uav_rotation(params.n_uavs, &world.grid, params.dwell_secs);

            // Snapshot the phase in which the outage cluster has a UAV
            // overhead: each scheduled UAV hovers over its cluster's center.
            let phase = schedule
                .phases
                .iter()
                .find(|phase| phase.iter().any(|a| a.cluster == 0))
                .expect("every cluster appears in some phase");
            let base_id = world.grid.cells.len();
            for assignment in phase {
                let at = world.grid.clusters[assignment.cluster].center;
                world
                    .stations
                    .push(abs_station(base_id + assignment.uav, at, params));
            }
            world.associate(AssociationPolicy::MaxSinr, &radio);
            let report = coverage_report(&world, Some(&schedule))?;
            Ok(PresetOutcome {
                world,
                schedule: Some(schedule),
                report,
            })
        }
        Preset::EventOffload => {
            let event_cell = 0usize;
            let center = world.grid.cells[event_cell].center;
            // The crowd concentrates at the venue, deep inside the cell where
            // no neighboring site reaches; overflow must ride the ABS.
            let crowd_radius = world.grid.cells[event_cell].radius_m * 0.3;
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(1));
            let mut users = std::mem::take(&mut world.users);
            drop_users_in_cell(
                &mut rng,
                &mut users,
                &center,
                crowd_radius,
                params.event_extra_users,
            );
            world.users = users;
            let abs_id = world.grid.cells.len();
            world.stations.push(abs_station(abs_id, center, params));
            world.associate(AssociationPolicy::LoadThresholdOffload, &radio);
            let report = coverage_report(&world, None)?;
            Ok(PresetOutcome {
                world,
                schedule: None,
                report,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_names_round_trip() {
        for preset in Preset::ALL {
            assert_eq!(Preset::from_name(preset.name()).unwrap(), preset);
        }
        assert!(matches!(
            Preset::from_name("scenario9-nope"),
            Err(ScenarioError::UnknownPreset(_))
        ));
    }

    #[test]
    fn worlds_are_deterministic_per_seed() {
        let params = PresetParams::default();
        let a = build_world(&params).unwrap();
        let b = build_world(&params).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.users.len(), 49 * params.users_per_cell);
        assert_eq!(a.stations.len(), 49);
    }

    #[test]
    fn single_failure_offloads_the_dead_cell() {
        let outcome = run_preset(Preset::SingleFailure, &PresetParams::default()).unwrap();
        assert_eq!(outcome.report.failed_stations, vec![0]);
        assert!(
            !outcome.report.offloaded_users.is_empty(),
            "stranded users should land on the aerial station"
        );
        assert!(outcome.schedule.is_none());
    }

    #[test]
    fn cluster_outage_reports_rotation_waits() {
        let outcome = run_preset(Preset::ClusterOutage, &PresetParams::default()).unwrap();
        assert_eq!(outcome.report.failed_stations.len(), 7);
        let schedule = outcome.schedule.as_ref().unwrap();
        assert_eq!(schedule.n_uavs, 3);
        // The outage cluster's aerial users inherit its worst-case wait.
        let affected = &outcome.report.clusters[0];
        assert!(affected.max_wait_secs > 0.0);
        assert_eq!(affected.max_wait_secs, schedule.worst_wait_secs[0]);
    }

    #[test]
    fn event_offload_fills_tbs_to_its_trigger_point() {
        let params = PresetParams::default();
        let outcome = run_preset(Preset::EventOffload, &params).unwrap();
        let assoc = outcome.world.association.as_ref().unwrap();
        let abs_id = outcome.world.grid.cells.len();
        let tbs_load = assoc.station_load(0);
        let abs_load = assoc.station_load(abs_id);
        let quota = params
            .tbs_capacity
            .min((params.load_threshold * params.tbs_capacity as f64).floor() as usize + 1);
        assert_eq!(tbs_load, quota, "event cell site fills to its offload trigger");
        assert!(abs_load > 0, "overflow users should ride the aerial station");
    }
}
