//! Coverage and latency accounting over an associated world.

use serde::{Deserialize, Serialize};

use super::schedule::UavSchedule;
use super::world::{ScenarioWorld, StationKind};
use super::ScenarioError;

/// Coverage figures for one cluster. Users served by an aerial station incur
/// the cluster's worst-case rotation wait; terrestrial service waits nothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterCoverage {
    pub cluster: usize,
    pub users: usize,
    pub covered: usize,
    pub uncovered: usize,
    pub covered_fraction: f64,
    pub mean_wait_secs: f64,
    pub max_wait_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub clusters: Vec<ClusterCoverage>,
    pub total_users: usize,
    pub covered_users: usize,
    pub uncovered_users: usize,
    pub failed_stations: Vec<usize>,
    /// Users served by an aerial station.
    pub offloaded_users: Vec<usize>,
}

/// Summarize coverage per cluster. Requires a stored association; pass the
/// UAV schedule to account rotation-induced waiting.
pub fn coverage_report(
    world: &ScenarioWorld,
    schedule: Option<&UavSchedule>,
) -> Result<CoverageReport, ScenarioError> {
    let association = world
        .association
        .as_ref()
        .ok_or(ScenarioError::MissingAssociation)?;

    let n_clusters = world.grid.clusters.len();
    let mut users_per = vec![0usize; n_clusters];
    let mut covered_per = vec![0usize; n_clusters];
    let mut wait_sum = vec![0.0f64; n_clusters];
    let mut wait_max = vec![0.0f64; n_clusters];
    let mut offloaded_users = Vec::new();

    for (idx, user) in world.users.iter().enumerate() {
        let cluster = world.grid.cluster_of_point(&user.position());
        users_per[cluster] += 1;
        let Some(station_id) = association.assigned[idx] else {
            continue;
        };
        covered_per[cluster] += 1;
        let station = world
            .station(station_id)
            .ok_or(ScenarioError::UnknownStation(station_id))?;
        let wait = match station.kind {
            StationKind::Tbs => 0.0,
            StationKind::Abs => {
                offloaded_users.push(user.id);
                schedule
                    .map(|s| s.worst_wait_secs[cluster])
                    .unwrap_or(0.0)
            }
        };
        wait_sum[cluster] += wait;
        wait_max[cluster] = wait_max[cluster].max(wait);
    }

    let clusters: Vec<ClusterCoverage> = (0..n_clusters)
        .map(|cluster| {
            let users = users_per[cluster];
            let covered = covered_per[cluster];
            ClusterCoverage {
                cluster,
                users,
                covered,
                uncovered: users - covered,
                covered_fraction: if users > 0 {
                    covered as f64 / users as f64
                } else {
                    1.0
                },
                mean_wait_secs: if covered > 0 {
                    wait_sum[cluster] / covered as f64
                } else {
                    0.0
                },
                max_wait_secs: wait_max[cluster],
            }
        })
        .collect();

    let total_users = world.users.len();
    let covered_users = covered_per.iter().sum();
    Ok(CoverageReport {
        clusters,
        total_users,
        covered_users,
        uncovered_users: total_users - covered_users,
        failed_stations: world.failed_stations(),
        offloaded_users,
    })
}
