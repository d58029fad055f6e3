//! Rotating UAV coverage schedules.
//!
//! The disc is split into three equal 120-degree sectors; clusters are
//! ordered sector by sector (the angle-free center cluster joins the end of
//! the ring) and the UAV fleet sweeps that ring round-robin, `n_uavs`
//! clusters per phase. A full rotation is the shortest cycle after which
//! every cluster has received the same share of coverage, so every UAV is
//! assigned every phase and every cluster is visited at least once.

use serde::{Deserialize, Serialize};

use super::grid::CellGrid;

/// One UAV covering one cluster during one phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseAssignment {
    pub uav: usize,
    pub cluster: usize,
}

/// The full rotation plan plus its coverage accounting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavSchedule {
    pub n_uavs: usize,
    pub dwell_secs: f64,
    /// Cluster ids per 120-degree sector; the center cluster is in no sector.
    pub sectors: Vec<Vec<usize>>,
    /// Sector-ordered cluster ring the fleet sweeps.
    pub ring: Vec<usize>,
    /// Assignments per phase; every phase uses all UAVs.
    pub phases: Vec<Vec<PhaseAssignment>>,
    /// Fraction of phases each cluster is covered, indexed by cluster id.
    pub duty_cycle: Vec<f64>,
    /// `(total phases - covered phases) * dwell` per cluster, seconds.
    pub worst_wait_secs: Vec<f64>,
}

impl UavSchedule {
    pub fn total_phases(&self) -> usize {
        self.phases.len()
    }

    /// Phases in which the cluster has at least one UAV overhead.
    pub fn covered_phases(&self, cluster: usize) -> usize {
        self.phases
            .iter()
            .filter(|phase| phase.iter().any(|a| a.cluster == cluster))
            .count()
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Build the rotation: clusters are bucketed into three sectors by center
/// angle, ordered into a ring (center cluster last), and covered round-robin
/// by `n_uavs` UAVs per phase over `lcm(n_clusters, n_uavs) / n_uavs` phases.
pub fn uav_rotation(n_uavs: usize, grid: &CellGrid, dwell_secs: f64) -> UavSchedule {
    assert!(n_uavs >= 1, "at least one UAV is required");
    let n_clusters = grid.clusters.len();

    let sector_width = std::f64::consts::TAU / 3.0;
    let mut sectors: Vec<Vec<usize>> = vec![Vec::new(); 3];
    let mut center_clusters = Vec::new();
    for cluster in &grid.clusters {
        let radius = cluster.center.x.hypot(cluster.center.y);
        if radius < 1e-9 {
            center_clusters.push(cluster.id);
            continue;
        }
        let mut angle = cluster.center.y.atan2(cluster.center.x);
        if angle < 0.0 {
            angle += std::f64::consts::TAU;
        }
        let sector = ((angle / sector_width) as usize).min(2);
        sectors[sector].push(cluster.id);
    }
    for sector in &mut sectors {
        sector.sort_unstable();
    }

    let mut ring: Vec<usize> = sectors.iter().flatten().copied().collect();
    ring.extend(&center_clusters);

    let slots = n_clusters / gcd(n_clusters, n_uavs) * n_uavs;
    let total_phases = slots / n_uavs;
    let mut phases = Vec::with_capacity(total_phases);
    for phase in 0..total_phases {
        phases.push(
            (0..n_uavs)
                .map(|uav| PhaseAssignment {
                    uav,
                    cluster: ring[(phase * n_uavs + uav) % n_clusters],
                })
                .collect(),
        );
    }

    let schedule = UavSchedule {
        n_uavs,
        dwell_secs,
        sectors,
        ring,
        phases,
        duty_cycle: Vec::new(),
        worst_wait_secs: Vec::new(),
    };
    let duty_cycle: Vec<f64> = (0..n_clusters)
        .map(|c| schedule.covered_phases(c) as f64 / total_phases as f64)
        .collect();
    let worst_wait_secs: Vec<f64> = (0..n_clusters)
        .map(|c| (total_phases - schedule.covered_phases(c)) as f64 * dwell_secs)
        .collect();

    UavSchedule {
        duty_cycle,
        worst_wait_secs,
        ..schedule
    }
}
