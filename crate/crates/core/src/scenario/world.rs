//! Stations, ground users, association policies, and failure handling.

use serde::{Deserialize, Serialize};

use crate::model::UserClass;

use super::grid::{CellGrid, Point};
use super::ScenarioError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StationKind {
    Tbs,
    Abs,
}

/// A serving site: terrestrial at a cell center, or aerial on a UAV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Station {
    pub id: usize,
    pub kind: StationKind,
    pub x: f64,
    pub y: f64,
    /// Height above ground, meters; zero for terrestrial stations.
    pub altitude_m: f64,
    pub tx_power_watts: f64,
    /// Maximum number of users the station can serve.
    pub capacity: usize,
    /// Horizontal coverage footprint radius, meters.
    pub coverage_radius_m: f64,
    pub operational: bool,
    /// Cell this station serves, when it is a cell site.
    pub cell: Option<usize>,
}

impl Station {
    pub fn position(&self) -> Point {
        Point {
            x: self.x,
            y: self.y,
        }
    }
}

/// How long a user can tolerate waiting for service.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatencyTolerance {
    Tight,
    Relaxed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundUser {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub priority: UserClass,
    pub latency: LatencyTolerance,
}

impl GroundUser {
    pub fn position(&self) -> Point {
        Point {
            x: self.x,
            y: self.y,
        }
    }
}

/// User-to-station mapping rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssociationPolicy {
    /// Closest station by 3D link distance.
    NearestDistance,
    /// Highest received SNR.
    MaxSinr,
    /// Tight-latency users prefer terrestrial stations; relaxed users prefer
    /// an aerial station when one covers them.
    PriorityLatency,
    /// Users prefer their best terrestrial station until it exceeds its load
    /// threshold, then overflow onto aerial stations.
    LoadThresholdOffload,
}

/// Radio parameters used by the association policies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssocParams {
    /// Path-loss exponent toward terrestrial stations.
    pub tbs_pathloss_exp: f64,
    /// Path-loss exponent toward aerial stations (line-of-sight, applied to
    /// the altitude-inclusive 3D distance).
    pub abs_pathloss_exp: f64,
    pub noise_power: f64,
    /// Fraction of capacity at which a loaded station starts deferring new
    /// users to aerial stations under [`AssociationPolicy::LoadThresholdOffload`].
    pub load_threshold: f64,
    /// Lower clamp on link distances, meters.
    pub min_distance_m: f64,
}

impl Default for AssocParams {
    fn default() -> Self {
        Self {
            tbs_pathloss_exp: 2.0,
            abs_pathloss_exp: 2.0,
            noise_power: 1e-9,
            load_threshold: 0.9,
            min_distance_m: 1.0,
        }
    }
}

impl AssocParams {
    /// Interference-free SNR of the user-station link under free-space path
    /// loss over the 3D distance.
    pub fn snr(&self, user: &GroundUser, station: &Station) -> f64 {
        let horizontal = user.position().distance(&station.position());
        let d = horizontal
            .hypot(station.altitude_m)
            .max(self.min_distance_m);
        let exp = match station.kind {
            StationKind::Tbs => self.tbs_pathloss_exp,
            StationKind::Abs => self.abs_pathloss_exp,
        };
        station.tx_power_watts * d.powf(-exp) / self.noise_power
    }

    fn link_distance(&self, user: &GroundUser, station: &Station) -> f64 {
        user.position()
            .distance(&station.position())
            .hypot(station.altitude_m)
            .max(self.min_distance_m)
    }
}

/// Result of running an association policy: `assigned[user_index]` is the
/// serving station id, or `None` for an uncovered user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Association {
    pub policy: AssociationPolicy,
    pub assigned: Vec<Option<usize>>,
}

impl Association {
    pub fn station_load(&self, station_id: usize) -> usize {
        self.assigned
            .iter()
            .filter(|s| **s == Some(station_id))
            .count()
    }

    pub fn uncovered(&self) -> usize {
        self.assigned.iter().filter(|s| s.is_none()).count()
    }
}

fn in_range(user: &GroundUser, station: &Station) -> bool {
    user.position().distance(&station.position()) <= station.coverage_radius_m
}

/// Station ids ordered by the policy for one user, best first. Ties break
/// toward the lower station id.
fn preference_list(
    user: &GroundUser,
    stations: &[Station],
    policy: AssociationPolicy,
    params: &AssocParams,
) -> Vec<usize> {
    let reachable: Vec<&Station> = stations
        .iter()
        .filter(|s| s.operational && in_range(user, s))
        .collect();

    // Sort key: (tier, metric, id); lower is better.
    let mut keyed: Vec<(u8, f64, usize)> = reachable
        .iter()
        .map(|s| {
            let snr = params.snr(user, s);
            let (tier, metric) = match policy {
                AssociationPolicy::NearestDistance => (0, params.link_distance(user, s)),
                AssociationPolicy::MaxSinr => (0, -snr),
                AssociationPolicy::PriorityLatency => {
                    let preferred = match user.latency {
                        LatencyTolerance::Tight => s.kind == StationKind::Tbs,
                        LatencyTolerance::Relaxed => s.kind == StationKind::Abs,
                    };
                    (u8::from(!preferred), -snr)
                }
                AssociationPolicy::LoadThresholdOffload => {
                    (u8::from(s.kind == StationKind::Abs), -snr)
                }
            };
            (tier, metric, s.id)
        })
        .collect();
    keyed.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.partial_cmp(&b.1).expect("metrics are finite"))
            .then(a.2.cmp(&b.2))
    });
    keyed.into_iter().map(|(_, _, id)| id).collect()
}

/// Number of users a station accepts under the policy. Terrestrial stations
/// under the load-threshold policy stop accepting once their load exceeds
/// `threshold * capacity`; every other case uses the hard capacity.
fn admission_quota(station: &Station, policy: AssociationPolicy, params: &AssocParams) -> usize {
    match (policy, station.kind) {
        (AssociationPolicy::LoadThresholdOffload, StationKind::Tbs) => {
            let threshold = (params.load_threshold * station.capacity as f64).floor() as usize;
            station.capacity.min(threshold + 1)
        }
        _ => station.capacity,
    }
}

/// Deferred-acceptance association: users apply down their preference lists;
/// an over-subscribed station keeps its highest-SNR users and releases the
/// rest to their next choice. Users with exhausted lists stay uncovered.
pub fn associate(
    users: &[GroundUser],
    stations: &[Station],
    policy: AssociationPolicy,
    params: &AssocParams,
) -> Association {
    let prefs: Vec<Vec<usize>> = users
        .iter()
        .map(|u| preference_list(u, stations, policy, params))
        .collect();
    let station_by_id: std::collections::HashMap<usize, &Station> =
        stations.iter().map(|s| (s.id, s)).collect();

    let mut next_choice = vec![0usize; users.len()];
    let mut assigned: Vec<Option<usize>> = vec![None; users.len()];
    let mut holders: std::collections::HashMap<usize, Vec<usize>> = Default::default();
    let mut pending: std::collections::VecDeque<usize> = (0..users.len()).collect();

    while let Some(user) = pending.pop_front() {
        let Some(&station_id) = prefs[user].get(next_choice[user]) else {
            continue; // exhausted: uncovered
        };
        next_choice[user] += 1;
        let station = station_by_id[&station_id];
        let quota = admission_quota(station, policy, params);
        if quota == 0 {
            pending.push_back(user);
            continue;
        }

        let list = holders.entry(station_id).or_default();
        list.push(user);
        assigned[user] = Some(station_id);
        if list.len() > quota {
            // Highest-SNR users keep their slots.
            list.sort_by(|&a, &b| {
                let sa = params.snr(&users[a], station);
                let sb = params.snr(&users[b], station);
                sb.partial_cmp(&sa).expect("snr is finite").then(a.cmp(&b))
            });
            let evicted = list.pop().expect("list is non-empty");
            assigned[evicted] = None;
            pending.push_back(evicted);
        }
    }

    Association { policy, assigned }
}

/// Full network state: topology, stations, users, and the latest
/// association. A value type; operations produce or mutate it explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioWorld {
    pub grid: CellGrid,
    pub stations: Vec<Station>,
    pub users: Vec<GroundUser>,
    pub association: Option<Association>,
}

impl ScenarioWorld {
    /// Mark stations as failed. Any stored association is cleared, since it
    /// may reference the failed stations.
    pub fn apply_failure(&mut self, failed_ids: &[usize]) -> Result<(), ScenarioError> {
        for &id in failed_ids {
            let station = self
                .stations
                .iter_mut()
                .find(|s| s.id == id)
                .ok_or(ScenarioError::UnknownStation(id))?;
            station.operational = false;
        }
        self.association = None;
        Ok(())
    }

    /// Run an association policy and store the result.
    pub fn associate(&mut self, policy: AssociationPolicy, params: &AssocParams) {
        self.association = Some(associate(&self.users, &self.stations, policy, params));
    }

    pub fn failed_stations(&self) -> Vec<usize> {
        self.stations
            .iter()
            .filter(|s| !s.operational)
            .map(|s| s.id)
            .collect()
    }

    pub fn station(&self, id: usize) -> Option<&Station> {
        self.stations.iter().find(|s| s.id == id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::grid::build_grid;

    fn tbs(id: usize, x: f64, capacity: usize) -> Station {
        Station {
            id,
            kind: StationKind::Tbs,
            x,
            y: 0.0,
            altitude_m: 0.0,
            tx_power_watts: 40.0,
            capacity,
            coverage_radius_m: 1e4,
            operational: true,
            cell: None,
        }
    }

    fn abs(id: usize, x: f64, capacity: usize) -> Station {
        Station {
            id,
            kind: StationKind::Abs,
            x,
            y: 0.0,
            altitude_m: 100.0,
            tx_power_watts: 20.0,
            capacity,
            coverage_radius_m: 1e4,
            operational: true,
            cell: None,
        }
    }

    fn user(id: usize, x: f64) -> GroundUser {
        GroundUser {
            id,
            x,
            y: 0.0,
            priority: UserClass::Civilian,
            latency: LatencyTolerance::Relaxed,
        }
    }

    #[test]
    fn lone_station_takes_all_in_range_users() {
        let stations = vec![tbs(0, 0.0, 10)];
        let users: Vec<GroundUser> = (0..5).map(|i| user(i, i as f64 * 10.0)).collect();
        let assoc = associate(
            &users,
            &stations,
            AssociationPolicy::MaxSinr,
            &AssocParams::default(),
        );
        assert!(assoc.assigned.iter().all(|s| *s == Some(0)));
    }

    #[test]
    fn nearest_distance_ties_go_to_lower_station_id() {
        let stations = vec![tbs(0, -50.0, 10), tbs(1, 50.0, 10)];
        let users = vec![user(0, 0.0)];
        let assoc = associate(
            &users,
            &stations,
            AssociationPolicy::NearestDistance,
            &AssocParams::default(),
        );
        assert_eq!(assoc.assigned[0], Some(0));
    }

    #[test]
    fn load_threshold_fills_tbs_to_capacity_then_offloads() {
        // Capacity 10, threshold 0.9: the 10th user still lands on the
        // terrestrial station (load 9 has not exceeded 9), the rest offload.
        let stations = vec![tbs(0, 0.0, 10), abs(1, 0.0, 20)];
        let users: Vec<GroundUser> = (0..15).map(|i| user(i, 1.0 + i as f64)).collect();
        let assoc = associate(
            &users,
            &stations,
            AssociationPolicy::LoadThresholdOffload,
            &AssocParams::default(),
        );
        assert_eq!(assoc.station_load(0), 10);
        assert_eq!(assoc.station_load(1), 5);
        assert_eq!(assoc.uncovered(), 0);
    }

    #[test]
    fn priority_latency_routes_by_tolerance() {
        let stations = vec![tbs(0, 0.0, 10), abs(1, 0.0, 10)];
        let mut tight = user(0, 5.0);
        tight.latency = LatencyTolerance::Tight;
        let relaxed = user(1, 5.0);
        let assoc = associate(
            &[tight, relaxed],
            &stations,
            AssociationPolicy::PriorityLatency,
            &AssocParams::default(),
        );
        assert_eq!(assoc.assigned[0], Some(0), "tight-latency user on TBS");
        assert_eq!(assoc.assigned[1], Some(1), "relaxed user on ABS");
    }

    #[test]
    fn capacity_keeps_highest_snr_users() {
        let stations = vec![tbs(0, 0.0, 2)];
        // Users at increasing distance; only the two closest keep slots.
        let users: Vec<GroundUser> = (0..4).map(|i| user(i, 10.0 + 100.0 * i as f64)).collect();
        let assoc = associate(
            &users,
            &stations,
            AssociationPolicy::MaxSinr,
            &AssocParams::default(),
        );
        assert_eq!(assoc.assigned[0], Some(0));
        assert_eq!(assoc.assigned[1], Some(0));
        assert_eq!(assoc.assigned[2], None);
        assert_eq!(assoc.assigned[3], None);
        assert_eq!(assoc.uncovered(), 2);
    }

    #[test]
    fn max_sinr_is_invariant_under_uniform_power_scaling() {
        let mut stations = vec![tbs(0, -200.0, 3), tbs(1, 150.0, 3), abs(2, 0.0, 3)];
        let users: Vec<GroundUser> = (0..6).map(|i| user(i, -300.0 + 120.0 * i as f64)).collect();
        let params = AssocParams::default();
        let before = associate(&users, &stations, AssociationPolicy::MaxSinr, &params);
        for s in &mut stations {
            s.tx_power_watts *= 7.5;
        }
        let after = associate(&users, &stations, AssociationPolicy::MaxSinr, &params);
        assert_eq!(before.assigned, after.assigned);
    }

    #[test]
    fn failure_clears_association_and_rejects_unknown_ids() {
        let grid = build_grid(1, 1, 500.0).unwrap();
        let mut world = ScenarioWorld {
            grid,
            stations: vec![tbs(0, 0.0, 10)],
            users: vec![user(0, 10.0)],
            association: None,
        };
        world.associate(AssociationPolicy::MaxSinr, &AssocParams::default());
        assert!(world.association.is_some());
        assert_eq!(
            world.apply_failure(&[9]),
            Err(ScenarioError::UnknownStation(9))
        );
        world.apply_failure(&[0]).unwrap();
        assert!(world.association.is_none());
        assert_eq!(world.failed_stations(), vec![0]);

        // Re-association never maps a user to a failed station.
        world.associate(AssociationPolicy::MaxSinr, &AssocParams::default());
        let assoc = world.association.as_ref().unwrap();
        assert_eq!(assoc.assigned[0], None);
    }

    #[test]
    fn world_serializes_to_json_and_back() {
        let grid = build_grid(1, 7, 500.0).unwrap();
        let mut world = ScenarioWorld {
            grid,
            stations: vec![tbs(0, 0.0, 4), abs(1, 100.0, 4)],
            users: vec![user(0, 10.0), user(1, 50.0)],
            association: None,
        };
        world.associate(AssociationPolicy::MaxSinr, &AssocParams::default());
        let text = serde_json::to_string(&world).unwrap();
        let back: ScenarioWorld = serde_json::from_str(&text).unwrap();
        assert_eq!(world, back);
    }
}
