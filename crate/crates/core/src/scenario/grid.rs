//! Hexagonal cell layout: flower-pattern clusters of seven cells, and a
//! flower of seven clusters for the full deployment region.

use serde::{Deserialize, Serialize};

use super::ScenarioError;

/// Ground-plane position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// One hexagonal cell with a base station site at its center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub id: usize,
    pub cluster: usize,
    pub center: Point,
    pub radius_m: f64,
}

/// A flower of cells sharing one coverage neighborhood.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub id: usize,
    pub center: Point,
    /// Ids of the member cells, center cell first.
    pub cells: Vec<usize>,
}

/// The deployment region: clusters of hexagonal cells with deterministic
/// coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellGrid {
    pub cells: Vec<Cell>,
    pub clusters: Vec<Cluster>,
    pub cell_radius_m: f64,
}

/// Pointy-top axial coordinates to cartesian, scaled so adjacent cell
/// centers sit sqrt(3) * radius apart.
fn axial_to_point(q: i32, r: i32, radius: f64) -> Point {
    Point {
        x: 3f64.sqrt() * radius * (q as f64 + r as f64 / 2.0),
        y: 1.5 * radius * r as f64,
    }
}

/// The six axial unit directions, used both for the cells of a cluster and
/// (scaled by the reuse-7 offset) for the surrounding clusters.
const NEIGHBORS: [(i32, i32); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

/// Axial offsets of the six clusters surrounding the center in a reuse-7
/// tiling: the rotations of (2, 1), all at distance sqrt(21) * radius.
const CLUSTER_OFFSETS: [(i32, i32); 6] = [(2, 1), (-1, 3), (-3, 2), (-2, -1), (1, -3), (3, -2)];

/// Build the hex grid. Supported layouts are the 1- and 7-element flower
/// patterns on both levels; the bundled deployment is 7 clusters x 7 cells.
pub fn build_grid(
    n_clusters: usize,
    cells_per_cluster: usize,
    cell_radius_m: f64,
) -> Result<CellGrid, ScenarioError> {
    if !matches!(n_clusters, 1 | 7) || !matches!(cells_per_cluster, 1 | 7) {
        return Err(ScenarioError::UnsupportedLayout {
            n_clusters,
            cells_per_cluster,
        });
    }
    if !(cell_radius_m > 0.0) || !cell_radius_m.is_finite() {
        return Err(ScenarioError::InvalidRadius(cell_radius_m));
    }

    let cluster_anchors: Vec<(i32, i32)> = std::iter::once((0, 0))
        .chain(CLUSTER_OFFSETS.iter().copied())
        .take(n_clusters)
        .collect();

    let mut cells = Vec::new();
    let mut clusters = Vec::new();
    for (cluster_id, &(cq, cr)) in cluster_anchors.iter().enumerate() {
        let mut member_ids = Vec::with_capacity(cells_per_cluster);
        let cell_anchors: Vec<(i32, i32)> = std::iter::once((cq, cr))
            .chain(NEIGHBORS.iter().map(|&(dq, dr)| (cq + dq, cr + dr)))
            .take(cells_per_cluster)
            .collect();
        for (q, r) in cell_anchors {
            let id = cells.len();
            member_ids.push(id);
            cells.push(Cell {
                id,
                cluster: cluster_id,
                center: axial_to_point(q, r, cell_radius_m),
                radius_m: cell_radius_m,
            });
        }
        clusters.push(Cluster {
            id: cluster_id,
            center: axial_to_point(cq, cr, cell_radius_m),
            cells: member_ids,
        });
    }

    Ok(CellGrid {
        cells,
        clusters,
        cell_radius_m,
    })
}

impl CellGrid {
    /// Cluster owning the cell whose center is nearest to the point.
    /// Ties resolve to the lowest cell id.
    pub fn cluster_of_point(&self, p: &Point) -> usize {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for cell in &self.cells {
            let d = cell.center.distance(p);
            if d < best_d {
                best_d = d;
                best = cell.id;
            }
        }
        self.cells[best].cluster
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_layout_has_49_distinct_cells() {
        let grid = build_grid(7, 7, 500.0).unwrap();
        assert_eq!(grid.cells.len(), 49);
        assert_eq!(grid.clusters.len(), 7);
        for a in &grid.cells {
            for b in &grid.cells {
                if a.id != b.id {
                    assert!(
                        a.center.distance(&b.center) > 1.0,
                        "cells {} and {} overlap",
                        a.id,
                        b.id
                    );
                }
            }
        }
    }

    #[test]
    fn single_cell_sits_at_origin() {
        let grid = build_grid(1, 1, 250.0).unwrap();
        assert_eq!(grid.cells.len(), 1);
        assert_eq!(grid.cells[0].center, Point { x: 0.0, y: 0.0 });
    }

    #[test]
    fn cluster_neighbors_sit_sqrt3_radii_out() {
        let r = 400.0;
        let grid = build_grid(1, 7, r).unwrap();
        assert_eq!(grid.cells.len(), 7);
        let origin = Point { x: 0.0, y: 0.0 };
        for cell in &grid.cells[1..] {
            let d = cell.center.distance(&origin);
            assert!(
                (d - 3f64.sqrt() * r).abs() < 1e-9,
                "neighbor at {d}, expected {}",
                3f64.sqrt() * r
            );
        }
    }

    #[test]
    fn rejects_unsupported_layouts_and_radius() {
        assert!(build_grid(3, 7, 500.0).is_err());
        assert!(build_grid(7, 5, 500.0).is_err());
        assert!(build_grid(7, 7, 0.0).is_err());
    }

    #[test]
    fn cluster_centers_form_reuse7_ring() {
        let r = 500.0;
        let grid = build_grid(7, 7, r).unwrap();
        let origin = Point { x: 0.0, y: 0.0 };
        for cluster in &grid.clusters[1..] {
            let d = cluster.center.distance(&origin);
            assert!((d - 21f64.sqrt() * r).abs() < 1e-6);
        }
    }

    #[test]
    fn points_resolve_to_their_cluster() {
        let grid = build_grid(7, 7, 500.0).unwrap();
        for cell in &grid.cells {
            assert_eq!(grid.cluster_of_point(&cell.center), cell.cluster);
        }
    }
}
