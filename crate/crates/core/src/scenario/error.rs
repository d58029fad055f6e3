use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error(
        "unsupported grid layout {n_clusters} clusters x {cells_per_cluster} cells: \
         only the 1- and 7-element hex patterns exist"
    )]
    UnsupportedLayout {
        n_clusters: usize,
        cells_per_cluster: usize,
    },

    #[error("cell radius must be positive, got {0}")]
    InvalidRadius(f64),

    #[error("unknown station id {0}")]
    UnknownStation(usize),

    #[error("unknown scenario preset '{0}'")]
    UnknownPreset(String),

    #[error("coverage queries need an association; run associate() first")]
    MissingAssociation,

    #[error("invalid scenario parameters: {0}")]
    InvalidParams(String),
}
