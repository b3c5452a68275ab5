use thiserror::Error;

use crate::mesh::CellId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("invalid mesh configuration: {0}")]
    Config(String),
    #[error("cell {0:?} is not a leaf")]
    NotLeaf(CellId),
    #[error("cell {0:?} does not exist")]
    NoSuchCell(CellId),
    #[error("max level reached for cell {0:?}")]
    MaxLevelReached(CellId),
    #[error("cell {0:?} cannot be coarsened: {1}")]
    CannotCoarsen(CellId, &'static str),
    #[error("point {0:?} lies outside the domain")]
    OutsideDomain([f64; 2]),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReconError {
    #[error("degenerate geometry: {0}")]
    Geometry(&'static str),
    #[error("point {offset:?} outside cell of size {h}")]
    OutsideCell { offset: [f64; 2], h: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhysicsError {
    #[error("inadmissible state {state:?} at {location}")]
    Positivity { state: Vec<f64>, location: String },
    #[error("invalid boundary condition: {0}")]
    BoundaryConfig(String),
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Physics(#[from] PhysicsError),
    #[error("field state epoch {state} does not match mesh epoch {mesh}")]
    StaleState { state: u64, mesh: u64 },
    #[error("cells {0:?} and {1:?} are not face-adjacent")]
    NotAdjacent(CellId, CellId),
    #[error("invalid time step {0}")]
    BadTimeStep(f64),
    #[error("entropy production requires the stage caches of the step")]
    MissingStageCache,
    #[error("invalid adaptation thresholds S_ref = {s_ref}, S_coa = {s_coa}")]
    BadThresholds { s_ref: f64, s_coa: f64 },
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
