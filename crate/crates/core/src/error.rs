//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("r = {r} outside domain [{lo}, {hi}]")]
    OutOfDomain { r: f64, lo: f64, hi: f64 },

    #[error("warp factor phi = {phi} at r = {r} below guard {guard}")]
    PhiTooSmall { r: f64, phi: f64, guard: f64 },

    #[error("model carries no soliton data")]
    MissingSoliton,

    #[error("dimension n = {0} not supported here (need n >= {1})")]
    BadDimension(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0} must be strictly increasing")]
    NonMonotone(&'static str),

    #[error("integration diverged: {0}")]
    IntegrationDiverged(String),

    #[error("step control failed: {0}")]
    StepFailure(String),

    #[error("trajectory too short: stopped at x = {x_final}, need x <= {required}")]
    TrajectoryTooShort { x_final: f64, required: f64 },

    #[error("graph left the working domain at node {node}: rho = {rho}, allowed [{lo}, {hi}]")]
    FlowEscape {
        node: usize,
        rho: f64,
        lo: f64,
        hi: f64,
    },

    #[error("non-finite value produced during flow step at node {node}")]
    NumericalBlowup { node: usize },

    #[error("flow did not converge within {steps} steps; final oscillation {oscillation:.3e}")]
    NoConvergence { steps: u64, oscillation: f64 },

    #[error("volume {v} outside profile range [0, {v_max}]")]
    ProfileRange { v: f64, v_max: f64 },

    #[error("fiber grid too coarse: {nodes} nodes (need >= {min})")]
    GridTooCoarse { nodes: usize, min: usize },

    #[error("graph sampler exhausted {tries} rejection tries")]
    RejectionExhausted { tries: u32 },

    #[error("malformed model document: {0}")]
    BadModelDocument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
