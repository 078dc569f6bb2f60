use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not Hermitian positive definite (pivot {pivot} = {value})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("BS index {index} out of range for a layout of {len} BSs")]
    Index { index: usize, len: usize },

    #[error("degenerate geometry: UAV and BS positions coincide")]
    DegenerateGeometry,

    #[error("beamforming vector is zero")]
    ZeroBeamformer,

    #[error("occupancy sampling failed after {attempts} attempts (J = {occupied}, e = {icic_tiers}, M = {bs_count})")]
    Sampling {
        attempts: usize,
        occupied: usize,
        icic_tiers: u32,
        bs_count: usize,
    },

    #[error("no feasible auxiliary point: the antennas are too crowded")]
    AuxInfeasible,

    #[error("no feasible antenna placement was reached for BS {bs}")]
    NoFeasibleDesign { bs: usize },

    #[error("the set of available BSs is empty")]
    NoCandidates,

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}
