//! Solver core for 6D movable-antenna (6DMA) interference mitigation on a
//! cellular-connected UAV downlink.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure
//! computation: the hexagonal cell layout with interference coordination,
//! the line-of-sight channel model as a function of antenna positions and
//! panel rotation, the MMSE receive beamformer, and the block coordinate
//! descent optimizer that picks positions, rotation and the serving BS.
//!
//! IO, configuration files, Monte Carlo sweeps and the CLI live in the
//! `sixdma` companion crate.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod arrays;
pub mod beamforming;
pub mod channel;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod optimizer;
pub mod scenario;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use arrays::{fpa_positions, upa_init_positions};
pub use beamforming::{mmse_weights, objective_sinr, BeamformerResult};
pub use channel::{Apv, PhysParams, Point2, Point3, Rotation, WaveVector};
pub use grid::{CellLayout, HexCoord, OccupancyDraw};
pub use optimizer::{
    bcd_solve, select_bs, AuxiliaryVector, CandidateResult, Restrictions, SolveResult, SolverConfig, TraceEntry,
};
pub use scenario::Scenario;
