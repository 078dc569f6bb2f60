//! Experiment harness for `sixdma-core`: scenario draws, the baseline
//! schemes, Monte Carlo sweeps with CSV and JSON output, a layout export and
//! a property self-test.

pub mod config;
pub mod error;
pub mod layout;
pub mod scheme;
pub mod seeds;
pub mod selftest;
pub mod solve;
pub mod sweep;
pub mod trial;

pub use config::{Axis, ExperimentConfig, PhysicalConfig, Preset, SweepPoint, SweepSpec};
pub use error::{HarnessError, Result};
pub use scheme::{SchemeId, SchemeKind};
pub use sweep::{run_sweep, Summary, SweepOutput};
pub use trial::{run_trial, TrialRecord};
