//! Experiment configuration: the sweep definition, solver knobs and the
//! physical scenario, as one JSON document.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sixdma_core::channel::dbm_to_watts;
use sixdma_core::grid::{build_hex_layout, CellLayout};
use sixdma_core::{PhysParams, SolverConfig};

use crate::error::{HarnessError, Result};
use crate::scheme::SchemeId;

/// Physical scenario shared by every trial of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicalConfig {
    /// Carrier wavelength, meters.
    pub wavelength: f64,
    /// Minimum inter-antenna distance, meters.
    pub min_spacing: f64,
    pub tx_power_dbm: f64,
    pub noise_power_dbm: f64,
    pub uav_height: f64,
    pub bs_height: f64,
    /// Cell circumradius, meters.
    pub cell_radius: f64,
    /// ICIC exclusion tiers around each occupied BS.
    pub icic_tiers: u32,
    /// Tiers of the interfering zone around the nearest BS.
    pub interfering_tiers: u32,
    /// Pins the UAV's horizontal position instead of sampling it.
    pub uav_position: Option<[f64; 2]>,
}

impl Default for PhysicalConfig {
    fn default() -> Self {
        Self {
            wavelength: 0.03,
            min_spacing: 0.015,
            tx_power_dbm: 30.0,
            noise_power_dbm: -109.0,
            uav_height: 100.0,
            bs_height: 30.0,
            cell_radius: 100.0,
            icic_tiers: 1,
            interfering_tiers: 4,
            uav_position: None,
        }
    }
}

impl PhysicalConfig {
    pub fn layout(&self) -> Result<CellLayout> {
        Ok(build_hex_layout(
            self.interfering_tiers,
            self.cell_radius,
            self.bs_height,
        )?)
    }

    /// Solver parameters for an `n`-antenna panel of side `region * wavelength`.
    pub fn phys_params(&self, n: usize, region: f64) -> PhysParams {
        PhysParams {
            wavelength: self.wavelength,
            tx_power: dbm_to_watts(self.tx_power_dbm),
            noise_power: dbm_to_watts(self.noise_power_dbm),
            panel_half_side: region * self.wavelength / 2.0,
            min_spacing: self.min_spacing,
            antenna_count: n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "J")]
    Interferers,
    #[serde(rename = "region")]
    Region,
    #[serde(rename = "N")]
    Antennas,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Interferers => "J",
            Axis::Region => "region",
            Axis::Antennas => "N",
        }
    }
}

/// Parameters of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPoint {
    #[serde(rename = "J")]
    pub j: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// Normalized region size `2L / lambda`.
    pub region: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub trials: usize,
    /// Values of the parameters the sweep does not vary.
    pub fixed: SweepPoint,
    pub schemes: Vec<SchemeId>,
    /// Output directory for `trials.csv` and `summary.json`.
    pub out: PathBuf,
    pub base_seed: u64,
    pub workers: usize,
    /// Record wall-clock time per trial. Off keeps the CSV reproducible.
    pub timing: bool,
    /// Whether the FPA counterpart of PROPOSED and S1 still optimizes the
    /// panel rotation.
    pub fpa_rotation: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Preset::Fig2.sweep()
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(HarnessError::Config(msg.to_owned()));
        if self.values.is_empty() {
            return bad("axis values must not be empty");
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return bad("axis values must be finite");
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return bad("axis values must be strictly increasing");
        }
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.workers == 0 {
            return bad("workers must be at least 1");
        }
        if self.schemes.is_empty() {
            return bad("at least one scheme is required");
        }
        for &v in &self.values {
            let p = self.point(v);
            if p.n == 0 {
                return bad("N must be at least 1");
            }
            if p.region.is_nan() || p.region <= 0.0 {
                return bad("region size must be positive");
            }
        }
        if self.axis != Axis::Region && self.values.iter().any(|v| *v < 0.0 || v.fract() != 0.0) {
            return bad("J and N axis values must be non-negative integers");
        }
        Ok(())
    }

    pub fn point(&self, value: f64) -> SweepPoint {
        let mut p = self.fixed;
        match self.axis {
            Axis::Interferers => p.j = value as usize,
            Axis::Region => p.region = value,
            Axis::Antennas => p.n = value as usize,
        }
        p
    }
}

/// Everything a sweep needs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sweep: SweepSpec,
    pub solver: SolverConfig,
    pub physical: PhysicalConfig,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.sweep.validate()?;
        self.solver.validate()?;
        for &v in &self.sweep.values {
            let p = self.sweep.point(v);
            self.physical.phys_params(p.n, p.region).validate()?;
        }
        Ok(())
    }
}

/// Sweeps matching the three result figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// SINR versus the number of co-channel users.
    Fig2,
    /// SINR versus the normalized region size.
    Fig3,
    /// SINR versus the number of antennas.
    Fig4,
}

impl Preset {
    pub fn sweep(self) -> SweepSpec {
        let (axis, values, fixed) = match self {
            Preset::Fig2 => (
                Axis::Interferers,
                vec![2.0, 4.0, 6.0, 8.0, 10.0, 12.0],
                SweepPoint {
                    j: 12,
                    n: 4,
                    region: 4.0,
                },
            ),
            Preset::Fig3 => (
                Axis::Region,
                vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
                SweepPoint {
                    j: 10,
                    n: 4,
                    region: 4.0,
                },
            ),
            Preset::Fig4 => (
                Axis::Antennas,
                vec![2.0, 4.0, 6.0, 8.0],
                SweepPoint {
                    j: 10,
                    n: 4,
                    region: 4.0,
                },
            ),
        };
        SweepSpec {
            axis,
            values,
            trials: 50,
            fixed,
            schemes: SchemeId::all(),
            out: PathBuf::from(format!("results/{self}")),
            base_seed: 0,
            workers: 1,
            timing: false,
            fpa_rotation: true,
        }
    }

    pub fn config(self) -> ExperimentConfig {
        ExperimentConfig {
            sweep: self.sweep(),
            ..ExperimentConfig::default()
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
        })
    }
}

impl FromStr for Preset {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            other => Err(HarnessError::Config(format!("unknown preset `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for p in [Preset::Fig2, Preset::Fig3, Preset::Fig4] {
            p.config().validate().unwrap();
            assert_eq!(p.to_string().parse::<Preset>().unwrap(), p);
        }
    }

    #[test]
    fn points_follow_the_axis() {
        let s = Preset::Fig3.sweep();
        assert_eq!(
            s.point(2.0),
            SweepPoint {
                j: 10,
                n: 4,
                region: 2.0
            }
        );
        let s = Preset::Fig4.sweep();
        assert_eq!(s.point(8.0).n, 8);
    }

    #[test]
    fn rejects_unsorted_or_fractional_values() {
        let mut s = Preset::Fig2.sweep();
        s.values = vec![4.0, 2.0];
        assert!(s.validate().is_err());
        s.values = vec![2.5];
        assert!(s.validate().is_err());
        s.values = vec![];
        assert!(s.validate().is_err());
    }

    #[test]
    fn json_round_trip_and_partial_documents() {
        let cfg = Preset::Fig4.config();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);

        let partial = r#"{"sweep": {"trials": 3}, "physical": {"tx_power_dbm": 20.0}}"#;
        let cfg = ExperimentConfig::from_json(partial).unwrap();
        assert_eq!(cfg.sweep.trials, 3);
        assert_eq!(cfg.sweep.axis, Axis::Interferers);
        assert_eq!(cfg.physical.tx_power_dbm, 20.0);
        assert_eq!(cfg.solver, SolverConfig::default());

        assert!(ExperimentConfig::from_json(r#"{"sweep": {"trails": 3}}"#).is_err());
    }

    #[test]
    fn default_physics() {
        let p = PhysicalConfig::default().phys_params(4, 4.0);
        assert!((p.panel_half_side - 0.06).abs() < 1e-15);
        assert!((p.tx_power - 1.0).abs() < 1e-12);
        assert_eq!(PhysicalConfig::default().layout().unwrap().len(), 61);
    }
}
