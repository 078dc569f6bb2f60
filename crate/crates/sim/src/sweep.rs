//! Monte Carlo sweeps and their output files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sixdma_core::channel::linear_to_db;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::scheme::SchemeId;
use crate::seeds::trial_seed;
use crate::trial::{run_schemes, TrialContext, TrialRecord};

pub const CSV_NAME: &str = "trials.csv";
pub const SUMMARY_NAME: &str = "summary.json";

pub const AVERAGING: &str =
    "mean_sinr_db = 10 log10(mean of linear SINR over trials); mean_of_db = mean of per-trial dB";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeSummary {
    pub scheme: String,
    pub with_fpa: bool,
    pub trials: usize,
    pub mean_sinr_db: f64,
    pub mean_of_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub axis_value: f64,
    #[serde(rename = "J")]
    pub j: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "region_2L_over_lambda")]
    pub region: f64,
    pub schemes: Vec<SchemeSummary>,
}

impl PointSummary {
    pub fn scheme(&self, id: SchemeId) -> Option<&SchemeSummary> {
        self.schemes
            .iter()
            .find(|s| s.scheme == id.kind.name() && s.with_fpa == id.with_fpa)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub averaging: String,
    pub axis: String,
    pub points: Vec<PointSummary>,
    pub config: ExperimentConfig,
}

impl Summary {
    /// `mean_sinr_db` of `scheme` at every point, in axis order.
    pub fn series(&self, scheme: SchemeId) -> Vec<f64> {
        self.points
            .iter()
            .filter_map(|p| p.scheme(scheme).map(|s| s.mean_sinr_db))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

/// Runs every trial of the sweep and returns the records ordered by axis
/// value, trial index and then scheme. Nothing is written.
pub fn execute(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let spec = &config.sweep;
    let layout = config.physical.layout()?;
    let ctx = TrialContext {
        physical: &config.physical,
        layout: &layout,
        solver: &config.solver,
        axis: spec.axis,
        fpa_rotation: spec.fpa_rotation,
        timing: spec.timing,
    };
    let tasks: Vec<(f64, u64)> = spec
        .values
        .iter()
        .flat_map(|&v| (0..spec.trials as u64).map(move |i| (v, i)))
        .collect();
    let run = |&(value, index): &(f64, u64)| {
        let seed = trial_seed(spec.base_seed, index);
        run_schemes(&ctx, spec.point(value), value, &spec.schemes, seed)
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(spec.workers).build()?;
    let batches: Vec<Vec<TrialRecord>> = pool.install(|| tasks.par_iter().map(run).collect::<Result<_>>())?;
    Ok(batches.into_iter().flatten().collect())
}

/// Per-point, per-scheme averages of `records`.
pub fn summarize(config: &ExperimentConfig, records: &[TrialRecord]) -> Summary {
    let spec = &config.sweep;
    let points = spec
        .values
        .iter()
        .map(|&value| {
            let p = spec.point(value);
            let schemes = spec
                .schemes
                .iter()
                .map(|s| {
                    let db: Vec<f64> = records
                        .iter()
                        .filter(|r| r.axis_value == value && r.scheme == s.kind.name() && r.with_fpa == s.with_fpa)
                        .map(|r| r.sinr_db)
                        .collect();
                    let count = db.len().max(1) as f64;
                    let linear = db.iter().map(|d| 10f64.powf(d / 10.0)).sum::<f64>() / count;
                    SchemeSummary {
                        scheme: s.kind.name().to_owned(),
                        with_fpa: s.with_fpa,
                        trials: db.len(),
                        mean_sinr_db: linear_to_db(linear),
                        mean_of_db: db.iter().sum::<f64>() / count,
                    }
                })
                .collect();
            PointSummary {
                axis_value: value,
                j: p.j,
                n: p.n,
                region: p.region,
                schemes,
            }
        })
        .collect();
    Summary {
        averaging: AVERAGING.to_owned(),
        axis: spec.axis.name().to_owned(),
        points,
        config: config.clone(),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| HarnessError::Io {
            path: path.to_owned(),
            source,
        })
}

/// Opens both output files of `dir`, creating the directory if needed.
fn open_outputs(dir: &Path) -> Result<(BufWriter<File>, BufWriter<File>)> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.to_owned(),
        source,
    })?;
    Ok((create(&dir.join(CSV_NAME))?, create(&dir.join(SUMMARY_NAME))?))
}

pub fn write_csv<W: Write>(out: W, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|source| HarnessError::Io {
        path: PathBuf::from(CSV_NAME),
        source,
    })?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<TrialRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// Runs the sweep and writes `trials.csv` and `summary.json` into
/// `config.sweep.out`. Output files are opened before any trial runs, so an
/// unwritable location fails fast.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepOutput> {
    config.validate()?;
    let dir = &config.sweep.out;
    let (csv_out, mut json_out) = open_outputs(dir)?;
    let records = execute(config)?;
    let summary = summarize(config, &records);
    write_csv(csv_out, &records)?;
    serde_json::to_writer_pretty(&mut json_out, &summary)?;
    json_out
        .write_all(b"\n")
        .and_then(|_| json_out.flush())
        .map_err(|source| HarnessError::Io {
            path: dir.join(SUMMARY_NAME),
            source,
        })?;
    Ok(SweepOutput { records, summary })
}
