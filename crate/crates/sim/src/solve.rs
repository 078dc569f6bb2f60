//! Full solver output for a single scenario.

use std::io::Write;

use serde::Serialize;
use sixdma_core::channel::linear_to_db;
use sixdma_core::optimizer::Stage;
use sixdma_core::{
    bcd_solve, fpa_positions, select_bs, CandidateResult, Restrictions, Scenario, SolveResult, SolverConfig,
};

use crate::error::{HarnessError, Result};
use crate::scheme::SchemeId;

#[derive(Debug, Clone, Serialize)]
pub struct CandidateSummary {
    pub bs: usize,
    pub sinr_db: f64,
    pub outer_iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub seed: u64,
    pub scheme: String,
    pub uav: [f64; 3],
    pub occupied: Vec<usize>,
    pub available: Vec<usize>,
    pub nearest: usize,
    pub k_star: usize,
    pub sinr_linear: f64,
    pub sinr_db: f64,
    /// Antenna positions in the panel frame, meters.
    pub apv: Vec<[f64; 2]>,
    /// Rotation angles `[phi, psi, theta]`, radians.
    pub arv: [f64; 3],
    /// Receive weights as `[re, im]`.
    pub w: Vec<[f64; 2]>,
    pub candidates: Vec<CandidateSummary>,
}

/// One line of the optional trace dump.
#[derive(Debug, Clone, Serialize)]
pub struct TraceLine {
    pub bs: usize,
    pub stage: &'static str,
    pub iteration: usize,
    pub sinr: f64,
    pub iterate_sinr: f64,
    pub penalty: f64,
    pub spacing_violation: f64,
    pub mu: f64,
}

/// Solves `scheme` on `scenario`, keeping every per-candidate result.
pub fn solve_scheme(
    scenario: &Scenario,
    config: &SolverConfig,
    scheme: SchemeId,
    fpa_rotation: bool,
) -> Result<SolveResult> {
    let p = scenario.phys;
    let restrictions = Restrictions {
        fixed_apv: if scheme.with_fpa {
            Some(fpa_positions(p.antenna_count, p.wavelength)?)
        } else {
            None
        },
        optimize_rotation: scheme.kind.rotates() && (fpa_rotation || !scheme.with_fpa),
    };
    if scheme.kind.selects_bs() {
        return Ok(select_bs(scenario, config, &restrictions)?);
    }
    let k = scenario.nearest_available()?;
    let c = bcd_solve(scenario, k, config, &restrictions)?;
    Ok(SolveResult {
        k_star: c.bs,
        apv: c.apv.clone(),
        arv: c.arv,
        w: c.w.clone(),
        sinr_linear: c.sinr_linear,
        trace: c.trace.clone(),
        candidates: vec![c],
    })
}

pub fn report(seed: u64, scheme: SchemeId, scenario: &Scenario, r: &SolveResult) -> SolveReport {
    SolveReport {
        seed,
        scheme: scheme.to_string(),
        uav: scenario.uav,
        occupied: scenario.occupied.clone(),
        available: scenario.available.clone(),
        nearest: scenario.nearest,
        k_star: r.k_star,
        sinr_linear: r.sinr_linear,
        sinr_db: linear_to_db(r.sinr_linear),
        apv: r.apv.points().to_vec(),
        arv: r.arv.to_array(),
        w: r.w.iter().map(|c| [c.re, c.im]).collect(),
        candidates: r
            .candidates
            .iter()
            .map(|c| CandidateSummary {
                bs: c.bs,
                sinr_db: linear_to_db(c.sinr_linear),
                outer_iterations: c.trace.len().saturating_sub(1),
            })
            .collect(),
    }
}

fn trace_lines(c: &CandidateResult) -> impl Iterator<Item = TraceLine> + '_ {
    c.trace.iter().map(|t| TraceLine {
        bs: c.bs,
        stage: match t.stage {
            Stage::FixedRotation => "fixed_rotation",
            Stage::Full => "full",
        },
        iteration: t.iteration,
        sinr: t.sinr,
        iterate_sinr: t.iterate_sinr,
        penalty: t.penalty,
        spacing_violation: t.spacing_violation,
        mu: t.mu,
    })
}

/// Writes every candidate's trace as JSON lines.
pub fn write_trace<W: Write>(mut out: W, r: &SolveResult) -> Result<()> {
    for c in &r.candidates {
        for line in trace_lines(c) {
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n").map_err(|source| HarnessError::Io {
                path: "trace".into(),
                source,
            })?;
        }
    }
    Ok(())
}
