//! One Monte Carlo trial: draw a scenario from a seed and solve it under
//! one or more schemes.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sixdma_core::channel::linear_to_db;
use sixdma_core::grid::{sample_occupancy, CellLayout};
use sixdma_core::{bcd_solve, fpa_positions, Apv, Point3, Restrictions, Scenario, SolverConfig};

use crate::config::{Axis, PhysicalConfig, SweepPoint};
use crate::error::{HarnessError, Result};
use crate::scheme::{SchemeId, SchemeKind};
use crate::seeds::attempt_seed;

/// Fresh scenario draws tried before a trial is given up.
pub const MAX_ATTEMPTS: u32 = 16;

/// One row of the trial CSV. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub scheme: String,
    pub with_fpa: bool,
    pub axis_name: String,
    pub axis_value: f64,
    #[serde(rename = "J")]
    pub j: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "region_2L_over_lambda")]
    pub region: f64,
    pub k_star: usize,
    pub sinr_db: f64,
    pub wall_time_ms: u64,
}

impl TrialRecord {
    pub fn scheme_id(&self) -> Result<SchemeId> {
        let kind: SchemeId = self.scheme.parse()?;
        Ok(SchemeId::new(kind.kind, self.with_fpa))
    }
}

/// Outcome of one scheme on one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeOutcome {
    pub scheme: SchemeId,
    pub k_star: usize,
    pub sinr_linear: f64,
}

/// Uniform horizontal position in the central cell at height `height`, or
/// the pinned position when one is given.
pub fn sample_uav_position<R: Rng + ?Sized>(
    layout: &CellLayout,
    height: f64,
    pinned: Option<[f64; 2]>,
    rng: &mut R,
) -> Point3 {
    if let Some([x, y]) = pinned {
        return [x, y, height];
    }
    let hx = layout.inter_site_distance() / 2.0;
    let hy = layout.cell_radius();
    loop {
        let x = rng.random_range(-hx..=hx);
        let y = rng.random_range(-hy..=hy);
        if layout.in_central_cell(x, y) {
            return [x, y, height];
        }
    }
}

/// Draws the scenario for `seed`. The UAV position is drawn before the
/// occupancy, so it does not depend on `J`. When the occupancy cannot be
/// drawn the next attempt seed is used.
pub fn draw_scenario(physical: &PhysicalConfig, layout: &CellLayout, point: SweepPoint, seed: u64) -> Result<Scenario> {
    let phys = physical.phys_params(point.n, point.region);
    let mut last = None;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(attempt_seed(seed, attempt));
        let uav = sample_uav_position(layout, physical.uav_height, physical.uav_position, &mut rng);
        match sample_occupancy(layout, point.j, physical.icic_tiers, uav, &mut rng) {
            Ok(draw) => return Ok(Scenario::new(layout, uav, draw, phys)),
            Err(e @ sixdma_core::Error::Sampling { .. }) => last = Some(e),
            Err(e) => return Err(e.into()),
        }
    }
    Err(last.expect("at least one attempt").into())
}

/// Lowest-index argmax of `(bs, sinr)` pairs in ascending BS order.
fn argmax(results: &[(usize, f64)]) -> (usize, f64) {
    let mut best = results[0];
    for &r in &results[1..] {
        if r.1 > best.1 {
            best = r;
        }
    }
    best
}

fn at(results: &[(usize, f64)], bs: usize) -> (usize, f64) {
    *results
        .iter()
        .find(|r| r.0 == bs)
        .expect("nearest available BS is always solved")
}

/// Solves the schemes of one array family (movable or fixed) with shared
/// work. With free positions, a full solve's rotation-frozen stage is the
/// S2/S3 solve for the same BS, so it is reused rather than repeated.
fn solve_family(
    scenario: &Scenario,
    config: &SolverConfig,
    fixed: Option<Apv>,
    rotate: bool,
    kinds: &[SchemeKind],
) -> Result<Vec<(SchemeKind, usize, f64)>> {
    let nearest = scenario.nearest_available()?;
    let all_bs = kinds.iter().any(|k| k.selects_bs());
    let ks = if all_bs {
        scenario.candidates(config.top_c_candidates)?
    } else {
        vec![nearest]
    };
    let want_rotating = rotate && kinds.iter().any(|k| k.rotates());
    let want_frozen = !rotate || kinds.iter().any(|k| !k.rotates());

    let full = Restrictions {
        fixed_apv: fixed.clone(),
        optimize_rotation: true,
    };
    let frozen_only = Restrictions {
        fixed_apv: fixed.clone(),
        optimize_rotation: false,
    };
    let mut rotating = Vec::new();
    let mut frozen = Vec::new();
    for &k in &ks {
        if want_rotating {
            let c = bcd_solve(scenario, k, config, &full)?;
            if want_frozen {
                let g = match &c.fixed_rotation {
                    Some(stage) => stage.sinr_linear,
                    None => bcd_solve(scenario, k, config, &frozen_only)?.sinr_linear,
                };
                frozen.push((k, g));
            }
            rotating.push((k, c.sinr_linear));
        } else if want_frozen {
            frozen.push((k, bcd_solve(scenario, k, config, &frozen_only)?.sinr_linear));
        }
    }
    if !rotate {
        rotating = frozen.clone();
    }

    Ok(kinds
        .iter()
        .map(|&kind| {
            let pool = if kind.rotates() { &rotating } else { &frozen };
            let (k, g) = if kind.selects_bs() {
                argmax(pool)
            } else {
                at(pool, nearest)
            };
            (kind, k, g)
        })
        .collect())
}

/// Solves `schemes` on one scenario. Results follow the order of `schemes`
/// and equal what solving each scheme on its own would give.
pub fn solve_schemes(
    scenario: &Scenario,
    config: &SolverConfig,
    fpa_rotation: bool,
    schemes: &[SchemeId],
) -> Result<Vec<SchemeOutcome>> {
    let mut out = Vec::with_capacity(schemes.len());
    for with_fpa in [false, true] {
        let mut kinds: Vec<SchemeKind> = schemes
            .iter()
            .filter(|s| s.with_fpa == with_fpa)
            .map(|s| s.kind)
            .collect();
        kinds.sort_unstable();
        kinds.dedup();
        if kinds.is_empty() {
            continue;
        }
        let (fixed, rotate) = if with_fpa {
            let p = scenario.phys;
            (Some(fpa_positions(p.antenna_count, p.wavelength)?), fpa_rotation)
        } else {
            (None, true)
        };
        for (kind, k_star, sinr_linear) in solve_family(scenario, config, fixed, rotate, &kinds)? {
            out.push(SchemeOutcome {
                scheme: SchemeId::new(kind, with_fpa),
                k_star,
                sinr_linear,
            });
        }
    }
    schemes
        .iter()
        .map(|s| {
            out.iter()
                .find(|o| o.scheme == *s)
                .copied()
                .ok_or_else(|| HarnessError::Config(format!("scheme {s} was not solved")))
        })
        .collect()
}

/// Shared context of a sweep's trials.
#[derive(Debug, Clone)]
pub struct TrialContext<'a> {
    pub physical: &'a PhysicalConfig,
    pub layout: &'a CellLayout,
    pub solver: &'a SolverConfig,
    pub axis: Axis,
    pub fpa_rotation: bool,
    pub timing: bool,
}

/// Runs every scheme in `schemes` on the scenario of `seed` at `point`.
pub fn run_schemes(
    ctx: &TrialContext<'_>,
    point: SweepPoint,
    axis_value: f64,
    schemes: &[SchemeId],
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    let start = Instant::now();
    let scenario = draw_scenario(ctx.physical, ctx.layout, point, seed)?;
    let outcomes = solve_schemes(&scenario, ctx.solver, ctx.fpa_rotation, schemes)?;
    let wall_time_ms = if ctx.timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    outcomes
        .into_iter()
        .map(|o| {
            let sinr_db = linear_to_db(o.sinr_linear);
            if !sinr_db.is_finite() {
                return Err(HarnessError::Config(format!(
                    "non-finite SINR for {} at seed {seed}",
                    o.scheme
                )));
            }
            Ok(TrialRecord {
                seed,
                scheme: o.scheme.kind.name().to_owned(),
                with_fpa: o.scheme.with_fpa,
                axis_name: ctx.axis.name().to_owned(),
                axis_value,
                j: point.j,
                n: point.n,
                region: point.region,
                k_star: o.k_star,
                sinr_db,
                wall_time_ms,
            })
        })
        .collect()
}

/// A single scheme on the scenario of `seed`.
pub fn run_trial(
    ctx: &TrialContext<'_>,
    point: SweepPoint,
    axis_value: f64,
    scheme: SchemeId,
    seed: u64,
) -> Result<TrialRecord> {
    Ok(run_schemes(ctx, point, axis_value, &[scheme], seed)?.remove(0))
}
