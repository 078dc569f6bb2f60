//! Outer block coordinate descent loop and serving-BS selection.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::arrays::{fpa_positions, upa_init_positions};
use crate::beamforming::{mmse_weights, objective_sinr};
use crate::channel::{Apv, Rotation};
use crate::error::{Error, Result};
use crate::scenario::{LinkSet, Scenario};

use super::{gd_arv, optimize_aux, penalty, penalty_points, pgd_apv, AuxiliaryVector, SolverConfig};

/// Which blocks a solve may move.
#[derive(Debug, Clone, PartialEq)]
pub struct Restrictions {
    /// Antenna positions are frozen at this array when set.
    pub fixed_apv: Option<Apv>,
    /// The rotation stays at zero (panel parallel to the ground) when false.
    pub optimize_rotation: bool,
}

impl Default for Restrictions {
    fn default() -> Self {
        Self {
            fixed_apv: None,
            optimize_rotation: true,
        }
    }
}

impl Restrictions {
    pub fn fixed_rotation() -> Self {
        Self {
            fixed_apv: None,
            optimize_rotation: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Positions and auxiliary vector only, rotation held at its start.
    FixedRotation,
    /// All blocks.
    Full,
}

/// State after one outer iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub stage: Stage,
    pub iteration: usize,
    /// SINR of the best feasible design so far; never decreases.
    pub sinr: f64,
    /// SINR at the current (possibly infeasible) iterate.
    pub iterate_sinr: f64,
    pub penalty: f64,
    /// Shortfall of the iterate's smallest antenna spacing below `L0`.
    pub spacing_violation: f64,
    pub mu: f64,
}

/// Best feasible design found by a stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageResult {
    pub apv: Apv,
    pub arv: Rotation,
    pub sinr_linear: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateResult {
    pub bs: usize,
    pub apv: Apv,
    pub arv: Rotation,
    pub w: Vec<Complex64>,
    pub sinr_linear: f64,
    pub trace: Vec<TraceEntry>,
    /// Outcome of the rotation-frozen stage, when positions were optimized.
    pub fixed_rotation: Option<StageResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub k_star: usize,
    pub apv: Apv,
    pub arv: Rotation,
    pub w: Vec<Complex64>,
    pub sinr_linear: f64,
    pub trace: Vec<TraceEntry>,
    /// Every BS that was solved for, ascending index.
    pub candidates: Vec<CandidateResult>,
}

/// `-gamma_k + mu sum ||x_n - r_n||^2`.
pub fn penalized_objective(
    apv: &Apv,
    aux: &AuxiliaryVector,
    a: Rotation,
    serving: usize,
    mu: f64,
    scenario: &Scenario,
) -> Result<f64> {
    Ok(-objective_sinr(apv, a, serving, scenario)? + penalty(apv, aux, mu)?)
}

struct Incumbent {
    apv: Apv,
    arv: Rotation,
    sinr: f64,
}

impl Incumbent {
    fn offer(slot: &mut Option<Incumbent>, apv: &Apv, arv: Rotation, sinr: f64) {
        if slot.as_ref().is_none_or(|inc| sinr > inc.sinr) {
            *slot = Some(Incumbent {
                apv: apv.clone(),
                arv,
                sinr,
            });
        }
    }
}

struct Run {
    best: Option<Incumbent>,
    trace: Vec<TraceEntry>,
    fixed_rotation: Option<StageResult>,
}

/// Runs the block coordinate descent for serving BS `serving`.
///
/// Positions start from a UPA spanning the panel, the auxiliary vector from
/// the same points and the rotation from zero. With `SolverConfig::fpa_start`
/// a second run starts from the half-wavelength array and the better of the
/// two is kept. When both positions and rotation are free each run has two
/// stages: first with the rotation frozen, then with every block active,
/// warm-started from the first stage's best design. The returned design is
/// the best spacing-feasible, in-box design seen at the end of any outer
/// iteration, so the logged SINR never drops.
pub fn bcd_solve(
    scenario: &Scenario,
    serving: usize,
    config: &SolverConfig,
    restrictions: &Restrictions,
) -> Result<CandidateResult> {
    config.validate()?;
    let phys = scenario.phys;
    let links = LinkSet::new(scenario, serving)?;
    let n = phys.antenna_count;
    let half_side = phys.panel_half_side;

    let mut starts = Vec::new();
    let positions_free = match &restrictions.fixed_apv {
        Some(apv) => {
            if apv.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: apv.len(),
                });
            }
            starts.push(apv.clone());
            false
        }
        None => {
            let upa = upa_init_positions(n, half_side)?;
            if config.fpa_start {
                let fpa = fpa_positions(n, phys.wavelength)?;
                if fpa != upa && fpa.in_box(half_side) {
                    starts.push(fpa);
                }
            }
            starts.insert(0, upa);
            true
        }
    };

    let mut winner: Option<Run> = None;
    let mut fixed_rotation: Option<StageResult> = None;
    for start in starts {
        let run = run_from(&links, start, positions_free, config, restrictions)?;
        if let Some(f) = &run.fixed_rotation {
            if fixed_rotation.as_ref().is_none_or(|b| f.sinr_linear > b.sinr_linear) {
                fixed_rotation = Some(f.clone());
            }
        }
        let better = match (&winner, &run.best) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(w), Some(b)) => w.best.as_ref().is_none_or(|wb| b.sinr > wb.sinr),
        };
        if better {
            winner = Some(run);
        }
    }

    let Run { best, trace, .. } = winner.expect("at least one start");
    let best = best.ok_or(Error::NoFeasibleDesign { bs: serving })?;
    let slopes = links.phase_slopes(best.arv);
    let h = links.channels(&slopes, best.apv.points());
    let (desired, interferers) = h.split_first().expect("serving link is always present");
    let bf = mmse_weights(desired, interferers, phys.tx_power, phys.noise_power)?;
    let two_stage = positions_free && restrictions.optimize_rotation;
    Ok(CandidateResult {
        bs: serving,
        apv: best.apv,
        arv: best.arv,
        w: bf.w,
        sinr_linear: bf.sinr_linear,
        trace,
        fixed_rotation: if two_stage { fixed_rotation } else { None },
    })
}

fn run_from(
    links: &LinkSet,
    start: Apv,
    positions_free: bool,
    config: &SolverConfig,
    restrictions: &Restrictions,
) -> Result<Run> {
    let phys = links.phys();
    let half_side = phys.panel_half_side;
    let min_spacing = phys.min_spacing;
    let feasible = |apv: &Apv| {
        apv.spacing_violation(min_spacing) <= config.spacing_tol && (!positions_free || apv.in_box(half_side))
    };

    let gamma0 = links.sinr(&start, Rotation::ZERO)?;
    let mu0 = config.penalty_mu.unwrap_or_else(|| {
        let scale = if gamma0 > 0.0 { gamma0 } else { 1.0 };
        config.penalty_scale * scale / (min_spacing * min_spacing)
    });
    let mu_max = mu0 * config.penalty_cap;

    let mut best = None;
    if feasible(&start) {
        Incumbent::offer(&mut best, &start, Rotation::ZERO, gamma0);
    }
    let mut trace = Vec::new();
    trace.push(TraceEntry {
        stage: if positions_free {
            Stage::FixedRotation
        } else {
            Stage::Full
        },
        iteration: 0,
        sinr: best.as_ref().map_or(0.0, |b: &Incumbent| b.sinr),
        iterate_sinr: gamma0,
        penalty: 0.0,
        spacing_violation: start.spacing_violation(min_spacing),
        mu: mu0,
    });

    let mut stages = Vec::new();
    if positions_free {
        stages.push(Stage::FixedRotation);
    }
    if restrictions.optimize_rotation {
        stages.push(Stage::Full);
    }

    let mut x = start.clone();
    let mut aux = AuxiliaryVector::new(start.points().to_vec());
    let mut a = Rotation::ZERO;
    let mut fixed_rotation = None;

    for (s, &stage) in stages.iter().enumerate() {
        if s > 0 {
            if let Some(b) = &best {
                x = b.apv.clone();
                a = b.arv;
            }
            aux = AuxiliaryVector::new(x.points().to_vec());
        }
        let mut mu = mu0;
        let mut prev = links.sinr(&x, a)?;
        for iteration in 1..=config.max_outer {
            if positions_free {
                x = pgd_apv(links, &x, &aux, a, mu, config)?;
                aux = optimize_aux(x.points(), aux, min_spacing, config)?;
            }
            if stage == Stage::Full {
                a = gd_arv(links, a, &x, config)?;
            }

            let current = links.sinr(&x, a)?;
            let violation = x.spacing_violation(min_spacing);
            if feasible(&x) {
                Incumbent::offer(&mut best, &x, a, current);
            }
            if positions_free {
                let snapped = Apv::new(aux.points().to_vec())?;
                if snapped.in_box(half_side) {
                    let g = links.sinr(&snapped, a)?;
                    Incumbent::offer(&mut best, &snapped, a, g);
                }
            }
            trace.push(TraceEntry {
                stage,
                iteration,
                sinr: best.as_ref().map_or(0.0, |b| b.sinr),
                iterate_sinr: current,
                penalty: penalty_points(x.points(), aux.points(), mu),
                spacing_violation: violation,
                mu,
            });

            let converged = violation <= config.spacing_tol && current - prev <= config.tol_outer * prev.abs();
            prev = current;
            if converged {
                break;
            }
            mu = (mu * config.penalty_growth).min(mu_max);
        }
        if stage == Stage::FixedRotation {
            fixed_rotation = best.as_ref().map(|b| StageResult {
                apv: b.apv.clone(),
                arv: b.arv,
                sinr_linear: b.sinr,
            });
        }
    }
    Ok(Run {
        best,
        trace,
        fixed_rotation,
    })
}

/// Solves every candidate BS and keeps the one with the highest SINR
/// (lowest index on ties).
pub fn select_bs(scenario: &Scenario, config: &SolverConfig, restrictions: &Restrictions) -> Result<SolveResult> {
    let ks = scenario.candidates(config.top_c_candidates)?;
    if ks.is_empty() {
        return Err(Error::NoCandidates);
    }
    let candidates = ks
        .iter()
        .map(|&k| bcd_solve(scenario, k, config, restrictions))
        .collect::<Result<Vec<_>>>()?;
    Ok(pick_best(candidates))
}

/// Argmax over already solved candidates, which must be non-empty and in
/// ascending BS order.
pub(crate) fn pick_best(candidates: Vec<CandidateResult>) -> SolveResult {
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate() {
        if c.sinr_linear > candidates[best].sinr_linear {
            best = i;
        }
    }
    let b = &candidates[best];
    SolveResult {
        k_star: b.bs,
        apv: b.apv.clone(),
        arv: b.arv,
        w: b.w.clone(),
        sinr_linear: b.sinr_linear,
        trace: b.trace.clone(),
        candidates,
    }
}
