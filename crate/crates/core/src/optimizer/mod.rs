//! Block coordinate descent over antenna positions, the spacing auxiliary
//! vector and the panel rotation, followed by serving-BS selection.

mod aux;
mod bcd;
mod descent;

use alloc::vec::Vec;

use crate::channel::{Apv, Point2};
use crate::error::{Error, Result};

pub use aux::{optimize_aux, solve_aux_point, AuxiliaryVector};
pub use bcd::{
    bcd_solve, penalized_objective, select_bs, CandidateResult, Restrictions, SolveResult, Stage, StageResult,
    TraceEntry,
};
pub use descent::{gd_arv, pgd_apv};

/// Solver knobs. Step sizes are expressed as the largest coordinate
/// displacement of the first trial step, so they keep their meaning
/// whatever the scale of the SINR objective.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SolverConfig {
    /// Initial penalty factor. `None` derives it from the starting SINR as
    /// `penalty_scale * gamma_0 / L0^2`.
    pub penalty_mu: Option<f64>,
    pub penalty_scale: f64,
    /// Factor applied to the penalty after every outer iteration.
    pub penalty_growth: f64,
    /// Upper bound on the penalty factor, relative to its initial value.
    pub penalty_cap: f64,
    /// How the gradients of both descent blocks are obtained.
    pub gradient: GradientMethod,
    /// Central-difference step for positions, meters.
    pub fd_epsilon_pos: f64,
    /// Central-difference step for angles, radians.
    pub fd_epsilon_rot: f64,
    pub armijo_c: f64,
    pub backtrack_shrink: f64,
    /// First trial displacement for positions, as a fraction of the panel
    /// half side `L`.
    pub initial_step_pos: f64,
    /// First trial displacement for angles, radians.
    pub initial_step_rot: f64,
    /// Relative SINR increase below which the outer loop stops.
    pub tol_outer: f64,
    /// Relative objective decrease below which inner descents stop.
    pub tol_inner: f64,
    pub max_outer: usize,
    pub max_pgd: usize,
    pub max_aux: usize,
    pub max_backtrack: usize,
    /// Slack on the minimum antenna spacing, meters.
    pub spacing_tol: f64,
    /// Only the `C` available BSs closest to the UAV are tried when set.
    pub top_c_candidates: Option<usize>,
    /// Also start from the half-wavelength array and keep the better run.
    pub fpa_start: bool,
}

/// Gradient of the SINR with respect to positions and angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum GradientMethod {
    /// Closed form of the quadratic-form SINR.
    Analytic,
    /// Central differences with steps `fd_epsilon_pos` and `fd_epsilon_rot`.
    CentralDifference,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            penalty_mu: None,
            penalty_scale: 0.01,
            penalty_growth: 2.0,
            penalty_cap: 1e8,
            gradient: GradientMethod::Analytic,
            fd_epsilon_pos: 1e-6,
            fd_epsilon_rot: 1e-6,
            armijo_c: 1e-4,
            backtrack_shrink: 0.5,
            initial_step_pos: 1.0,
            initial_step_rot: 0.2,
            tol_outer: 1e-4,
            tol_inner: 1e-6,
            max_outer: 30,
            max_pgd: 200,
            max_aux: 50,
            max_backtrack: 30,
            spacing_tol: 1e-6,
            top_c_candidates: None,
            fpa_start: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.penalty_mu.is_none_or(|m| m > 0.0), "penalty_mu must be positive"),
            (self.penalty_scale > 0.0, "penalty_scale must be positive"),
            (self.penalty_growth >= 1.0, "penalty_growth must be at least 1"),
            (self.penalty_cap >= 1.0, "penalty_cap must be at least 1"),
            (self.fd_epsilon_pos > 0.0, "fd_epsilon_pos must be positive"),
            (self.fd_epsilon_rot > 0.0, "fd_epsilon_rot must be positive"),
            ((0.0..=1.0).contains(&self.armijo_c), "armijo_c must lie in [0, 1]"),
            (
                self.backtrack_shrink > 0.0 && self.backtrack_shrink < 1.0,
                "backtrack_shrink must lie in (0, 1)",
            ),
            (self.initial_step_pos > 0.0, "initial_step_pos must be positive"),
            (self.initial_step_rot > 0.0, "initial_step_rot must be positive"),
            (self.tol_outer >= 0.0, "tol_outer must be non-negative"),
            (self.tol_inner >= 0.0, "tol_inner must be non-negative"),
            (self.spacing_tol >= 0.0, "spacing_tol must be non-negative"),
            (self.top_c_candidates != Some(0), "top_c_candidates must be positive"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::InvalidParameter(msg));
            }
        }
        Ok(())
    }

    pub(crate) fn line_search(&self) -> LineSearch {
        LineSearch {
            armijo_c: self.armijo_c,
            shrink: self.backtrack_shrink,
            max_backtrack: self.max_backtrack,
        }
    }
}

/// `mu * sum_n ||x_n - r_n||^2`.
pub fn penalty(apv: &Apv, aux: &AuxiliaryVector, mu: f64) -> Result<f64> {
    if apv.len() != aux.len() {
        return Err(Error::Dimension {
            expected: apv.len(),
            got: aux.len(),
        });
    }
    Ok(penalty_points(apv.points(), aux.points(), mu))
}

pub(crate) fn penalty_points(x: &[Point2], r: &[Point2], mu: f64) -> f64 {
    mu * x
        .iter()
        .zip(r)
        .map(|(a, b)| (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]))
        .sum::<f64>()
}

pub(crate) fn penalty_flat(x: &[f64], r: &[Point2], mu: f64) -> f64 {
    mu * x
        .chunks_exact(2)
        .zip(r)
        .map(|(a, b)| (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]))
        .sum::<f64>()
}

/// Central-difference gradient `[f(x + eps e_n) - f(x - eps e_n)] / (2 eps)`.
pub fn numerical_gradient<F>(mut f: F, x: &[f64], eps: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|n| {
            probe[n] = x[n] + eps;
            let up = f(&probe);
            probe[n] = x[n] - eps;
            let down = f(&probe);
            probe[n] = x[n];
            (up - down) / (2.0 * eps)
        })
        .collect()
}

/// Clamps every coordinate to `[-half_side, half_side]`.
pub fn project_box(x: &[f64], half_side: f64) -> Vec<f64> {
    x.iter().map(|v| v.clamp(-half_side, half_side)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearch {
    pub armijo_c: f64,
    pub shrink: f64,
    pub max_backtrack: usize,
}

/// An accepted backtracking step.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub alpha: f64,
    pub x: Vec<f64>,
    pub value: f64,
}

/// Tries `alpha0 * shrink^t` for `t = 0..=max_backtrack` and returns the
/// first step whose projected point satisfies the Armijo condition
/// `f(P(x + alpha d)) <= f(x) + c alpha grad^T d`. `None` means the search
/// stalled.
#[allow(clippy::too_many_arguments)]
pub fn backtracking_step<F, P>(
    mut f: F,
    x: &[f64],
    fx: f64,
    direction: &[f64],
    grad: &[f64],
    alpha0: f64,
    search: &LineSearch,
    mut project: P,
) -> Option<Step>
where
    F: FnMut(&[f64]) -> f64,
    P: FnMut(&mut [f64]),
{
    let slope: f64 = grad.iter().zip(direction).map(|(g, d)| g * d).sum();
    let mut alpha = alpha0;
    let mut trial = x.to_vec();
    for _ in 0..=search.max_backtrack {
        for ((t, xi), di) in trial.iter_mut().zip(x).zip(direction) {
            *t = xi + alpha * di;
        }
        project(&mut trial);
        let value = f(&trial);
        if value <= fx + search.armijo_c * alpha * slope {
            return Some(Step { alpha, x: trial, value });
        }
        alpha *= search.shrink;
    }
    None
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
