//! Gradient blocks: projected gradient descent on antenna positions and
//! plain gradient descent on the rotation angles.

use alloc::vec;
use alloc::vec::Vec;

use crate::channel::{Apv, Point2, Rotation};
use crate::error::Result;
use crate::scenario::LinkSet;

use super::{
    backtracking_step, max_abs, numerical_gradient, penalty_flat, AuxiliaryVector, GradientMethod, SolverConfig,
};

fn sinr_or_nan(links: &LinkSet, slopes: &[Point2], xs: &[f64]) -> f64 {
    let points: Vec<Point2> = xs.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
    links.sinr_at(slopes, &points).unwrap_or(f64::NAN)
}

/// Shared descent loop: steepest-descent
/// direction, Armijo backtracking from a first trial step whose largest
/// coordinate move equals `first_move`. Stops on a stalled line search, a
/// gradient too small to promise a decrease of `tol_inner`, a relative decrease below `tol_inner`, or after
/// `max_iter` iterations.
fn descend<F, G, P>(
    mut f: F,
    mut gradient: G,
    mut x: Vec<f64>,
    first_move: f64,
    config: &SolverConfig,
    mut project: P,
) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&mut F, &[f64]) -> Vec<f64>,
    P: FnMut(&mut [f64]),
{
    let search = config.line_search();
    let mut fx = f(&x);
    if !fx.is_finite() {
        return x;
    }
    for _ in 0..config.max_pgd {
        let grad = gradient(&mut f, &x);
        let scale = max_abs(&grad);
        if scale <= 0.0 || !scale.is_finite() {
            break;
        }
        let alpha0 = first_move / scale;
        // predicted decrease of the first trial under the linear model
        let predicted = alpha0 * grad.iter().map(|g| g * g).sum::<f64>();
        if predicted < config.tol_inner * fx.abs().max(1.0) {
            break;
        }
        let direction: Vec<f64> = grad.iter().map(|g| -g).collect();
        let Some(step) = backtracking_step(&mut f, &x, fx, &direction, &grad, alpha0, &search, &mut project) else {
            break;
        };
        let decrease = fx - step.value;
        x = step.x;
        fx = step.value;
        if decrease < config.tol_inner * fx.abs().max(1.0) {
            break;
        }
    }
    x
}

/// Minimizes `-gamma_k(x) + mu sum ||x_n - r_n||^2` over the panel box with
/// the rotation held fixed.
pub fn pgd_apv(
    links: &LinkSet,
    apv: &Apv,
    aux: &AuxiliaryVector,
    a: Rotation,
    mu: f64,
    config: &SolverConfig,
) -> Result<Apv> {
    let half_side = links.phys().panel_half_side;
    let slopes = links.phase_slopes(a);
    let r = aux.points();
    let f = |xs: &[f64]| -sinr_or_nan(links, &slopes, xs) + penalty_flat(xs, r, mu);
    let project = |xs: &mut [f64]| {
        for v in xs.iter_mut() {
            *v = v.clamp(-half_side, half_side);
        }
    };
    let mut start = apv.to_flat();
    project(&mut start);
    let eps = config.fd_epsilon_pos;
    let analytic = config.gradient == GradientMethod::Analytic;
    let gradient = |f: &mut _, xs: &[f64]| {
        if !analytic {
            return numerical_gradient(f, xs, eps);
        }
        let points: Vec<Point2> = xs.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
        match links.sinr_gradient_at(&slopes, &points) {
            Ok((_, g)) => g
                .iter()
                .zip(xs.iter().zip(r.iter().flatten()))
                .map(|(gi, (xi, ri))| -gi + 2.0 * mu * (xi - ri))
                .collect(),
            Err(_) => vec![f64::NAN; xs.len()],
        }
    };
    let x = descend(f, gradient, start, config.initial_step_pos * half_side, config, project);
    Apv::from_flat(&x)
}

/// Maximizes `gamma_k` over the rotation angles with positions held fixed.
pub fn gd_arv(links: &LinkSet, a: Rotation, apv: &Apv, config: &SolverConfig) -> Result<Rotation> {
    let points = apv.points();
    let f = |v: &[f64]| {
        let slopes = links.phase_slopes(Rotation::new(v[0], v[1], v[2]));
        -links.sinr_at(&slopes, points).unwrap_or(f64::NAN)
    };
    let eps = config.fd_epsilon_rot;
    let analytic = config.gradient == GradientMethod::Analytic;
    let gradient = |f: &mut _, xs: &[f64]| {
        if !analytic {
            return numerical_gradient(f, xs, eps);
        }
        match links.sinr_rotation_gradient(Rotation::new(xs[0], xs[1], xs[2]), points) {
            Ok((_, g)) => g.iter().map(|v| -v).collect(),
            Err(_) => vec![f64::NAN; 3],
        }
    };
    let x = descend(
        f,
        gradient,
        a.to_array().to_vec(),
        config.initial_step_rot,
        config,
        |_: &mut [f64]| {},
    );
    Ok(Rotation::new(x[0], x[1], x[2]))
}
