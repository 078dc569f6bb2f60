//! Spacing-feasible auxiliary positions.
//!
//! For fixed antenna positions `x`, the auxiliary vector `r` minimizes
//! `sum_n ||x_n - r_n||^2` subject to `||r_m - r_n|| >= L0`. Points are
//! updated one at a time; each single-point problem is solved exactly by
//! enumerating the candidates where its minimizer can lie.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;

use num_traits::Float;

use crate::channel::{dist2, min_pairwise_distance, Point2};
use crate::error::{Error, Result};

use super::SolverConfig;

/// Relative slack when testing a candidate against the spacing constraint.
/// Circle intersections land on the constraint boundary up to rounding.
const BOUNDARY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryVector {
    points: Vec<Point2>,
}

impl AuxiliaryVector {
    pub fn new(points: Vec<Point2>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        min_pairwise_distance(&self.points)
    }

    pub fn into_points(self) -> Vec<Point2> {
        self.points
    }
}

fn feasible(c: Point2, others: &[Point2], min_spacing: f64) -> bool {
    let limit = min_spacing * (1.0 - BOUNDARY_SLACK);
    others.iter().all(|r| dist2(c, *r) >= limit)
}

fn sq_dist(a: Point2, b: Point2) -> f64 {
    (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1])
}

/// Closest point to `x` that keeps distance `min_spacing` from every point
/// in `others`.
///
/// If `x` itself is feasible it is returned. Otherwise the minimizer sits on
/// the boundary of the union of the exclusion disks: either at the point of
/// a conflicting circle nearest to `x`, or where two circles cross. All such
/// candidates are enumerated and the best feasible one is kept.
pub fn solve_aux_point(x: Point2, others: &[Point2], min_spacing: f64) -> Result<Point2> {
    if feasible(x, others, min_spacing) {
        return Ok(x);
    }
    let mut best: Option<(f64, Point2)> = None;
    let mut consider = |c: Point2| {
        if feasible(c, others, min_spacing) {
            let d = sq_dist(x, c);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, c));
            }
        }
    };

    for r in others {
        let d = dist2(x, *r);
        if d >= min_spacing {
            continue;
        }
        if d > 0.0 {
            let s = min_spacing / d;
            consider([r[0] + (x[0] - r[0]) * s, r[1] + (x[1] - r[1]) * s]);
        } else {
            // every point of the circle is equally close
            for i in 0..8 {
                let (sn, cs) = Float::sin_cos(i as f64 * FRAC_PI_4);
                consider([r[0] + min_spacing * cs, r[1] + min_spacing * sn]);
            }
        }
    }

    for (i, a) in others.iter().enumerate() {
        for b in &others[i + 1..] {
            let d = dist2(*a, *b);
            if d == 0.0 || d > 2.0 * min_spacing {
                continue;
            }
            let h = Float::sqrt((min_spacing * min_spacing - d * d / 4.0).max(0.0));
            let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
            let perp = [-(b[1] - a[1]) / d, (b[0] - a[0]) / d];
            consider([mid[0] + h * perp[0], mid[1] + h * perp[1]]);
            consider([mid[0] - h * perp[0], mid[1] - h * perp[1]]);
        }
    }

    best.map(|(_, c)| c).ok_or(Error::AuxInfeasible)
}

fn aux_objective(x: &[Point2], r: &[Point2]) -> f64 {
    x.iter().zip(r).map(|(a, b)| sq_dist(*a, *b)).sum()
}

/// Cyclic single-point updates of the auxiliary vector until a sweep lowers
/// `sum_n ||x_n - r_n||^2` by less than `tol_inner * L0^2`, or `max_aux`
/// sweeps have run.
pub fn optimize_aux(
    x: &[Point2],
    aux: AuxiliaryVector,
    min_spacing: f64,
    config: &SolverConfig,
) -> Result<AuxiliaryVector> {
    if x.len() != aux.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            got: aux.len(),
        });
    }
    let mut r = aux.points;
    let mut others = Vec::with_capacity(r.len());
    let mut value = aux_objective(x, &r);
    let threshold = config.tol_inner * min_spacing * min_spacing;
    for _ in 0..config.max_aux {
        for n in 0..r.len() {
            others.clear();
            others.extend(r.iter().enumerate().filter(|(m, _)| *m != n).map(|(_, p)| *p));
            let candidate = solve_aux_point(x[n], &others, min_spacing)?;
            // keep the incumbent unless the exact solve strictly improves
            if sq_dist(x[n], candidate) < sq_dist(x[n], r[n]) {
                r[n] = candidate;
            }
        }
        let next = aux_objective(x, &r);
        let decrease = value - next;
        value = next;
        if decrease < threshold {
            break;
        }
    }
    Ok(AuxiliaryVector { points: r })
}
