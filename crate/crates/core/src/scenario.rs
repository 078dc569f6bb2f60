//! One random draw of the downlink geometry, and the per-candidate link set
//! used to evaluate SINR quickly inside the optimizer.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;

use crate::beamforming::mmse_weights;
use crate::channel::{
    distance3, link_gain, rotate_into_panel, rotation_matrix, rotation_matrix_derivatives, Apv, PhysParams, Point2,
    Point3, Rotation,
};
use crate::error::{Error, Result};
use crate::grid::{CellLayout, OccupancyDraw};
use crate::linalg::{hermitian_rank1_sum, inner_unchecked, solve_hpd};

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub uav: Point3,
    pub bs_positions: Vec<Point3>,
    /// Occupied (interfering) BS indices.
    pub occupied: Vec<usize>,
    /// Candidate serving BS indices.
    pub available: Vec<usize>,
    pub nearest: usize,
    pub phys: PhysParams,
}

impl Scenario {
    pub fn new(layout: &CellLayout, uav: Point3, draw: OccupancyDraw, phys: PhysParams) -> Self {
        Self {
            uav,
            bs_positions: layout.positions().to_vec(),
            occupied: draw.occupied,
            available: draw.available,
            nearest: draw.nearest,
            phys,
        }
    }

    pub fn distance_to(&self, bs: usize) -> Result<f64> {
        let p = self.bs_position(bs)?;
        Ok(distance3(p, self.uav))
    }

    pub fn bs_position(&self, bs: usize) -> Result<Point3> {
        self.bs_positions.get(bs).copied().ok_or(Error::Index {
            index: bs,
            len: self.bs_positions.len(),
        })
    }

    /// Available BS closest to the UAV, lowest index on ties.
    pub fn nearest_available(&self) -> Result<usize> {
        let mut best: Option<(usize, f64)> = None;
        for &k in &self.available {
            let d = self.distance_to(k)?;
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((k, d));
            }
        }
        best.map(|(k, _)| k).ok_or(Error::NoCandidates)
    }

    /// Available BSs ordered by distance (index breaks ties), truncated to
    /// `limit` when given.
    pub fn candidates(&self, limit: Option<usize>) -> Result<Vec<usize>> {
        let mut ks: Vec<(f64, usize)> = self
            .available
            .iter()
            .map(|&k| self.distance_to(k).map(|d| (d, k)))
            .collect::<Result<_>>()?;
        ks.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if let Some(c) = limit {
            ks.truncate(c.max(1));
        }
        let mut out: Vec<usize> = ks.into_iter().map(|(_, k)| k).collect();
        out.sort_unstable();
        Ok(out)
    }

    pub fn links(&self, serving: usize) -> Result<LinkSet> {
        LinkSet::new(self, serving)
    }
}

/// Geometry of the serving link (entry 0) and every interfering link for a
/// fixed serving BS. Only the panel-frame projection depends on the array
/// state, so everything else is computed once.
#[derive(Debug, Clone)]
pub struct LinkSet {
    serving: usize,
    /// Unit vectors from BS to UAV in ground coordinates.
    directions: Vec<Point3>,
    gains: Vec<Complex64>,
    phys: PhysParams,
}

impl LinkSet {
    pub fn new(scenario: &Scenario, serving: usize) -> Result<Self> {
        let count = 1 + scenario.occupied.len();
        let mut directions = Vec::with_capacity(count);
        let mut gains = Vec::with_capacity(count);
        for &bs in core::iter::once(&serving).chain(&scenario.occupied) {
            let p = scenario.bs_position(bs)?;
            let d = distance3(p, scenario.uav);
            if d == 0.0 {
                return Err(Error::DegenerateGeometry);
            }
            let u = scenario.uav;
            directions.push([(u[0] - p[0]) / d, (u[1] - p[1]) / d, (u[2] - p[2]) / d]);
            gains.push(link_gain(d, scenario.phys.wavelength));
        }
        Ok(Self {
            serving,
            directions,
            gains,
            phys: scenario.phys,
        })
    }

    pub fn serving(&self) -> usize {
        self.serving
    }

    pub fn phys(&self) -> &PhysParams {
        &self.phys
    }

    /// `2pi/lambda * (alpha, beta)` of every link under rotation `a`.
    pub fn phase_slopes(&self, a: Rotation) -> Vec<Point2> {
        let u = rotation_matrix(a);
        let k = TAU / self.phys.wavelength;
        self.directions
            .iter()
            .map(|d| {
                let v = rotate_into_panel(&u, *d);
                [k * v[0], k * v[1]]
            })
            .collect()
    }

    /// Channel vectors `h_m` for antenna positions `points`; entry 0 is the
    /// serving BS.
    pub fn channels(&self, slopes: &[Point2], points: &[Point2]) -> Vec<Vec<Complex64>> {
        slopes
            .iter()
            .zip(&self.gains)
            .map(|(s, g)| {
                points
                    .iter()
                    .map(|p| g * Complex64::cis(s[0] * p[0] + s[1] * p[1]))
                    .collect()
            })
            .collect()
    }

    /// MMSE output SINR for the given phase slopes and antenna positions.
    pub fn sinr_at(&self, slopes: &[Point2], points: &[Point2]) -> Result<f64> {
        let h = self.channels(slopes, points);
        let (desired, interferers) = h.split_first().expect("serving link is always present");
        Ok(mmse_weights(desired, interferers, self.phys.tx_power, self.phys.noise_power)?.sinr_linear)
    }

    fn quadratic_form(&self, slopes: &[Point2], points: &[Point2]) -> Result<QuadraticForm> {
        let s = self.phys.snr_scale();
        let h = self.channels(slopes, points);
        let (desired, interferers) = h.split_first().expect("serving link is always present");
        let q = hermitian_rank1_sum(points.len(), interferers, s)?;
        let u = solve_hpd(&q, desired)?;
        let gamma = s * inner_unchecked(desired, &u).re;
        let t = interferers.iter().map(|hi| inner_unchecked(hi, &u)).collect();
        Ok(QuadraticForm { s, gamma, h, u, t })
    }

    /// SINR in its quadratic form `s h_k^H (I + s sum_J h_i h_i^H)^{-1} h_k`
    /// with `s = P / sigma^2`, and its gradient with respect to the flattened
    /// positions `[x_1, y_1, x_2, y_2, ...]`.
    pub fn sinr_gradient_at(&self, slopes: &[Point2], points: &[Point2]) -> Result<(f64, Vec<f64>)> {
        let qf = self.quadratic_form(slopes, points)?;
        let mut grad = Vec::with_capacity(2 * points.len());
        for n in 0..points.len() {
            let w = qf.link_weights(n);
            for d in 0..2 {
                grad.push(w.iter().zip(slopes).map(|(wi, sl)| wi * sl[d]).sum());
            }
        }
        Ok((qf.gamma, grad))
    }

    /// SINR and its gradient with respect to the rotation angles
    /// `[phi, psi, theta]`.
    pub fn sinr_rotation_gradient(&self, a: Rotation, points: &[Point2]) -> Result<(f64, [f64; 3])> {
        let slopes = self.phase_slopes(a);
        let qf = self.quadratic_form(&slopes, points)?;
        // d gamma / d slope_i = sum_n w_i(n) x_n
        let mut by_slope = vec![[0.0; 2]; slopes.len()];
        for (n, p) in points.iter().enumerate() {
            for (acc, w) in by_slope.iter_mut().zip(qf.link_weights(n)) {
                acc[0] += w * p[0];
                acc[1] += w * p[1];
            }
        }
        let k = TAU / self.phys.wavelength;
        let mut grad = [0.0; 3];
        for (g, du) in grad.iter_mut().zip(rotation_matrix_derivatives(a)) {
            *g = self
                .directions
                .iter()
                .zip(&by_slope)
                .map(|(d, b)| {
                    let v = rotate_into_panel(&du, *d);
                    k * (v[0] * b[0] + v[1] * b[1])
                })
                .sum();
        }
        Ok((qf.gamma, grad))
    }

    pub fn sinr(&self, apv: &Apv, a: Rotation) -> Result<f64> {
        self.sinr_at(&self.phase_slopes(a), apv.points())
    }
}

/// Pieces of `gamma = s h_k^H u`, `u = (I + s sum_J h_i h_i^H)^{-1} h_k`.
struct QuadraticForm {
    s: f64,
    gamma: f64,
    /// Channels, serving link first.
    h: Vec<Vec<Complex64>>,
    u: Vec<Complex64>,
    /// `h_i^H u` per interferer.
    t: Vec<Complex64>,
}

impl QuadraticForm {
    /// Derivative of `gamma` with respect to the phase of `h_i[n]`, per
    /// link `i`. A phase change `dp` on `h_i[n]` changes `gamma` by
    /// `w_i(n) dp`.
    fn link_weights(&self, n: usize) -> Vec<f64> {
        let ju = Complex64::new(0.0, 1.0) * self.u[n].conj();
        let mut w = Vec::with_capacity(self.h.len());
        w.push(2.0 * self.s * (ju * self.h[0][n]).re);
        for (hi, ti) in self.h[1..].iter().zip(&self.t) {
            w.push(-2.0 * self.s * self.s * (ju * hi[n] * ti).re);
        }
        w
    }
}
