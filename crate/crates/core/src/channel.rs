//! Line-of-sight ground-to-air channel seen by a rotatable planar array of
//! movable antennas.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{inner_unchecked, norm_sqr};

pub type Point2 = [f64; 2];
pub type Point3 = [f64; 3];

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x % TAU;
    if y <= -PI {
        y += TAU;
    } else if y > PI {
        y -= TAU;
    }
    y
}

/// Panel rotation angles about the local X', Y' and Z' axes, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Rotation {
    phi: f64,
    psi: f64,
    theta: f64,
}

impl Rotation {
    pub const ZERO: Rotation = Rotation {
        phi: 0.0,
        psi: 0.0,
        theta: 0.0,
    };

    pub fn new(phi: f64, psi: f64, theta: f64) -> Self {
        Self {
            phi: wrap_angle(phi),
            psi: wrap_angle(psi),
            theta: wrap_angle(theta),
        }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.phi, self.psi, self.theta]
    }

    /// `U(a) = R_x(phi) R_y(psi) R_z(theta)`.
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        rotation_matrix(*self)
    }
}

/// Antenna position vector: panel-local `(x, y)` of every antenna, meters.
#[derive(Debug, Clone, PartialEq)]
pub struct Apv {
    points: Vec<Point2>,
}

impl Apv {
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("antenna count must be at least 1"));
        }
        Ok(Self { points })
    }

    pub fn from_flat(xs: &[f64]) -> Result<Self> {
        if !xs.len().is_multiple_of(2) {
            return Err(Error::Dimension {
                expected: xs.len() + 1,
                got: xs.len(),
            });
        }
        Self::new(xs.chunks_exact(2).map(|c| [c[0], c[1]]).collect())
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

    pub fn to_flat(&self) -> Vec<f64> {
        self.points.iter().flat_map(|p| p.iter().copied()).collect()
    }

    pub fn in_box(&self, half_side: f64) -> bool {
        self.points
            .iter()
            .all(|p| p.iter().all(|c| (-half_side..=half_side).contains(c)))
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        min_pairwise_distance(&self.points)
    }

    /// Largest shortfall of any pairwise distance below `min_spacing`; zero
    /// when the spacing constraint holds.
    pub fn spacing_violation(&self, min_spacing: f64) -> f64 {
        (min_spacing - self.min_pairwise_distance()).max(0.0)
    }

    /// Same array moved rigidly by `offset`.
    pub fn translated(&self, offset: Point2) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|p| [p[0] + offset[0], p[1] + offset[1]])
                .collect(),
        }
    }
}

pub(crate) fn min_pairwise_distance(points: &[Point2]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.min(dist2(*a, *b));
        }
    }
    best
}

#[inline]
pub(crate) fn dist2(a: Point2, b: Point2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Unit direction of arrival in panel-local coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveVector {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

impl WaveVector {
    pub fn norm(&self) -> f64 {
        (self.alpha * self.alpha + self.beta * self.beta + self.delta * self.delta).sqrt()
    }
}

/// Physical link parameters. Powers are in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    pub wavelength: f64,
    pub tx_power: f64,
    pub noise_power: f64,
    pub panel_half_side: f64,
    pub min_spacing: f64,
    pub antenna_count: usize,
}

impl PhysParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            (self.wavelength, "wavelength must be positive"),
            (self.tx_power, "transmit power must be positive"),
            (self.noise_power, "noise power must be positive"),
            (self.panel_half_side, "panel half side must be positive"),
            (self.min_spacing, "minimum spacing must be positive"),
        ];
        for (v, msg) in positive {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::InvalidParameter(msg));
            }
        }
        if self.antenna_count == 0 {
            return Err(Error::InvalidParameter("antenna count must be at least 1"));
        }
        if self.antenna_count >= 2 && self.min_spacing >= 2.0 * 2.0.sqrt() * self.panel_half_side {
            return Err(Error::InvalidParameter("minimum spacing exceeds the panel diagonal"));
        }
        Ok(())
    }

    /// `P / sigma^2`.
    pub fn snr_scale(&self) -> f64 {
        self.tx_power / self.noise_power
    }
}

/// dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10.0.powf((dbm - 30.0) / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn rotation_matrix(a: Rotation) -> [[f64; 3]; 3] {
    let (sf, cf) = a.phi.sin_cos();
    let (sp, cp) = a.psi.sin_cos();
    let (st, ct) = a.theta.sin_cos();
    let rx = [[1.0, 0.0, 0.0], [0.0, cf, -sf], [0.0, sf, cf]];
    let ry = [[cp, 0.0, sp], [0.0, 1.0, 0.0], [-sp, 0.0, cp]];
    let rz = [[ct, -st, 0.0], [st, ct, 0.0], [0.0, 0.0, 1.0]];
    matmul3(&matmul3(&rx, &ry), &rz)
}

/// `[dU/dphi, dU/dpsi, dU/dtheta]` of `rotation_matrix(a)`.
pub(crate) fn rotation_matrix_derivatives(a: Rotation) -> [[[f64; 3]; 3]; 3] {
    let (sf, cf) = a.phi.sin_cos();
    let (sp, cp) = a.psi.sin_cos();
    let (st, ct) = a.theta.sin_cos();
    let rx = [[1.0, 0.0, 0.0], [0.0, cf, -sf], [0.0, sf, cf]];
    let ry = [[cp, 0.0, sp], [0.0, 1.0, 0.0], [-sp, 0.0, cp]];
    let rz = [[ct, -st, 0.0], [st, ct, 0.0], [0.0, 0.0, 1.0]];
    let drx = [[0.0, 0.0, 0.0], [0.0, -sf, -cf], [0.0, cf, -sf]];
    let dry = [[-sp, 0.0, cp], [0.0, 0.0, 0.0], [-cp, 0.0, -sp]];
    let drz = [[-st, -ct, 0.0], [ct, -st, 0.0], [0.0, 0.0, 0.0]];
    [
        matmul3(&matmul3(&drx, &ry), &rz),
        matmul3(&matmul3(&rx, &dry), &rz),
        matmul3(&matmul3(&rx, &ry), &drz),
    ]
}

fn matmul3(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// `U^T v`.
#[inline]
pub(crate) fn rotate_into_panel(u: &[[f64; 3]; 3], v: Point3) -> Point3 {
    [
        u[0][0] * v[0] + u[1][0] * v[1] + u[2][0] * v[2],
        u[0][1] * v[0] + u[1][1] * v[1] + u[2][1] * v[2],
        u[0][2] * v[0] + u[1][2] * v[1] + u[2][2] * v[2],
    ]
}

fn sub3(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn distance3(a: Point3, b: Point3) -> f64 {
    let d = sub3(a, b);
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

/// Direction from BS `bs` to the UAV at `uav`, expressed in the rotated
/// panel frame.
pub fn wave_vector(a: Rotation, bs: Point3, uav: Point3) -> Result<WaveVector> {
    let d = sub3(uav, bs);
    let len = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if len == 0.0 {
        return Err(Error::DegenerateGeometry);
    }
    let v = rotate_into_panel(&rotation_matrix(a), [d[0] / len, d[1] / len, d[2] / len]);
    Ok(WaveVector {
        alpha: v[0],
        beta: v[1],
        delta: v[2],
    })
}

/// Array response `exp(j 2pi/lambda (x_n alpha + y_n beta))` per antenna.
pub fn steering_vector(apv: &Apv, v: WaveVector, wavelength: f64) -> Vec<Complex64> {
    let k = TAU / wavelength;
    apv.points
        .iter()
        .map(|p| Complex64::cis(k * (p[0] * v.alpha + p[1] * v.beta)))
        .collect()
}

/// Free-space LoS channel `lambda/(4 pi d) e^{-j 2pi d/lambda} g`.
pub fn channel_vector(bs: Point3, uav: Point3, g: &[Complex64], wavelength: f64) -> Result<Vec<Complex64>> {
    let d = distance3(uav, bs);
    if d == 0.0 {
        return Err(Error::DegenerateGeometry);
    }
    let common = link_gain(d, wavelength);
    Ok(g.iter().map(|x| common * x).collect())
}

/// Complex path gain shared by every antenna of a LoS link of length `d`.
#[inline]
pub(crate) fn link_gain(d: f64, wavelength: f64) -> Complex64 {
    Complex64::from_polar(wavelength / (4.0 * PI * d), -TAU * d / wavelength)
}

/// Output SINR of receive beamformer `w` for the desired channel `h_k`.
pub fn sinr<V: AsRef<[Complex64]>>(
    w: &[Complex64],
    h_k: &[Complex64],
    interferers: &[V],
    tx_power: f64,
    noise_power: f64,
) -> Result<f64> {
    let n = w.len();
    if h_k.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: h_k.len(),
        });
    }
    for h in interferers {
        if h.as_ref().len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: h.as_ref().len(),
            });
        }
    }
    let w_norm = norm_sqr(w);
    if w_norm == 0.0 {
        return Err(Error::ZeroBeamformer);
    }
    Ok(sinr_unchecked(w, w_norm, h_k, interferers, tx_power, noise_power))
}

#[inline]
pub(crate) fn sinr_unchecked<V: AsRef<[Complex64]>>(
    w: &[Complex64],
    w_norm: f64,
    h_k: &[Complex64],
    interferers: &[V],
    tx_power: f64,
    noise_power: f64,
) -> f64 {
    let signal = inner_unchecked(w, h_k).norm_sqr() * tx_power;
    let interference: f64 = interferers
        .iter()
        .map(|h| inner_unchecked(w, h.as_ref()).norm_sqr())
        .sum::<f64>()
        * tx_power;
    signal / (interference + w_norm * noise_power)
}
