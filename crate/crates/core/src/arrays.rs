//! Uniform planar array layouts used as fixed arrays and as optimizer
//! starting points.

use alloc::vec::Vec;

use crate::channel::{Apv, Point2};
use crate::error::Result;

/// Smallest `c` with `c * c >= n`.
pub fn ceil_sqrt(n: usize) -> usize {
    let mut c = 0;
    while c * c < n {
        c += 1;
    }
    c
}

/// First `n` points, row-major, of a grid with `ceil(sqrt(n))` columns and
/// the given spacing. The occupied rows are centered on the panel origin.
fn centered_grid(n: usize, spacing: f64) -> Vec<Point2> {
    let cols = ceil_sqrt(n).max(1);
    let rows = n.div_ceil(cols);
    let x0 = (cols as f64 - 1.0) / 2.0;
    let y0 = (rows as f64 - 1.0) / 2.0;
    (0..n)
        .map(|i| {
            let (r, c) = (i / cols, i % cols);
            [(c as f64 - x0) * spacing, (r as f64 - y0) * spacing]
        })
        .collect()
}

/// Fixed-position array: half-wavelength spaced UPA.
pub fn fpa_positions(n: usize, wavelength: f64) -> Result<Apv> {
    Apv::new(centered_grid(n, wavelength / 2.0))
}

/// Optimizer starting point: a UPA stretched over the whole panel, with
/// spacing `2L / (ceil(sqrt(N)) - 1)`. A single antenna sits at the origin.
pub fn upa_init_positions(n: usize, half_side: f64) -> Result<Apv> {
    let cols = ceil_sqrt(n);
    let spacing = if cols > 1 {
        2.0 * half_side / (cols as f64 - 1.0)
    } else {
        0.0
    };
    Apv::new(centered_grid(n, spacing))
}
