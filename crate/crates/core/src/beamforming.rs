//! MMSE receive beamforming.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::channel::{sinr_unchecked, Apv, Rotation};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_rank1_sum, norm_sqr, solve_hpd, ComplexMatrix};
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerResult {
    pub w: Vec<Complex64>,
    pub sinr_linear: f64,
}

fn check_inputs<V: AsRef<[Complex64]>>(h_k: &[Complex64], interferers: &[V], noise_power: f64) -> Result<()> {
    if noise_power.is_nan() || noise_power <= 0.0 {
        return Err(Error::InvalidParameter("noise power must be positive"));
    }
    for h in interferers {
        if h.as_ref().len() != h_k.len() {
            return Err(Error::Dimension {
                expected: h_k.len(),
                got: h.as_ref().len(),
            });
        }
    }
    Ok(())
}

fn mmse_system<V: AsRef<[Complex64]>>(
    h_k: &[Complex64],
    interferers: &[V],
    tx_power: f64,
    noise_power: f64,
) -> Result<ComplexMatrix> {
    check_inputs(h_k, interferers, noise_power)?;
    let mut links: Vec<&[Complex64]> = Vec::with_capacity(interferers.len() + 1);
    links.extend(interferers.iter().map(|h| h.as_ref()));
    links.push(h_k);
    hermitian_rank1_sum(h_k.len(), &links, tx_power / noise_power)
}

/// `w = (I + P/sigma^2 sum_{i in J u {k}} h_i h_i^H)^{-1} h_k` and the SINR it
/// achieves.
pub fn mmse_weights<V: AsRef<[Complex64]>>(
    h_k: &[Complex64],
    interferers: &[V],
    tx_power: f64,
    noise_power: f64,
) -> Result<BeamformerResult> {
    let a = mmse_system(h_k, interferers, tx_power, noise_power)?;
    let w = solve_hpd(&a, h_k)?;
    let w_norm = norm_sqr(&w);
    let sinr_linear = if w_norm == 0.0 {
        0.0
    } else {
        sinr_unchecked(&w, w_norm, h_k, interferers, tx_power, noise_power)
    };
    Ok(BeamformerResult { w, sinr_linear })
}

/// The inverse `B` of the MMSE system matrix, column by column. Diagnostic
/// only; the solver never forms it.
pub fn mmse_b_matrix<V: AsRef<[Complex64]>>(
    h_k: &[Complex64],
    interferers: &[V],
    tx_power: f64,
    noise_power: f64,
) -> Result<ComplexMatrix> {
    let a = mmse_system(h_k, interferers, tx_power, noise_power)?;
    let n = h_k.len();
    let mut b = ComplexMatrix::zeros(n, n);
    let mut e = alloc::vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        e.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        e[j] = Complex64::new(1.0, 0.0);
        let col = solve_hpd(&a, &e)?;
        for (i, x) in col.into_iter().enumerate() {
            b[(i, j)] = x;
        }
    }
    Ok(b)
}

/// SINR of the MMSE beamformer when BS `serving` is associated and the
/// array is in state `(apv, a)`.
pub fn objective_sinr(apv: &Apv, a: Rotation, serving: usize, scenario: &Scenario) -> Result<f64> {
    scenario.links(serving)?.sinr(apv, a)
}
