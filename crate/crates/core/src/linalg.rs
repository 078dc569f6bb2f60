//! Small dense complex linear algebra.
//!
//! Array sizes here never exceed a few tens of elements, so everything is
//! dense and row-major.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.cols, x.len())?;
        Ok(self
            .data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

impl core::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}

/// `I_N + scale * sum_i v_i v_i^H`.
///
/// Only the upper triangle is accumulated; the lower triangle is filled by
/// conjugation so the result is exactly Hermitian.
pub fn hermitian_rank1_sum<V: AsRef<[Complex64]>>(n: usize, vectors: &[V], scale: f64) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::identity(n);
    for v in vectors {
        let v = v.as_ref();
        check_len(n, v.len())?;
        for i in 0..n {
            let vi = v[i] * scale;
            for (j, vj) in v.iter().enumerate().skip(i) {
                m.data[i * n + j] += vi * vj.conj();
            }
        }
    }
    for i in 0..n {
        m.data[i * n + i].im = 0.0;
        for j in (i + 1)..n {
            m.data[j * n + i] = m.data[i * n + j].conj();
        }
    }
    Ok(m)
}

/// Solves `A x = b` for Hermitian positive definite `A` by Cholesky
/// factorization `A = L L^H`.
pub fn solve_hpd(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::Dimension {
            expected: a.rows,
            got: a.cols,
        });
    }
    let n = a.rows;
    check_len(n, b.len())?;

    // lower-triangular factor, row-major
    let mut l = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let d = Float::sqrt(d);
        l[j * n + j] = Complex64::new(d, 0.0);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s / d;
        }
    }

    // L y = b
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i].re;
    }
    // L^H x = y
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[k * n + i].conj() * y[k];
        }
        y[i] = s / l[i * n + i].re;
    }
    Ok(y)
}

/// `sum_n conj(a_n) b_n`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Result<Complex64> {
    check_len(a.len(), b.len())?;
    Ok(inner_unchecked(a, b))
}

#[inline]
pub(crate) fn inner_unchecked(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    /// Random HPD matrix `G G^H + I`.
    fn random_hpd(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let g: Vec<Vec<Complex64>> = (0..n).map(|_| random_vec(rng, n)).collect();
        let mut a = ComplexMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    a[(i, j)] += g[i][k] * g[j][k].conj();
                }
            }
        }
        a
    }

    fn residual_ratio(a: &ComplexMatrix, x: &[Complex64], b: &[Complex64]) -> f64 {
        let ax = a.mul_vec(x).unwrap();
        let r: Vec<_> = ax.iter().zip(b).map(|(p, q)| p - q).collect();
        Float::sqrt(norm_sqr(&r) / norm_sqr(b))
    }

    #[test]
    fn rank1_sum_empty_is_identity() {
        let m = hermitian_rank1_sum::<Vec<Complex64>>(3, &[], 5.0).unwrap();
        assert_eq!(m, ComplexMatrix::identity(3));
    }

    #[test]
    fn rank1_sum_basis_vector() {
        let e1 = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let m = hermitian_rank1_sum(3, &[e1], 1.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = match (i, j) {
                    (0, 0) => 2.0,
                    (a, b) if a == b => 1.0,
                    _ => 0.0,
                };
                assert_eq!(m[(i, j)], c(expected, 0.0));
            }
        }
    }

    #[test]
    fn rank1_sum_matches_naive_accumulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let vs = [random_vec(&mut rng, 3), random_vec(&mut rng, 3)];
        let m = hermitian_rank1_sum(3, &vs, 2.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut expected = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
                for v in &vs {
                    expected += v[i] * v[j].conj() * 2.0;
                }
                assert!((m[(i, j)] - expected).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn rank1_sum_rejects_mismatched_lengths() {
        let vs = [vec![c(1.0, 0.0); 3], vec![c(1.0, 0.0); 2]];
        assert_eq!(
            hermitian_rank1_sum(3, &vs, 1.0),
            Err(Error::Dimension { expected: 3, got: 2 })
        );
    }

    #[test]
    fn solve_identity_and_scalar_systems() {
        let b = vec![c(1.5, -2.0), c(0.0, 3.0)];
        assert_eq!(solve_hpd(&ComplexMatrix::identity(2), &b).unwrap(), b);

        let mut a = ComplexMatrix::identity(2);
        a[(0, 0)] = c(2.0, 0.0);
        a[(1, 1)] = c(2.0, 0.0);
        let x = solve_hpd(&a, &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        for v in x {
            assert!((v - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn solve_random_4x4_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_hpd(&mut rng, 4);
        let b = random_vec(&mut rng, 4);
        let x = solve_hpd(&a, &b).unwrap();
        assert!(residual_ratio(&a, &x, &b) <= 1e-10);
    }

    #[test]
    fn solve_detects_indefinite_matrix() {
        let mut a = ComplexMatrix::identity(2);
        a[(1, 1)] = c(-1.0, 0.0);
        assert!(matches!(
            solve_hpd(&a, &[c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::NotPositiveDefinite { pivot: 1, .. })
        ));
    }

    #[test]
    fn inner_products() {
        let ones = vec![c(1.0, 0.0); 5];
        assert_eq!(inner(&ones, &ones).unwrap(), c(5.0, 0.0));
        let e1 = [c(1.0, 0.0), c(0.0, 0.0)];
        let e2 = [c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(inner(&e1, &e2).unwrap(), c(0.0, 0.0));
        assert!(inner(&e1, &ones).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_vec(&mut rng, 6);
        let b = random_vec(&mut rng, 6);
        let mut expected = c(0.0, 0.0);
        for n in 0..6 {
            expected += a[n].conj() * b[n];
        }
        assert!((inner(&a, &b).unwrap() - expected).norm() < 1e-14);
    }

    proptest! {
        #[test]
        fn rank1_sum_is_hermitian_and_dominates_identity(seed in any::<u64>(), n in 1usize..8, k in 0usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vs: Vec<_> = (0..k).map(|_| random_vec(&mut rng, n)).collect();
            let m = hermitian_rank1_sum(n, &vs, 3.0).unwrap();
            prop_assert_eq!(m.adjoint(), m.clone());
            let x = random_vec(&mut rng, n);
            let mx = m.mul_vec(&x).unwrap();
            let q = inner(&x, &mx).unwrap();
            prop_assert!(q.re >= norm_sqr(&x) * (1.0 - 1e-12));
        }

        #[test]
        fn solve_residual_bound(seed in any::<u64>(), n in 1usize..=16) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_hpd(&mut rng, n);
            let b = random_vec(&mut rng, n);
            let x = solve_hpd(&a, &b).unwrap();
            prop_assert!(residual_ratio(&a, &x, &b) <= 1e-10);
        }

        #[test]
        fn self_inner_is_real_nonnegative(seed in any::<u64>(), n in 0usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_vec(&mut rng, n);
            let q = inner(&a, &a).unwrap();
            prop_assert_eq!(q.im, 0.0);
            prop_assert!(q.re >= 0.0);
        }
    }
}
