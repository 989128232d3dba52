//! Spectra of X*X.

use super::matrix::DataMatrix;
use crate::error::Result;
use crate::linalg::{
    bidiagonal_largest_sv, bidiagonal_singular_values, bidiagonalize, gram, symmetric_eigenvalues,
};

/// Ascending eigenvalues of X*X as squared singular values of X
/// (Golub–Kahan bidiagonalization, then bidiagonal QR).
pub fn gram_eigenvalues(x: &DataMatrix) -> Result<Vec<f64>> {
    x.check_finite()?;
    let (m, n, mut a) = x.real_embedding();
    let (d, e) = bidiagonalize(m, n, &mut a);
    let s = bidiagonal_singular_values(d, e)?;
    let mut ev: Vec<f64> = s.iter().rev().map(|v| v * v).collect();
    if x.is_complex() {
        ev = pair_average(&ev);
    }
    Ok(ev)
}

/// Largest eigenvalue of X*X on the SVD path, by bisection on the bidiagonal.
pub fn largest_gram_eigenvalue(x: &DataMatrix) -> Result<f64> {
    x.check_finite()?;
    let (m, n, mut a) = x.real_embedding();
    let (d, e) = bidiagonalize(m, n, &mut a);
    let s = bidiagonal_largest_sv(&d, &e);
    Ok(s * s)
}

/// Ascending eigenvalues of X*X from the explicitly formed Gram matrix.
/// Faster than [`gram_eigenvalues`] and adequate for spectral functionals
/// at the upper edge, where X*X is well conditioned.
pub fn gram_eigenvalues_fast(x: &DataMatrix) -> Result<Vec<f64>> {
    x.check_finite()?;
    let (m, n, a) = x.real_embedding();
    let g = gram(m, n, &a);
    let mut ev = symmetric_eigenvalues(n, g)?;
    for v in ev.iter_mut() {
        *v = v.max(0.0);
    }
    if x.is_complex() {
        ev = pair_average(&ev);
    }
    Ok(ev)
}

// The real embedding doubles every eigenvalue.
fn pair_average(ev: &[f64]) -> Vec<f64> {
    ev.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}
