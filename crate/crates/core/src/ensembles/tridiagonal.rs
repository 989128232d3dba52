//! Bidiagonal models of the real and complex Wishart ensembles.
//!
//! For a Gaussian M×N matrix W, Householder bidiagonalization leaves an
//! upper bidiagonal B with independent entries d_i ~ χ_{β(M-i)}/√β and
//! e_i ~ χ_{β(N-1-i)}/√β, and W*W has the spectrum of BᵀB. Dividing by N
//! gives the X*X normalization.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{domain, Result};
use crate::linalg::{bidiagonal_largest_sv, bidiagonal_singular_values};
use crate::tracy_widom::Beta;

// χ_k/√β = sqrt(Gamma(k/2, 2/β)) with k = β·dof
fn scaled_chi<R: Rng + ?Sized>(dof: usize, beta: f64, rng: &mut R) -> f64 {
    if dof == 0 {
        return 0.0;
    }
    let g = Gamma::new(0.5 * beta * dof as f64, 2.0 / beta).expect("positive shape");
    g.sample(rng).sqrt()
}

fn check(n_cols: usize, m_rows: usize) -> Result<()> {
    if n_cols == 0 || m_rows < n_cols {
        return domain(format!("need 1 <= N <= M, got N = {n_cols}, M = {m_rows}"));
    }
    Ok(())
}

/// Draws the bidiagonal (d, e) for W with M rows and N columns.
pub fn laguerre_bidiagonal<R: Rng + ?Sized>(
    n_cols: usize,
    m_rows: usize,
    beta: Beta,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let b = beta.as_f64();
    let mut d = Vec::with_capacity(n_cols);
    let mut e = Vec::with_capacity(n_cols.saturating_sub(1));
    for i in 0..n_cols {
        d.push(scaled_chi(m_rows - i, b, rng));
        if i + 1 < n_cols {
            e.push(scaled_chi(n_cols - 1 - i, b, rng));
        }
    }
    (d, e)
}

/// Ascending eigenvalues of X*X for Gaussian X (β = 1 real, β = 2 complex).
pub fn laguerre_tridiagonal_eigs<R: Rng + ?Sized>(
    n_cols: usize,
    m_rows: usize,
    beta: Beta,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check(n_cols, m_rows)?;
    let (d, e) = laguerre_bidiagonal(n_cols, m_rows, beta, rng);
    let s = bidiagonal_singular_values(d, e)?;
    let scale = 1.0 / n_cols as f64;
    Ok(s.iter().rev().map(|v| v * v * scale).collect())
}

/// Largest eigenvalue of X*X for Gaussian X, in O(N) memory and
/// O(N·log(1/ε)) time.
pub fn laguerre_tridiagonal_largest<R: Rng + ?Sized>(
    n_cols: usize,
    m_rows: usize,
    beta: Beta,
    rng: &mut R,
) -> Result<f64> {
    check(n_cols, m_rows)?;
    let (d, e) = laguerre_bidiagonal(n_cols, m_rows, beta, rng);
    let s = bidiagonal_largest_sv(&d, &e);
    Ok(s * s / n_cols as f64)
}
