//! Spectral functionals of X*X: the Stieltjes transform m_N and smoothed
//! eigenvalue counts.
//!
//! A spectrum is held either as eigenvalues or as a symmetric tridiagonal
//! matrix similar to X*X. In the second form everything is read off the
//! LDLᵀ pivots f_i of T - z: m_N = -(1/N) Σ f_i'/f_i, and since every pivot
//! lies in the lower half plane for Im z > 0, Σ arg f_i = Σ_j arg(λ_j - z).

use std::f64::consts::PI;

use rand::Rng;

use crate::ensembles::{laguerre_bidiagonal, DataMatrix};
use crate::error::{domain, Result};
use crate::linalg::{gram, tridiagonal_eigenvalues, tridiagonalize};
use crate::tracy_widom::Beta;
use crate::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    Eigenvalues(Vec<f64>),
    /// Diagonal and squared off-diagonal.
    Tridiagonal {
        diag: Vec<f64>,
        off2: Vec<f64>,
    },
}

impl Spectrum {
    /// Tridiagonal form of a dense real or complex X*X (Gram route).
    pub fn from_matrix(x: &DataMatrix) -> Result<Self> {
        x.check_finite()?;
        if x.is_complex() {
            return Ok(Self::Eigenvalues(crate::ensembles::gram_eigenvalues_fast(
                x,
            )?));
        }
        let (m, n, a) = x.real_embedding();
        let mut g = gram(m, n, &a);
        let (diag, off) = tridiagonalize(n, &mut g);
        Ok(Self::Tridiagonal {
            diag,
            off2: off.iter().map(|v| v * v).collect(),
        })
    }

    /// Exact-in-law Gaussian spectrum from the bidiagonal model.
    pub fn gaussian<R: Rng + ?Sized>(
        n_cols: usize,
        m_rows: usize,
        beta: Beta,
        rng: &mut R,
    ) -> Result<Self> {
        if n_cols == 0 || m_rows < n_cols {
            return domain(format!("need 1 <= N <= M, got N = {n_cols}, M = {m_rows}"));
        }
        let (d, e) = laguerre_bidiagonal(n_cols, m_rows, beta, rng);
        let s = 1.0 / n_cols as f64;
        let diag = (0..n_cols)
            .map(|i| (d[i] * d[i] + if i > 0 { e[i - 1] * e[i - 1] } else { 0.0 }) * s)
            .collect();
        let off2 = (0..n_cols - 1).map(|i| (d[i] * e[i] * s).powi(2)).collect();
        Ok(Self::Tridiagonal { diag, off2 })
    }

    pub fn n(&self) -> usize {
        match self {
            Self::Eigenvalues(v) => v.len(),
            Self::Tridiagonal { diag, .. } => diag.len(),
        }
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        match self {
            Self::Eigenvalues(v) => Ok(v.clone()),
            Self::Tridiagonal { diag, off2 } => {
                let off: Vec<f64> = off2.iter().map(|v| v.sqrt()).collect();
                tridiagonal_eigenvalues(diag.clone(), &off)
            }
        }
    }

    /// m_N(z) = (1/N) Tr (X*X - z)^{-1}, Im z > 0.
    pub fn stieltjes(&self, z: Complex64) -> Complex64 {
        let n = self.n() as f64;
        match self {
            Self::Eigenvalues(v) => v.iter().map(|&l| 1.0 / (l - z)).sum::<Complex64>() / n,
            Self::Tridiagonal { diag, off2 } => {
                let mut f = diag[0] - z;
                let mut df = Complex64::new(-1.0, 0.0);
                let mut acc = df / f;
                for i in 1..diag.len() {
                    let r = off2[i - 1] / f;
                    let ndf = -1.0 + r * df / f;
                    f = diag[i] - z - r;
                    df = ndf;
                    acc += df / f;
                }
                -acc / n
            }
        }
    }

    /// Σ_j arg(λ_j - z) ∈ (-Nπ, 0) for Im z > 0.
    pub fn arg_sum(&self, z: Complex64) -> f64 {
        match self {
            Self::Eigenvalues(v) => v.iter().map(|&l| (l - z).arg()).sum(),
            Self::Tridiagonal { diag, off2 } => {
                let mut f = diag[0] - z;
                let mut acc = f.arg();
                for i in 1..diag.len() {
                    f = diag[i] - z - off2[i - 1] / f;
                    acc += f.arg();
                }
                acc
            }
        }
    }

    /// (1/π) Σ_j [arctan((e_high - λ_j)/η) - arctan((e_low - λ_j)/η)].
    pub fn window_count(&self, e_low: f64, e_high: f64, eta: f64) -> f64 {
        match self {
            Self::Eigenvalues(v) => {
                v.iter()
                    .map(|&l| ((e_high - l) / eta).atan() - ((e_low - l) / eta).atan())
                    .sum::<f64>()
                    / PI
            }
            Self::Tridiagonal { .. } => {
                let a = self.arg_sum(Complex64::new(e_low, eta));
                let b = self.arg_sum(Complex64::new(e_high, eta));
                (a - b) / PI
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_and_eigen_forms_agree() {
        let diag = vec![1.0, 2.0, 0.5, 3.0];
        let off2 = vec![0.25, 1.0, 0.04];
        let t = Spectrum::Tridiagonal {
            diag: diag.clone(),
            off2: off2.clone(),
        };
        let e = Spectrum::Eigenvalues(t.eigenvalues().unwrap());
        let z = Complex64::new(1.7, 0.01);
        assert!((t.stieltjes(z) - e.stieltjes(z)).norm() < 1e-11);
        assert!((t.arg_sum(z) - e.arg_sum(z)).abs() < 1e-12);
        assert!((t.window_count(0.9, 2.2, 1e-3) - e.window_count(0.9, 2.2, 1e-3)).abs() < 1e-12);
    }
}
