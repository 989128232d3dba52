//! Resolvents of X*X and XX*, the linearized Green function G = H(z)^{-1}
//! and the Ward and local-law diagnostics built on it.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::ensembles::{gram_eigenvalues, DataMatrix};
use crate::error::{domain, Error, Result};
use crate::mp_law::{control_psi, stieltjes_mp};
use crate::Complex64;

/// Below this |z| (or above the upper constant) the Ward inequalities are
/// not certified and the check is skipped.
pub const WARD_Z_MIN: f64 = 0.05;
pub const WARD_Z_MAX: f64 = 1e3;

fn check_upper(z: Complex64) -> Result<()> {
    if !(z.im > 0.0) {
        return domain(format!("need Im z > 0, got {z}"));
    }
    Ok(())
}

/// (m_N(z), 𝔪(z)) from the eigenvalues of X*X; XX* has the same spectrum
/// plus M - N zeros.
pub fn resolvent_trace(x: &DataMatrix, z: Complex64) -> Result<(Complex64, Complex64)> {
    check_upper(z)?;
    let eigs = gram_eigenvalues(x)?;
    let (n, m) = (x.n() as f64, x.m() as f64);
    let s: Complex64 = eigs.iter().map(|&l| 1.0 / (l - z)).sum();
    Ok((s / n, (s - (m - n) / z) / m))
}

pub(crate) fn to_dmatrix(x: &DataMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(x.m(), x.n(), |i, j| x.get(i, j))
}

/// H(z) = [[-z I_N, X*], [X, -I_M]].
pub fn linearization(x: &DataMatrix, z: Complex64) -> DMatrix<Complex64> {
    let (m, n) = (x.m(), x.n());
    let xm = to_dmatrix(x);
    let mut h = DMatrix::zeros(n + m, n + m);
    for i in 0..n {
        h[(i, i)] = -z;
    }
    for i in 0..m {
        h[(n + i, n + i)] = Complex64::new(-1.0, 0.0);
    }
    h.view_mut((n, 0), (m, n)).copy_from(&xm);
    h.view_mut((0, n), (n, m)).copy_from(&xm.adjoint());
    h
}

fn inverse(a: DMatrix<Complex64>, what: &str) -> Result<DMatrix<Complex64>> {
    let inv = a
        .try_inverse()
        .ok_or_else(|| Error::Conditioning(format!("{what} is numerically singular")))?;
    if inv.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Conditioning(format!("{what}: non-finite inverse")));
    }
    Ok(inv)
}

/// Blocks of G(z): R = (X*X - z)^{-1}, X*𝓡, XR and z𝓡.
#[derive(Debug, Clone)]
pub struct GreenFunction {
    pub z: Complex64,
    pub r_block: DMatrix<Complex64>,
    /// 𝓡 = (XX* - z)^{-1}
    pub companion: DMatrix<Complex64>,
    /// Tr R / N
    pub m: Complex64,
    /// Tr 𝓡 / M
    pub frak_m: Complex64,
    x: DMatrix<Complex64>,
}

/// Dense Green function; meant for small dimensions.
pub fn green_function(x: &DataMatrix, z: Complex64) -> Result<GreenFunction> {
    check_upper(z)?;
    x.check_finite()?;
    let xm = to_dmatrix(x);
    let (m, n) = (x.m(), x.n());
    let xs = xm.adjoint();
    let mut a = &xs * &xm;
    for i in 0..n {
        a[(i, i)] -= z;
    }
    let mut b = &xm * &xs;
    for i in 0..m {
        b[(i, i)] -= z;
    }
    let r_block = inverse(a, "X*X - z")?;
    let companion = inverse(b, "XX* - z")?;
    let mtr = r_block.trace() / n as f64;
    let ctr = companion.trace() / m as f64;
    Ok(GreenFunction {
        z,
        r_block,
        companion,
        m: mtr,
        frak_m: ctr,
        x: xm,
    })
}

impl GreenFunction {
    pub fn n(&self) -> usize {
        self.r_block.nrows()
    }

    pub fn m_rows(&self) -> usize {
        self.companion.nrows()
    }

    /// X*𝓡 (upper right).
    pub fn upper_right(&self) -> DMatrix<Complex64> {
        self.x.adjoint() * &self.companion
    }

    /// XR (lower left).
    pub fn lower_left(&self) -> DMatrix<Complex64> {
        &self.x * &self.r_block
    }

    /// z𝓡 (lower right).
    pub fn lower_right(&self) -> DMatrix<Complex64> {
        &self.companion * self.z
    }

    pub fn assemble(&self) -> DMatrix<Complex64> {
        let (n, m) = (self.n(), self.m_rows());
        let mut g = DMatrix::zeros(n + m, n + m);
        g.view_mut((0, 0), (n, n)).copy_from(&self.r_block);
        g.view_mut((0, n), (n, m)).copy_from(&self.upper_right());
        g.view_mut((n, 0), (m, n)).copy_from(&self.lower_left());
        g.view_mut((n, n), (m, m)).copy_from(&self.lower_right());
        g
    }

    /// max |(HG - I)_ij|.
    pub fn inverse_residual(&self) -> f64 {
        let (n, m) = (self.n(), self.m_rows());
        let mut h = DMatrix::zeros(n + m, n + m);
        for i in 0..n {
            h[(i, i)] = -self.z;
        }
        for i in 0..m {
            h[(n + i, n + i)] = Complex64::new(-1.0, 0.0);
        }
        h.view_mut((n, 0), (m, n)).copy_from(&self.x);
        h.view_mut((0, n), (n, m)).copy_from(&self.x.adjoint());
        let mut p = h * self.assemble();
        for i in 0..n + m {
            p[(i, i)] -= 1.0;
        }
        p.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// ‖X*X‖₂.
    pub fn gram_norm(&self) -> f64 {
        let g = self.x.adjoint() * &self.x;
        g.symmetric_eigenvalues()
            .iter()
            .fold(0.0f64, |a, v| a.max(*v))
    }
}

/// Outcome of the four Ward relations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WardReport {
    /// Set when c < |z| < C fails; the other fields are then empty.
    pub skipped: Option<String>,
    /// max_b |Σ_{k≤N} |G_bk|² - Im G_bb/η| / (Im G_bb/η)
    pub relation1_rel_err: f64,
    /// Smallest C' making relations 2, 3 and 4 hold for every row.
    pub c_prime: [f64; 3],
    pub gram_norm: f64,
}

pub fn ward_check(g: &GreenFunction) -> WardReport {
    let az = g.z.norm();
    if !(WARD_Z_MIN < az && az < WARD_Z_MAX) {
        return WardReport {
            skipped: Some(format!("|z| = {az:e} outside ({WARD_Z_MIN}, {WARD_Z_MAX})")),
            relation1_rel_err: f64::NAN,
            c_prime: [f64::NAN; 3],
            gram_norm: f64::NAN,
        };
    }
    let eta = g.z.im;
    let full = g.assemble();
    let (n, m) = (g.n(), g.m_rows());
    let norm = g.gram_norm();
    let row_sums = |r: usize| {
        let latin: f64 = (0..n).map(|k| full[(r, k)].norm_sqr()).sum();
        let greek: f64 = (n..n + m).map(|k| full[(r, k)].norm_sqr()).sum();
        (latin, greek)
    };
    let mut rel1: f64 = 0.0;
    let mut c = [0.0f64; 3];
    for b in 0..n {
        let (latin, greek) = row_sums(b);
        let target = full[(b, b)].im / eta;
        rel1 = rel1.max((latin - target).abs() / target.abs());
        c[0] = c[0].max(greek / (norm * latin));
    }
    for a in n..n + m {
        let (latin, greek) = row_sums(a);
        let base = norm * full[(a, a)].im / eta;
        c[1] = c[1].max((greek - 2.0).max(0.0) / base);
        if greek > 0.0 {
            c[2] = c[2].max(latin / (norm * greek));
        }
    }
    WardReport {
        skipped: None,
        relation1_rel_err: rel1,
        c_prime: c,
        gram_norm: norm,
    }
}

/// Π(z) = diag(m̃ I_N, -(1 + m̃)^{-1} I_M).
pub fn pi_blocks(z: Complex64, rho: f64) -> Result<(Complex64, Complex64)> {
    let mt = stieltjes_mp(z, rho)?;
    Ok((mt, -1.0 / (1.0 + mt)))
}

/// Raw local-law residuals together with their deterministic scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalLawResidual {
    pub m_err: f64,
    pub psi: f64,
    pub inv_n_eta: f64,
    /// max_ij |G_ij - Π_ij|; NaN when only the trace was computed.
    pub entry_err: f64,
}

impl LocalLawResidual {
    /// |m_N - m̃|·Nη.
    pub fn m_ratio(&self) -> f64 {
        self.m_err / self.inv_n_eta
    }

    /// max|G - Π| / Ψ.
    pub fn entry_ratio(&self) -> f64 {
        self.entry_err / self.psi
    }
}

/// Trace part of the local law from m_N alone.
pub fn trace_residual(
    m_n: Complex64,
    z: Complex64,
    n_cols: usize,
    rho: f64,
) -> Result<LocalLawResidual> {
    check_upper(z)?;
    let mt = stieltjes_mp(z, rho)?;
    Ok(LocalLawResidual {
        m_err: (m_n - mt).norm(),
        psi: control_psi(z, n_cols, rho)?,
        inv_n_eta: 1.0 / (n_cols as f64 * z.im),
        entry_err: f64::NAN,
    })
}

/// Full local-law residuals from the dense Green function.
pub fn local_law_residual(x: &DataMatrix, z: Complex64) -> Result<LocalLawResidual> {
    let g = green_function(x, z)?;
    let rho = x.dims().rho();
    let mut out = trace_residual(g.m, z, x.n(), rho)?;
    let (p1, p2) = pi_blocks(z, rho)?;
    let full = g.assemble();
    let n = x.n();
    let mut worst: f64 = 0.0;
    for j in 0..full.ncols() {
        for i in 0..full.nrows() {
            let pi = if i != j {
                Complex64::new(0.0, 0.0)
            } else if i < n {
                p1
            } else {
                p2
            };
            worst = worst.max((full[(i, j)] - pi).norm());
        }
    }
    out.entry_err = worst;
    Ok(out)
}
