//! Smoothed eigenvalue counts, the edge observable 𝒳, the cutoff F and the
//! rigidity diagnostics.

use serde::{Deserialize, Serialize};

use super::spectrum::Spectrum;
use crate::error::{domain, Result};
use crate::mp_law::{classical_locations, MpModel};

/// A smoothed count of eigenvalues in [e_low, e_high] at resolution η.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingObservable {
    pub e_low: f64,
    pub e_high: f64,
    pub eta: f64,
    pub value: f64,
}

/// E_L = E₊ + 4N^{-2/3+ε}.
pub fn truncation_energy(model: &MpModel, n_cols: usize, eps: f64) -> f64 {
    model.e_plus + 4.0 * (n_cols as f64).powf(-2.0 / 3.0 + eps)
}

/// Tr (χ_E ⋆ θ_η)(X*X) with χ_E the indicator of [e_low, E_L].
pub fn smoothed_counting(
    spectrum: &Spectrum,
    e_low: f64,
    eta: f64,
    eps: f64,
    model: &MpModel,
) -> Result<CountingObservable> {
    if !(eta > 0.0) {
        return domain("mollifier width must be positive");
    }
    let e_high = truncation_energy(model, spectrum.n(), eps);
    if e_low > e_high {
        return domain(format!("E = {e_low} above the truncation energy {e_high}"));
    }
    Ok(CountingObservable {
        e_low,
        e_high,
        eta,
        value: spectrum.window_count(e_low, e_high, eta).max(0.0),
    })
}

/// 𝒳 = (N/π)∫_{κ1}^{κ2} Im m_N(E₊ + x + iη) dx.
pub fn observable_chi(
    spectrum: &Spectrum,
    kappa1: f64,
    kappa2: f64,
    eta: f64,
    model: &MpModel,
) -> Result<f64> {
    if !(kappa1 < kappa2) {
        return domain(format!("window [{kappa1}, {kappa2}] is not ordered"));
    }
    if !(eta > 0.0) {
        return domain("eta must be positive");
    }
    let e = model.e_plus;
    Ok(spectrum.window_count(e + kappa1, e + kappa2, eta).max(0.0))
}

/// Default window (κ1, κ2) = (-N^{-2/3}, N^{-2/3+0.05}).
pub fn default_window(n_cols: usize) -> (f64, f64) {
    let n = n_cols as f64;
    (-n.powf(-2.0 / 3.0), n.powf(-2.0 / 3.0 + 0.05))
}

fn sigma(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

/// Smooth step: 0 for u ≤ 0, 1 for u ≥ 1.
fn smooth_step(u: f64) -> f64 {
    let a = sigma(u);
    let b = sigma(1.0 - u);
    a / (a + b)
}

/// Even C^∞ cutoff: 1 on |x| ≤ 1/9, 0 on |x| ≥ 2/9.
pub fn cutoff_f(x: f64) -> f64 {
    smooth_step((2.0 / 9.0 - x.abs()) * 9.0)
}

/// Rigidity residuals of one spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    /// |λ_j - γ_j|·N^{2/3}·min(j, N-j+1)^{1/3} for j with γ_j ≥ c.
    pub rescaled: Vec<f64>,
    pub max_rescaled: f64,
    pub argmax: usize,
    /// max over the mesh windows of |𝒩(E1,E2) - N∫dμ|.
    pub counting_discrepancy: f64,
}

/// Lower energy cutoff below which rigidity is not asserted.
pub const RIGIDITY_C: f64 = 0.05;

/// `eigs` ascending. The counting mesh has points E₊ - (E₊ - c)·2^{-k}
/// down to distance N^{-2/3} from the edge, plus the tail beyond E₊.
pub fn rigidity_check(eigs: &[f64], model: &MpModel) -> Result<RigidityReport> {
    let n = eigs.len();
    if n == 0 {
        return domain("empty spectrum");
    }
    if eigs.windows(2).any(|w| w[0] > w[1]) {
        return domain("eigenvalues must be ascending");
    }
    let gamma = classical_locations(n, model.rho)?;
    let nf = n as f64;
    let mut rescaled = Vec::with_capacity(n);
    let (mut best, mut arg) = (0.0f64, 0);
    for j in 1..=n {
        let g = gamma[j - 1];
        if g < RIGIDITY_C {
            rescaled.push(f64::NAN);
            continue;
        }
        let w = (j.min(n - j + 1) as f64).cbrt();
        let v = (eigs[j - 1] - g).abs() * nf.powf(2.0 / 3.0) * w;
        if v > best {
            best = v;
            arg = j;
        }
        rescaled.push(v);
    }
    let lo = model.e_minus.max(RIGIDITY_C);
    let mut mesh = vec![lo];
    let floor = nf.powf(-2.0 / 3.0);
    let mut gap = (model.e_plus - lo) / 2.0;
    while gap >= floor {
        mesh.push(model.e_plus - gap);
        gap /= 2.0;
    }
    mesh.push(model.e_plus);
    mesh.push(f64::INFINITY);
    let count = |a: f64, b: f64| eigs.iter().filter(|&&l| a <= l && l <= b).count() as f64;
    let mut disc: f64 = 0.0;
    for w in mesh.windows(2) {
        let mass = model.cdf(w[1].min(model.e_plus)) - model.cdf(w[0]);
        disc = disc.max((count(w[0], w[1]) - nf * mass).abs());
    }
    Ok(RigidityReport {
        rescaled,
        max_rescaled: best,
        argmax: arg,
        counting_discrepancy: disc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_plateaus() {
        assert_eq!(cutoff_f(0.0), 1.0);
        assert_eq!(cutoff_f(1.0 / 9.0), 1.0);
        assert_eq!(cutoff_f(0.3), 0.0);
        assert_eq!(cutoff_f(2.0 / 9.0), 0.0);
        assert_eq!(cutoff_f(0.15), cutoff_f(-0.15));
    }
}
