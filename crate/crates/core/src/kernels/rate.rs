//! Sup-error of the edge kernels against their Airy limits as N grows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::airy_limit::{airy_kernel, loe_limit_kernel};
use super::laguerre_kernel::KernelContext;
use crate::error::{domain, Error, Result};
use crate::special::laguerre::{laguerre_psi_all, EdgeFn};
use crate::tracy_widom::Beta;

/// Per-N sup errors and the fitted log-log slope.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateReport {
    pub beta: Beta,
    pub n_list: Vec<usize>,
    /// sup over the grid of |K^edge_N - K_limit|·e^{x+y}
    pub sup_error: Vec<f64>,
    /// Grid point attaining each sup.
    pub argmax: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
}

impl RateReport {
    /// sup_error(N')/sup_error(N) for every pair with N' = factor·N.
    pub fn ratios(&self, factor: usize) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for (i, &n) in self.n_list.iter().enumerate() {
            if let Some(j) = self.n_list.iter().position(|&m| m == factor * n) {
                out.push((n, self.sup_error[j] / self.sup_error[i]));
            }
        }
        out
    }
}

/// Default evaluation grid: x, y ∈ {-3, -2.5, ..., 3}.
pub fn default_grid() -> Vec<(f64, f64)> {
    let pts: Vec<f64> = (0..13).map(|k| -3.0 + 0.5 * k as f64).collect();
    pts.iter()
        .flat_map(|&x| pts.iter().map(move |&y| (x, y)))
        .collect()
}

/// Context used by the experiment: M = 2N.
pub fn experiment_context(n: usize, beta: Beta) -> Result<KernelContext> {
    KernelContext::new(n, 2 * n, beta)
}

/// sup-norm error of the edge kernel for one N on a grid.
pub fn sup_error(ctx: &KernelContext, grid: &[(f64, f64)]) -> Result<(f64, (f64, f64))> {
    if grid.is_empty() {
        return domain("empty grid");
    }
    // one ψ vector (and φ data for β = 1) per distinct coordinate
    let mut coords: Vec<f64> = grid.iter().flat_map(|&(x, y)| [x, y]).collect();
    coords.sort_by(f64::total_cmp);
    coords.dedup();
    let data: Vec<(Vec<f64>, f64, f64)> = coords
        .par_iter()
        .map(|&c| -> Result<_> {
            let (t, _) = ctx.to_physical(c, c)?;
            let psi = laguerre_psi_all(ctx.n - 1, ctx.alpha, t)?;
            let (p2, conv) = match ctx.beta {
                Beta::Two => (0.0, 0.0),
                Beta::One => (ctx.phi(EdgeFn::Phi2, t)?, ctx.sgn_conv_phi1(t)?),
            };
            Ok((psi, p2, conv))
        })
        .collect::<Result<_>>()?;
    let idx = |c: f64| {
        coords
            .binary_search_by(|v| v.total_cmp(&c))
            .expect("coordinate present")
    };
    let mut best = (f64::NEG_INFINITY, (0.0, 0.0));
    for &(x, y) in grid {
        let (px, p2x, _) = &data[idx(x)];
        let (py, _, convy) = &data[idx(y)];
        let mut k: f64 = px.iter().zip(py).map(|(a, b)| a * b).sum();
        let limit = match ctx.beta {
            Beta::Two => airy_kernel(x, y)?,
            Beta::One => {
                k += 0.5 * p2x * convy;
                loe_limit_kernel(x, y)?
            }
        };
        let err = (ctx.sigma_tilde * k - limit).abs() * (x + y).exp();
        if err > best.0 {
            best = (err, (x, y));
        }
    }
    Ok(best)
}

/// Runs the sweep over `n_list` and fits log(sup) = a + slope·log N.
pub fn kernel_rate_experiment(
    beta: Beta,
    n_list: &[usize],
    grid: &[(f64, f64)],
) -> Result<RateReport> {
    if n_list.len() < 2 {
        return domain("need at least two values of N");
    }
    if beta == Beta::One {
        if let Some(n) = n_list.iter().find(|&&n| n % 2 == 1) {
            return Err(Error::Unsupported(format!("odd N = {n} for beta = 1")));
        }
    }
    let mut sup = Vec::with_capacity(n_list.len());
    let mut argmax = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let ctx = experiment_context(n, beta)?;
        let (e, at) = sup_error(&ctx, grid)?;
        sup.push(e);
        argmax.push(at);
    }
    let xs: Vec<f64> = n_list.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = sup.iter().map(|e| e.ln()).collect();
    let (slope, intercept) = ols(&xs, &ys);
    Ok(RateReport {
        beta,
        n_list: n_list.to_vec(),
        sup_error: sup,
        argmax,
        slope,
        intercept,
    })
}

pub(crate) fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// x ∈ {-3, -2.9, ..., 3}.
pub fn phi_grid() -> Vec<f64> {
    (0..=60).map(|k| -3.0 + 0.1 * k as f64).collect()
}

/// sup over the grid of e^{x}·|σ̃ φ_{N,j}(μ̃ + σ̃x) - Ai(x)/√2|.
pub fn phi_edge_sup_error(ctx: &KernelContext, which: EdgeFn, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return domain("empty grid");
    }
    let mut worst: f64 = 0.0;
    for &x in grid {
        let (t, _) = ctx.to_physical(x, x)?;
        let v = ctx.sigma_tilde * ctx.phi(which, t)?;
        let limit = crate::special::airy(x)?.ai / std::f64::consts::SQRT_2;
        worst = worst.max((v - limit).abs() * x.exp());
    }
    Ok(worst)
}
