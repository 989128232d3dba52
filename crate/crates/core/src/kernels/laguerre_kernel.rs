//! LUE and LOE correlation kernels K_{N,2}, K_{N,1} and the edge rescaling.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::gl64;
use crate::special::laguerre::{laguerre_psi_all, phi_edge, EdgeFn};
use crate::tracy_widom::Beta;

/// Panels the integral routes may use before giving up.
const MAX_PANELS: usize = 20_000;
const TAIL_TOL: f64 = 1e-15;

/// Evaluator for the (N, α, β) Laguerre kernels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelContext {
    pub n: usize,
    /// Population dimension M; α = M - N for β = 2 and M - N - 1 for β = 1.
    pub m: f64,
    pub alpha: f64,
    pub beta: Beta,
    pub mu_tilde: f64,
    pub sigma_tilde: f64,
    /// ∫_0^∞ φ_{N,1}, needed by the LOE correction (β = 1 only).
    phi1_total: f64,
}

impl KernelContext {
    /// Context for an M×N data matrix.
    pub fn new(n: usize, m: usize, beta: Beta) -> Result<Self> {
        let alpha = match beta {
            Beta::Two => m as f64 - n as f64,
            Beta::One => m as f64 - n as f64 - 1.0,
        };
        Self::build(n, m as f64, alpha, beta)
    }

    /// Context from the Laguerre parameter directly.
    pub fn with_alpha(n: usize, alpha: f64, beta: Beta) -> Result<Self> {
        let m = match beta {
            Beta::Two => n as f64 + alpha,
            Beta::One => n as f64 + alpha + 1.0,
        };
        Self::build(n, m, alpha, beta)
    }

    fn build(n: usize, m: f64, alpha: f64, beta: Beta) -> Result<Self> {
        if n == 0 {
            return domain("N must be positive");
        }
        if !(alpha >= 0.0) {
            return domain(format!("alpha = {alpha} must be nonnegative"));
        }
        if beta == Beta::One && n % 2 == 1 {
            return Err(Error::Unsupported("odd N for the orthogonal kernel".into()));
        }
        let nm = n as f64 - 0.5;
        let mm = m - 0.5;
        let (rn, rm) = (nm.sqrt(), mm.sqrt());
        let mu_tilde = (rn + rm) * (rn + rm);
        let sigma_tilde = (rn + rm) * (1.0 / rm + 1.0 / rn).cbrt();
        let mut ctx = Self {
            n,
            m,
            alpha,
            beta,
            mu_tilde,
            sigma_tilde,
            phi1_total: 0.0,
        };
        if beta == Beta::One {
            ctx.phi1_total = ctx.phi_tail_integral(EdgeFn::Phi1, 0.0)?;
        }
        Ok(ctx)
    }

    pub fn phi(&self, which: EdgeFn, x: f64) -> Result<f64> {
        phi_edge(self.n, self.alpha, which, x)
    }

    /// Σ_{k<N} ψ_k^α(x) ψ_k^α(y).
    pub fn lue_sum(&self, x: f64, y: f64) -> Result<f64> {
        check_nonneg(x, y)?;
        let px = laguerre_psi_all(self.n - 1, self.alpha, x)?;
        if x == y {
            return Ok(px.iter().map(|v| v * v).sum());
        }
        let py = laguerre_psi_all(self.n - 1, self.alpha, y)?;
        Ok(px.iter().zip(&py).map(|(a, b)| a * b).sum())
    }

    /// ∫_0^∞ (φ1(x+z)φ2(y+z) + φ2(x+z)φ1(y+z)) dz.
    pub fn lue_integral(&self, x: f64, y: f64) -> Result<f64> {
        check_nonneg(x, y)?;
        let f = |z: f64| -> Result<f64> {
            let (a, b) = (x + z, y + z);
            let a1 = self.phi(EdgeFn::Phi1, a)?;
            let a2 = self.phi(EdgeFn::Phi2, a)?;
            let (b1, b2) = if a == b {
                (a1, a2)
            } else {
                (self.phi(EdgeFn::Phi1, b)?, self.phi(EdgeFn::Phi2, b)?)
            };
            Ok(a1 * b2 + a2 * b1)
        };
        self.semi_infinite(x.min(y), f)
    }

    /// ∫_a^∞ φ(t) dt for one of the edge functions.
    fn phi_tail_integral(&self, which: EdgeFn, a: f64) -> Result<f64> {
        self.semi_infinite(a, |z| self.phi(which, a + z))
    }

    // ∫_0^∞ g(z) dz where g may carry a (a+z)^{-1/2} singularity at
    // z = -a; panels touching it use z + a = v².
    fn semi_infinite<G: Fn(f64) -> Result<f64>>(&self, a: f64, g: G) -> Result<f64> {
        let rule = gl64();
        let width = (self.sigma_tilde / 2.0).min(8.0);
        let past_edge = self.mu_tilde + 2.0 * self.sigma_tilde;
        let mut total = 0.0;
        let mut lo = 0.0;
        let mut small_run = 0;
        for panel in 0..MAX_PANELS {
            let hi = lo + width;
            let mut part = 0.0;
            if panel == 0 && a < width {
                let (v0, v1) = (a.sqrt(), (a + hi).sqrt());
                let half = 0.5 * (v1 - v0);
                let mid = 0.5 * (v1 + v0);
                for (t, w) in rule.nodes.iter().zip(&rule.weights) {
                    let v = mid + half * t;
                    part += w * g(v * v - a)? * 2.0 * v;
                }
                part *= half;
            } else {
                let half = 0.5 * width;
                let mid = lo + half;
                for (t, w) in rule.nodes.iter().zip(&rule.weights) {
                    part += w * g(mid + half * t)?;
                }
                part *= half;
            }
            total += part;
            lo = hi;
            if a + lo > past_edge {
                if part.abs() <= TAIL_TOL * total.abs() || part == 0.0 {
                    small_run += 1;
                    if small_run >= 2 {
                        return Ok(total);
                    }
                } else {
                    small_run = 0;
                }
            }
        }
        Err(Error::Accuracy {
            achieved: (total.abs() * TAIL_TOL).max(f64::MIN_POSITIVE),
            requested: TAIL_TOL,
        })
    }

    /// (sgn ⋆ φ_{N,1})(y) = ∫_0^∞ φ1 - 2 ∫_y^∞ φ1.
    pub fn sgn_conv_phi1(&self, y: f64) -> Result<f64> {
        if y <= 0.0 {
            return Ok(-self.phi1_total);
        }
        Ok(self.phi1_total - 2.0 * self.phi_tail_integral(EdgeFn::Phi1, y)?)
    }

    /// K_{N,2}(x,y) + ½ φ_{N,2}(x) (sgn ⋆ φ_{N,1})(y).
    pub fn loe(&self, x: f64, y: f64) -> Result<f64> {
        if self.beta != Beta::One {
            return Err(Error::Unsupported(
                "orthogonal kernel needs a beta = 1 context".into(),
            ));
        }
        let base = self.lue_sum(x, y)?;
        let p2 = if x > 0.0 {
            self.phi(EdgeFn::Phi2, x)?
        } else {
            0.0
        };
        if p2 == 0.0 {
            return Ok(base);
        }
        Ok(base + 0.5 * p2 * self.sgn_conv_phi1(y)?)
    }

    /// K_{N,β} in the physical (Nλ) coordinates.
    pub fn kernel(&self, x: f64, y: f64) -> Result<f64> {
        match self.beta {
            Beta::Two => self.lue_sum(x, y),
            Beta::One => self.loe(x, y),
        }
    }

    /// σ̃ K_{N,β}(μ̃ + σ̃x, μ̃ + σ̃y).
    pub fn edge_kernel(&self, x: f64, y: f64) -> Result<f64> {
        let (a, b) = self.to_physical(x, y)?;
        Ok(self.sigma_tilde * self.kernel(a, b)?)
    }

    pub(crate) fn to_physical(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let a = self.mu_tilde + self.sigma_tilde * x;
        let b = self.mu_tilde + self.sigma_tilde * y;
        if a < 0.0 || b < 0.0 {
            return domain("edge coordinates map below the hard edge");
        }
        Ok((a, b))
    }
}

fn check_nonneg(x: f64, y: f64) -> Result<()> {
    if !(x >= 0.0 && y >= 0.0) {
        return domain(format!("kernel arguments ({x}, {y}) must be nonnegative"));
    }
    Ok(())
}
