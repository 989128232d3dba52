//! Orthonormal Laguerre functions
//! ψ_k^α(x) = √(k!/Γ(k+α+1)) x^{α/2} e^{-x/2} L_k^α(x).

use crate::error::{domain, Result};

const RESCALE: f64 = 1e150;

/// ψ_0^α, …, ψ_{kmax}^α at x, scaled by x^{shift}.
///
/// The recurrence runs on a mantissa with a separately tracked log scale so
/// neither the weight nor the factorials overflow.
fn psi_all_scaled(kmax: usize, alpha: f64, x: f64, shift: f64) -> Result<Vec<f64>> {
    if !(alpha >= -1.0) {
        return domain(format!("alpha = {alpha} must be >= -1"));
    }
    if !(x >= 0.0) {
        return domain(format!("x = {x} must be nonnegative"));
    }
    if alpha == -1.0 {
        // ψ_0^{-1} = 0 and ψ_k^{-1} = -ψ_{k-1}^{1}
        let mut out = vec![0.0; kmax + 1];
        if kmax >= 1 {
            let up = psi_all_scaled(kmax - 1, 1.0, x, shift)?;
            for k in 1..=kmax {
                out[k] = -up[k - 1];
            }
        }
        return Ok(out);
    }
    let mut out = vec![0.0; kmax + 1];
    if x == 0.0 {
        let e = alpha / 2.0 + shift;
        if e < 0.0 {
            return domain("weight is singular at x = 0");
        }
        if e > 0.0 {
            return Ok(out);
        }
        // only the x^0 parts survive: ψ_k(0) = √(Γ(k+α+1)/(k! Γ(α+1)²))
        for (k, o) in out.iter_mut().enumerate() {
            let kf = k as f64;
            let lv = 0.5 * (libm::lgamma(kf + alpha + 1.0) - libm::lgamma(kf + 1.0))
                - libm::lgamma(alpha + 1.0);
            *o = lv.exp();
        }
        return Ok(out);
    }
    let mut log_scale = (alpha / 2.0 + shift) * x.ln() - x / 2.0 - 0.5 * libm::lgamma(alpha + 1.0);
    let mut prev = 0.0;
    let mut cur = 1.0;
    out[0] = rescaled(1.0, log_scale);
    for k in 0..kmax {
        let kf = k as f64;
        let next = ((2.0 * kf + alpha + 1.0 - x) * cur - (kf * (kf + alpha)).sqrt() * prev)
            / ((kf + 1.0) * (kf + 1.0 + alpha)).sqrt();
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            log_scale += RESCALE.ln();
        }
        out[k + 1] = rescaled(cur, log_scale);
    }
    Ok(out)
}

fn rescaled(mantissa: f64, log_scale: f64) -> f64 {
    if log_scale > -700.0 && log_scale < 700.0 {
        mantissa * log_scale.exp()
    } else if mantissa == 0.0 {
        0.0
    } else {
        mantissa.signum() * (log_scale + mantissa.abs().ln()).exp()
    }
}

/// ψ_k^α(x).
pub fn laguerre_psi(k: usize, alpha: f64, x: f64) -> Result<f64> {
    Ok(psi_all_scaled(k, alpha, x, 0.0)?[k])
}

/// All of ψ_0^α(x), …, ψ_{kmax}^α(x).
pub fn laguerre_psi_all(kmax: usize, alpha: f64, x: f64) -> Result<Vec<f64>> {
    psi_all_scaled(kmax, alpha, x, 0.0)
}

/// ψ_k^α(x)·x^{-1/2} without forming the singular factor separately.
pub(crate) fn laguerre_psi_over_sqrt(k: usize, alpha: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return domain("x^{-1/2} factor is singular at 0");
    }
    Ok(psi_all_scaled(k, alpha, x, -0.5)?[k])
}

/// Which of the two edge functions φ_{N,1}, φ_{N,2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeFn {
    Phi1,
    Phi2,
}

/// φ_{N,1}(x) = (-1)^N c ψ_N^{α-1}(x) x^{-1/2},
/// φ_{N,2}(x) = (-1)^{N-1} c ψ_{N-1}^{α+1}(x) x^{-1/2},
/// with c = √(√(N(N+α))/2); both vanish for x < 0.
pub fn phi_edge(n: usize, alpha: f64, which: EdgeFn, x: f64) -> Result<f64> {
    if n == 0 {
        return domain("N must be positive");
    }
    if x < 0.0 {
        return Ok(0.0);
    }
    if x == 0.0 {
        return domain("phi has an integrable singularity at x = 0");
    }
    let nf = n as f64;
    let c = ((nf * (nf + alpha)).sqrt() / 2.0).sqrt();
    match which {
        EdgeFn::Phi1 => {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            Ok(s * c * laguerre_psi_over_sqrt(n, alpha - 1.0, x)?)
        }
        EdgeFn::Phi2 => {
            let s = if n % 2 == 1 { 1.0 } else { -1.0 };
            Ok(s * c * laguerre_psi_over_sqrt(n - 1, alpha + 1.0, x)?)
        }
    }
}
