//! Tracy–Widom distributions TW_1 and TW_2.
//!
//! The table is built once from the Painlevé II route and interpolated with
//! cubic Hermite polynomials that use the exact derivatives F2' = F2·u and
//! F1' = F1·(u + q)/2. The Fredholm route is kept as an independent check.

pub mod fredholm;
pub mod painleve;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub use fredholm::{tw1_fredholm, tw2_fredholm};

pub const S_MIN: f64 = -10.0;
pub const S_MAX: f64 = 8.0;
pub const SPACING: f64 = 0.01;
const S_SWITCH: f64 = -7.0;

/// Symmetry class of the limiting law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Beta {
    One,
    Two,
}

impl Beta {
    pub fn from_int(b: u8) -> Result<Self> {
        match b {
            1 => Ok(Beta::One),
            2 => Ok(Beta::Two),
            _ => Err(Error::Unsupported(format!("beta = {b}"))),
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Beta::One => 1.0,
            Beta::Two => 2.0,
        }
    }
}

/// CDF values of TW_1 and TW_2 on a uniform grid.
#[derive(Debug, Clone)]
pub struct TwTable {
    pub s_grid: Vec<f64>,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl TwTable {
    pub fn build() -> Self {
        let sol = painleve::solve(S_MIN, S_MAX, SPACING, S_SWITCH);
        let n = sol.s.len();
        let mut f1 = Vec::with_capacity(n);
        let mut f2 = Vec::with_capacity(n);
        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        for k in 0..n {
            let v2 = (-sol.i[k]).exp();
            let v1 = (-0.5 * (sol.i[k] + sol.v[k])).exp();
            f2.push(v2);
            f1.push(v1);
            d2.push(v2 * sol.u[k]);
            d1.push(v1 * 0.5 * (sol.u[k] + sol.q[k]));
        }
        limit_slopes(&f1, &mut d1, SPACING);
        limit_slopes(&f2, &mut d2, SPACING);
        Self {
            s_grid: sol.s,
            f1,
            f2,
            d1,
            d2,
        }
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let t = (s - S_MIN) / SPACING;
        let k = (t.floor() as usize).min(self.s_grid.len() - 2);
        (k, t - k as f64)
    }

    pub fn cdf(&self, s: f64, beta: Beta) -> f64 {
        let (f, d) = match beta {
            Beta::One => (&self.f1, &self.d1),
            Beta::Two => (&self.f2, &self.d2),
        };
        let (k, t) = self.locate(s);
        let h = SPACING;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let v = h00 * f[k] + h10 * h * d[k] + h01 * f[k + 1] + h11 * h * d[k + 1];
        v.clamp(0.0, 1.0)
    }

    /// Density from the Hermite interpolant's derivative.
    pub fn pdf(&self, s: f64, beta: Beta) -> f64 {
        let (f, d) = match beta {
            Beta::One => (&self.f1, &self.d1),
            Beta::Two => (&self.f2, &self.d2),
        };
        let (k, t) = self.locate(s);
        let h = SPACING;
        let t2 = t * t;
        let dh00 = (6.0 * t2 - 6.0 * t) / h;
        let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
        let dh01 = (-6.0 * t2 + 6.0 * t) / h;
        let dh11 = 3.0 * t2 - 2.0 * t;
        dh00 * f[k] + dh10 * d[k] + dh01 * f[k + 1] + dh11 * d[k + 1]
    }
}

// Fritsch–Carlson: keep the Hermite interpolant monotone.
fn limit_slopes(f: &[f64], d: &mut [f64], h: f64) {
    for k in 0..f.len() - 1 {
        let delta = (f[k + 1] - f[k]) / h;
        if delta <= 0.0 {
            // flat (or numerically decreasing) segment of a CDF
            d[k] = 0.0;
            d[k + 1] = 0.0;
            continue;
        }
        let a = d[k] / delta;
        let b = d[k + 1] / delta;
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            d[k] = tau * a * delta;
            d[k + 1] = tau * b * delta;
        }
    }
}

/// The process-wide table, built on first use.
pub fn table() -> &'static TwTable {
    static TABLE: OnceLock<TwTable> = OnceLock::new();
    TABLE.get_or_init(TwTable::build)
}

/// TW_β(s) for s ∈ [-10, 8].
pub fn tw_cdf(s: f64, beta: Beta) -> Result<f64> {
    if !(S_MIN..=S_MAX).contains(&s) {
        return Err(Error::Range {
            value: s,
            lo: S_MIN,
            hi: S_MAX,
        });
    }
    Ok(table().cdf(s, beta))
}

/// TW_β(s) clamped outside the table range (0 to the left, 1 to the right);
/// used by the KS statistics where samples may fall anywhere.
pub fn tw_cdf_total(s: f64, beta: Beta) -> f64 {
    if s < S_MIN {
        0.0
    } else if s > S_MAX {
        1.0
    } else {
        table().cdf(s, beta)
    }
}

/// Inverse of [`tw_cdf`] by bisection on the interpolant.
pub fn tw_quantile(p: f64, beta: Beta) -> Result<f64> {
    if !(p > 1e-6 && p < 1.0 - 1e-8) {
        return domain(format!("probability {p} outside (1e-6, 1-1e-8)"));
    }
    let t = table();
    let (mut lo, mut hi) = (S_MIN, S_MAX);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if t.cdf(mid, beta) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Left-tail asymptotics τ₂|s|^{-1/8}e^{-|s|³/12} and
/// τ₁|s|^{-1/16}e^{-|s|³/24 - |s|^{3/2}/(3√2)}.
pub fn left_tail_asymptotic(s: f64, beta: Beta) -> f64 {
    // ζ'(-1)
    const ZETA_PRIME_M1: f64 = -0.165_421_143_559_810_4;
    let a = -s;
    match beta {
        Beta::Two => {
            2f64.powf(1.0 / 24.0) * ZETA_PRIME_M1.exp() * a.powf(-0.125) * (-a * a * a / 12.0).exp()
        }
        Beta::One => {
            2f64.powf(-11.0 / 48.0)
                * (0.5 * ZETA_PRIME_M1).exp()
                * a.powf(-1.0 / 16.0)
                * (-a * a * a / 24.0 - a.powf(1.5) / (3.0 * 2f64.sqrt())).exp()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_tail_is_one() {
        assert!((tw_cdf(6.0, Beta::Two).unwrap() - 1.0).abs() < 1e-8);
        assert!(tw_cdf(9.0, Beta::Two).is_err());
    }

    #[test]
    fn quantile_domain() {
        assert!(tw_quantile(0.0, Beta::One).is_err());
        assert!(tw_quantile(0.5, Beta::One).is_ok());
    }
}
