//! Marchenko–Pastur law: edges, density, Stieltjes transform, classical
//! locations, spectral domains and the control parameter Ψ.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::quadrature;

/// Matrix dimensions in the `M >= N` orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AspectRatio {
    m_rows: usize,
    n_cols: usize,
}

impl AspectRatio {
    pub fn new(m_rows: usize, n_cols: usize) -> Result<Self> {
        if n_cols == 0 {
            return domain("N must be positive");
        }
        if m_rows < n_cols {
            return domain(format!("need M >= N, got M={m_rows}, N={n_cols}"));
        }
        Ok(Self { m_rows, n_cols })
    }

    pub fn m_rows(&self) -> usize {
        self.m_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// ρ = M/N, evaluated from the stored integers on every call.
    pub fn rho(&self) -> f64 {
        self.m_rows as f64 / self.n_cols as f64
    }

    pub fn model(&self) -> MpModel {
        MpModel::new(self.rho()).expect("M >= N guarantees rho >= 1")
    }
}

/// The Marchenko–Pastur law with ratio ρ ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpModel {
    pub rho: f64,
    pub e_minus: f64,
    pub e_plus: f64,
}

impl MpModel {
    pub fn new(rho: f64) -> Result<Self> {
        let (e_minus, e_plus) = edges(rho)?;
        Ok(Self {
            rho,
            e_minus,
            e_plus,
        })
    }

    pub fn density(&self, x: f64) -> f64 {
        if x <= self.e_minus || x >= self.e_plus {
            return 0.0;
        }
        ((x - self.e_minus) * (self.e_plus - x)).sqrt() / (2.0 * PI * x)
    }

    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64> {
        stieltjes_mp(z, self.rho)
    }

    /// Distance to the nearer spectral edge.
    pub fn kappa(&self, energy: f64) -> f64 {
        (energy - self.e_plus)
            .abs()
            .min((energy - self.e_minus).abs())
    }

    /// μ_MP((-∞, x]).
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.e_minus {
            return 0.0;
        }
        if x >= self.e_plus {
            return 1.0;
        }
        let w = self.e_plus - self.e_minus;
        let theta = ((x - self.e_minus) / w).sqrt().clamp(0.0, 1.0).asin();
        self.cdf_theta(theta)
    }

    // x = E- + w sin^2(t) removes both square-root edges
    fn cdf_theta(&self, theta: f64) -> f64 {
        let w = self.e_plus - self.e_minus;
        let em = self.e_minus;
        let g = |t: f64| {
            let (s, c) = t.sin_cos();
            let s2 = s * s;
            if em == 0.0 {
                w * c * c / PI
            } else {
                w * w * s2 * c * c / (PI * (em + w * s2))
            }
        };
        quadrature::adaptive(g, 0.0, theta, 1e-15).0
    }

    fn cdf_theta_density(&self, theta: f64) -> f64 {
        let w = self.e_plus - self.e_minus;
        let (s, c) = theta.sin_cos();
        let s2 = s * s;
        if self.e_minus == 0.0 {
            w * c * c / PI
        } else {
            w * w * s2 * c * c / (PI * (self.e_minus + w * s2))
        }
    }

    /// Solves CDF(γ) = p to 1e-12 in probability.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return domain(format!("quantile level {p} outside [0,1]"));
        }
        if p == 1.0 {
            return Ok(self.e_plus);
        }
        if p == 0.0 {
            return Ok(self.e_minus);
        }
        let (mut lo, mut hi) = (0.0, PI / 2.0);
        let mut t = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = self.cdf_theta(t) - p;
            if f.abs() <= 1e-13 {
                break;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let d = self.cdf_theta_density(t);
            let newton = t - f / d;
            t = if d > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-15 {
                break;
            }
        }
        let s = t.sin();
        Ok(self.e_minus + (self.e_plus - self.e_minus) * s * s)
    }
}

/// ((1-√ρ)², (1+√ρ)²).
pub fn edges(rho: f64) -> Result<(f64, f64)> {
    if !(rho >= 1.0) || !rho.is_finite() {
        return domain(format!("aspect ratio {rho} must satisfy rho >= 1"));
    }
    let r = rho.sqrt();
    Ok(((1.0 - r) * (1.0 - r), (1.0 + r) * (1.0 + r)))
}

/// Density of the MP law, normalised to unit mass on [E-, E+].
pub fn mp_density(x: f64, rho: f64) -> Result<f64> {
    Ok(MpModel::new(rho)?.density(x))
}

/// The branch of z m² + (z+1-ρ) m + 1 = 0 that is the Stieltjes transform
/// of the MP law.
pub fn stieltjes_mp(z: Complex64, rho: f64) -> Result<Complex64> {
    let (em, ep) = edges(rho)?;
    if z.im == 0.0 {
        let x = z.re;
        if x > em && x < ep {
            return domain(format!("real z = {x} lies inside the support [{em}, {ep}]"));
        }
        if x == 0.0 {
            if rho > 1.0 {
                return Ok(Complex64::new(1.0 / (rho - 1.0), 0.0));
            }
            return domain("z = 0 is the hard edge when rho = 1");
        }
    }
    let b = z + 1.0 - rho;
    let disc = b * b - 4.0 * z;
    let sq = disc.sqrt();
    // pick the sign that avoids cancellation in b ± sq
    let q = if (b.conj() * sq).re >= 0.0 {
        -0.5 * (b + sq)
    } else {
        -0.5 * (b - sq)
    };
    let r1 = q / z;
    let r2 = if q.norm() == 0.0 { r1 } else { 1.0 / q };
    let root = if z.im > 0.0 {
        if r1.im >= r2.im {
            r1
        } else {
            r2
        }
    } else if z.im < 0.0 {
        if r1.im <= r2.im {
            r1
        } else {
            r2
        }
    } else if r1.norm() <= r2.norm() {
        r1
    } else {
        r2
    };
    Ok(root)
}

/// Residual |z m² + (z+1-ρ) m + 1|.
pub fn quadratic_residual(z: Complex64, m: Complex64, rho: f64) -> f64 {
    (z * m * m + (z + 1.0 - rho) * m + 1.0).norm()
}

/// Classical location γ_j: the (j/N)-quantile of the MP law.
pub fn classical_location(j: usize, n_cols: usize, rho: f64) -> Result<f64> {
    if j == 0 || j > n_cols {
        return domain(format!("index j={j} outside 1..={n_cols}"));
    }
    MpModel::new(rho)?.quantile(j as f64 / n_cols as f64)
}

/// γ_1 ≤ … ≤ γ_N.
pub fn classical_locations(n_cols: usize, rho: f64) -> Result<Vec<f64>> {
    let model = MpModel::new(rho)?;
    (1..=n_cols)
        .map(|j| model.quantile(j as f64 / n_cols as f64))
        .collect()
}

/// Ψ(z) = √(Im m̃ / (Nη)) + 1/(Nη).
pub fn control_psi(z: Complex64, n_cols: usize, rho: f64) -> Result<f64> {
    if !(z.im > 0.0) {
        return domain("control parameter needs Im z > 0");
    }
    let m = stieltjes_mp(z, rho)?;
    let ne = n_cols as f64 * z.im;
    Ok((m.im / ne).sqrt() + 1.0 / ne)
}

/// A spectral parameter split into energy, resolution and edge distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub energy: f64,
    pub eta: f64,
    pub kappa: f64,
}

impl SpectralPoint {
    pub fn new(z: Complex64, model: &MpModel) -> Result<Self> {
        if !(z.im > 0.0) {
            return domain("spectral point needs eta > 0");
        }
        Ok(Self {
            energy: z.re,
            eta: z.im,
            kappa: model.kappa(z.re),
        })
    }
}

/// Constants of the spectral domains S(ε, c) and S_edge(ε, C1, C2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainParams {
    pub eps: f64,
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Default for DomainParams {
    fn default() -> Self {
        Self {
            eps: 0.1,
            c: 0.1,
            c1: 1.0,
            c2: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DomainMembership {
    pub in_s: bool,
    pub in_s_edge: bool,
}

// inclusive comparison with a relative slack for closed boundaries
fn le(a: f64, b: f64) -> bool {
    a <= b + 1e-12 * a.abs().max(b.abs())
}

pub fn in_domain(z: Complex64, n_cols: usize, rho: f64, params: &DomainParams) -> DomainMembership {
    let Ok(model) = MpModel::new(rho) else {
        return DomainMembership {
            in_s: false,
            in_s_edge: false,
        };
    };
    let n = n_cols as f64;
    let eta = z.im;
    let kappa = model.kappa(z.re);
    let in_s = le(params.c, z.norm())
        && le(kappa, 1.0 / params.c)
        && le(n.powf(-1.0 + params.eps), eta)
        && le(eta, 1.0);
    let de = z.re - model.e_plus;
    let in_s_edge = in_s
        && le(-params.c1 * n.powf(-2.0 / 3.0), de)
        && le(de, params.c2 * n.powf(-2.0 / 3.0 + params.eps))
        && le(eta, n.powf(-2.0 / 3.0 - params.eps));
    DomainMembership { in_s, in_s_edge }
}

/// Extreme ratios of Im m̃ against √(κ+η) (inside the support) and
/// η/√(κ+η) (outside).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ImScalingReport {
    pub inside_min: f64,
    pub inside_max: f64,
    pub outside_min: f64,
    pub outside_max: f64,
    pub inside_points: usize,
    pub outside_points: usize,
}

pub fn im_m_scaling_check(
    model: &MpModel,
    energies: &[f64],
    etas: &[f64],
) -> Result<ImScalingReport> {
    let mut rep = ImScalingReport {
        inside_min: f64::INFINITY,
        inside_max: 0.0,
        outside_min: f64::INFINITY,
        outside_max: 0.0,
        ..Default::default()
    };
    for &e in energies {
        for &eta in etas {
            if !(eta > 0.0) {
                return Err(Error::Domain(format!("eta = {eta} must be positive")));
            }
            let m = model.stieltjes(Complex64::new(e, eta))?;
            let kappa = model.kappa(e);
            let base = (kappa + eta).sqrt();
            if e >= model.e_minus && e <= model.e_plus {
                let r = m.im / base;
                rep.inside_min = rep.inside_min.min(r);
                rep.inside_max = rep.inside_max.max(r);
                rep.inside_points += 1;
            } else {
                let r = m.im / (eta / base);
                rep.outside_min = rep.outside_min.min(r);
                rep.outside_max = rep.outside_max.max(r);
                rep.outside_points += 1;
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges_examples() {
        assert_eq!(edges(1.0).unwrap(), (0.0, 4.0));
        assert_eq!(edges(4.0).unwrap(), (1.0, 9.0));
        let (a, b) = edges(2.0).unwrap();
        assert!((a - 0.171573).abs() < 1e-6 && (b - 5.828427).abs() < 1e-6);
        assert!(edges(0.5).is_err());
    }

    #[test]
    fn density_at_center_rho_one() {
        let d = mp_density(2.0, 1.0).unwrap();
        assert!((d - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert_eq!(mp_density(5.0, 1.0).unwrap(), 0.0);
        assert_eq!(mp_density(-1.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn double_root_at_upper_edge() {
        let m = stieltjes_mp(Complex64::new(4.0, 0.0), 1.0).unwrap();
        assert_eq!(m, Complex64::new(-0.5, 0.0));
    }

    #[test]
    fn real_support_is_rejected() {
        assert!(stieltjes_mp(Complex64::new(2.0, 0.0), 1.0).is_err());
        assert!(stieltjes_mp(Complex64::new(0.0, 0.0), 1.0).is_err());
        let m = stieltjes_mp(Complex64::new(0.0, 0.0), 2.0).unwrap();
        assert!((m.re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn full_mass_quantile_is_upper_edge() {
        let e = classical_location(64, 64, 2.0).unwrap();
        assert_eq!(e, edges(2.0).unwrap().1);
        assert!(classical_location(0, 64, 2.0).is_err());
    }

    #[test]
    fn domain_closed_boundary() {
        let n = 1000usize;
        let p = DomainParams::default();
        let ep = edges(2.0).unwrap().1;
        let nf = n as f64;
        let z = Complex64::new(ep + nf.powf(-2.0 / 3.0 + 0.1), nf.powf(-0.8));
        assert!(in_domain(z, n, 2.0, &p).in_s_edge);
        let z = Complex64::new(ep, 2.0);
        assert!(!in_domain(z, n, 2.0, &p).in_s);
    }
}
