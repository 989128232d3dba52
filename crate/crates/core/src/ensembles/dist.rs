//! Standardized entry laws: mean 0, variance 1 (and E h² = 0 when complex).

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Complex64;

/// Law of the standardized variate h = √N·X_ij.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum EntryDistribution {
    Gaussian,
    ComplexGaussian,
    Rademacher,
    /// Uniform on [-√3, √3].
    Uniform,
    /// Two atoms, the lower one with probability `p`.
    SkewedTwoPoint {
        p: f64,
    },
}

impl EntryDistribution {
    pub const SKEWED_DEFAULT_P: f64 = 0.25;

    /// Parses `gaussian`, `complex-gaussian`, `rademacher`, `uniform`,
    /// `skewed` or `skewed:<p>`.
    pub fn from_name(name: &str) -> Result<Self> {
        let lower = name.trim().to_ascii_lowercase();
        match lower.as_str() {
            "gaussian" | "normal" => Ok(Self::Gaussian),
            "complex-gaussian" | "complex_gaussian" => Ok(Self::ComplexGaussian),
            "rademacher" => Ok(Self::Rademacher),
            "uniform" => Ok(Self::Uniform),
            "skewed" => Ok(Self::SkewedTwoPoint {
                p: Self::SKEWED_DEFAULT_P,
            }),
            other => {
                if let Some(p) = other.strip_prefix("skewed:") {
                    let p: f64 = p.parse().map_err(|_| {
                        Error::Validation(format!("bad skewed parameter in {name:?}"))
                    })?;
                    if !(p > 0.0 && p < 1.0) || p == 0.5 {
                        return Err(Error::Validation(format!(
                            "skewed p = {p} must lie in (0,1) and differ from 1/2"
                        )));
                    }
                    Ok(Self::SkewedTwoPoint { p })
                } else {
                    Err(Error::Validation(format!(
                        "unknown entry distribution {name:?}"
                    )))
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Gaussian => "gaussian".into(),
            Self::ComplexGaussian => "complex-gaussian".into(),
            Self::Rademacher => "rademacher".into(),
            Self::Uniform => "uniform".into(),
            Self::SkewedTwoPoint { p } => format!("skewed:{p}"),
        }
    }

    /// The four real laws shipped for experiments.
    pub fn real_library() -> Vec<Self> {
        vec![
            Self::Gaussian,
            Self::Rademacher,
            Self::Uniform,
            Self::SkewedTwoPoint {
                p: Self::SKEWED_DEFAULT_P,
            },
        ]
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, Self::ComplexGaussian)
    }

    fn atoms(p: f64) -> (f64, f64) {
        (-((1.0 - p) / p).sqrt(), (p / (1.0 - p)).sqrt())
    }

    /// s⁽³⁾ = E h³ (zero for the complex law).
    pub fn third_cumulant(&self) -> f64 {
        match self {
            Self::SkewedTwoPoint { p } => (2.0 * p - 1.0) / (p * (1.0 - p)).sqrt(),
            _ => 0.0,
        }
    }

    /// s⁽⁴⁾ = E h⁴ - 3 for real laws, E|h|⁴ - 2 for the complex one.
    pub fn fourth_cumulant(&self) -> f64 {
        match self {
            Self::Gaussian | Self::ComplexGaussian => 0.0,
            Self::Rademacher => -2.0,
            Self::Uniform => -1.2,
            Self::SkewedTwoPoint { p } => (1.0 - 3.0 * p + 3.0 * p * p) / (p * (1.0 - p)) - 3.0,
        }
    }

    /// Exact raw moment E h^k of a real law.
    pub fn raw_moment(&self, k: u32) -> Result<f64> {
        let even = k % 2 == 0;
        Ok(match self {
            Self::ComplexGaussian => {
                return Err(Error::Unsupported("raw moments of the complex law".into()))
            }
            Self::Gaussian => {
                if even {
                    (1..k).step_by(2).map(|j| j as f64).product()
                } else {
                    0.0
                }
            }
            Self::Rademacher => {
                if even {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Uniform => {
                if even {
                    3f64.powf(k as f64 / 2.0) / (k as f64 + 1.0)
                } else {
                    0.0
                }
            }
            Self::SkewedTwoPoint { p } => {
                let (a, b) = Self::atoms(*p);
                p * a.powi(k as i32) + (1.0 - p) * b.powi(k as i32)
            }
        })
    }

    /// One real variate; the complex law returns its real part scaled to unit variance.
    pub fn sample_real<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Gaussian | Self::ComplexGaussian => rng.sample(StandardNormal),
            Self::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Self::Uniform => 3f64.sqrt() * (2.0 * rng.random::<f64>() - 1.0),
            Self::SkewedTwoPoint { p } => {
                let (a, b) = Self::atoms(*p);
                if rng.random::<f64>() < *p {
                    a
                } else {
                    b
                }
            }
        }
    }

    /// One complex variate; real laws return a real value.
    pub fn sample_complex<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        match self {
            Self::ComplexGaussian => {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            }
            _ => Complex64::new(self.sample_real(rng), 0.0),
        }
    }

    /// Fills `out` with `scale`·h for a real law, in order.
    pub fn fill_real<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64], scale: f64) {
        match self {
            Self::Rademacher => {
                // 64 signs per draw
                for chunk in out.chunks_mut(64) {
                    let bits: u64 = rng.random();
                    for (j, v) in chunk.iter_mut().enumerate() {
                        *v = if (bits >> j) & 1 == 1 { scale } else { -scale };
                    }
                }
            }
            _ => {
                for v in out.iter_mut() {
                    *v = scale * self.sample_real(rng);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for d in EntryDistribution::real_library() {
            assert_eq!(EntryDistribution::from_name(&d.name()).unwrap(), d);
        }
        assert!(EntryDistribution::from_name("cauchy").is_err());
        assert!(EntryDistribution::from_name("skewed:0.5").is_err());
    }

    #[test]
    fn standardized_moments() {
        for d in EntryDistribution::real_library() {
            assert!(d.raw_moment(1).unwrap().abs() < 1e-15);
            assert!((d.raw_moment(2).unwrap() - 1.0).abs() < 1e-14);
            assert!((d.raw_moment(3).unwrap() - d.third_cumulant()).abs() < 1e-14);
            assert!((d.raw_moment(4).unwrap() - 3.0 - d.fourth_cumulant()).abs() < 1e-13);
        }
    }
}
