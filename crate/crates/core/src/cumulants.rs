//! Moments and cumulants of real variates, cumulant decay along the flow
//! and a Monte Carlo check of the cumulant expansion
//! E[h f(h)] = Σ_{p<l} c^{(p+1)}/p! E[f^{(p)}(h)] + R_{l+1}.

use serde::{Deserialize, Serialize};

use crate::ensembles::{stream, EntryDistribution};
use crate::error::{domain, Error, Result};
use crate::mc::run_trials;
use crate::quadrature::gl64;

pub const MAX_ORDER: usize = 12;
pub const MAX_TRUNCATION: usize = 8;
/// Cutoff M of the remainder bound.
pub const REMAINDER_CUTOFF: f64 = 5.0;

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// c^{(1)}, ..., c^{(p)} stored from index 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantVector {
    pub values: Vec<f64>,
}

impl CumulantVector {
    /// c^{(k)}, 1-based.
    pub fn get(&self, k: usize) -> f64 {
        self.values[k - 1]
    }
}

/// c_p = m_p - Σ_{k=1}^{p-1} C(p-1, k-1) c_k m_{p-k}, from m_1..m_p.
pub fn cumulants_from_moments(moments: &[f64]) -> Result<CumulantVector> {
    if moments.len() > MAX_ORDER {
        return domain(format!("order {} above {MAX_ORDER}", moments.len()));
    }
    let m = |k: usize| if k == 0 { 1.0 } else { moments[k - 1] };
    let mut c: Vec<f64> = Vec::with_capacity(moments.len());
    for p in 1..=moments.len() {
        let s: f64 = (1..p)
            .map(|k| binom(p - 1, k - 1) * c[k - 1] * m(p - k))
            .sum();
        c.push(m(p) - s);
    }
    Ok(CumulantVector { values: c })
}

/// Inverse of [`cumulants_from_moments`].
pub fn moments_from_cumulants(c: &CumulantVector) -> Vec<f64> {
    let mut m = vec![1.0];
    for p in 1..=c.values.len() {
        let v: f64 = (1..=p)
            .map(|k| binom(p - 1, k - 1) * c.get(k) * m[p - k])
            .sum();
        m.push(v);
    }
    m.remove(0);
    m
}

/// Exact cumulants c^{(1)}..c^{(p)} of a real law.
pub fn cumulants_of(dist: EntryDistribution, p: usize) -> Result<CumulantVector> {
    let moments = (1..=p as u32)
        .map(|k| dist.raw_moment(k))
        .collect::<Result<Vec<_>>>()?;
    cumulants_from_moments(&moments)
}

/// s^{(p+1)}(t) = s0·e^{-(p+1)t/2}.
pub fn decayed_cumulant(s0: f64, order: u32, t: f64) -> Result<f64> {
    if order < 3 {
        return domain(format!("cumulant order {order} below 3"));
    }
    if !(t >= 0.0) {
        return domain(format!("t = {t} must be nonnegative"));
    }
    Ok(s0 * (-(order as f64) * t / 2.0).exp())
}

/// Test functions with closed-form derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestFunction {
    /// Σ a_k x^k, degree at most 6.
    Polynomial {
        coeffs: Vec<f64>,
    },
    /// sin(x)·e^{-x²}
    SinGauss,
    Tanh,
}

impl TestFunction {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "sin-gauss" => Ok(Self::SinGauss),
            "tanh" => Ok(Self::Tanh),
            "poly" | "polynomial" => Ok(Self::default_polynomial()),
            _ => Err(Error::Unsupported(format!("test function {name}"))),
        }
    }

    /// 1 + x - x²/2 + x³/3 + x⁴/8.
    pub fn default_polynomial() -> Self {
        Self::Polynomial {
            coeffs: vec![1.0, 1.0, -0.5, 1.0 / 3.0, 0.125],
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Polynomial { coeffs } => format!("poly{}", coeffs.len().saturating_sub(1)),
            Self::SinGauss => "sin-gauss".into(),
            Self::Tanh => "tanh".into(),
        }
    }

    pub fn shipped() -> Vec<Self> {
        vec![Self::default_polynomial(), Self::SinGauss, Self::Tanh]
    }

    fn validate(&self) -> Result<()> {
        if let Self::Polynomial { coeffs } = self {
            if coeffs.is_empty() || coeffs.len() > 7 {
                return domain("polynomial degree must be 0..=6");
            }
        }
        Ok(())
    }

    /// f, f', ..., f^{(k)} at x.
    pub fn derivatives(&self, k: usize, x: f64) -> Vec<f64> {
        match self {
            Self::Polynomial { coeffs } => {
                let mut c = coeffs.clone();
                let mut out = Vec::with_capacity(k + 1);
                for _ in 0..=k {
                    out.push(c.iter().rev().fold(0.0, |acc, a| acc * x + a));
                    c = c
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(i, a)| a * i as f64)
                        .collect();
                }
                out
            }
            Self::SinGauss => {
                // d^j e^{ix - x²} = e^{ix - x²} P_j(x), P_{j+1} = P_j' + (i - 2x) P_j
                let e = (-x * x).exp();
                let (s, co) = x.sin_cos();
                let mut re = vec![1.0];
                let mut im = vec![0.0];
                let mut out = Vec::with_capacity(k + 1);
                for _ in 0..=k {
                    let (pr, pi) = (horner(&re, x), horner(&im, x));
                    // Im((co + i s)(pr + i pi))
                    out.push(e * (co * pi + s * pr));
                    let n = re.len() + 1;
                    let mut nr = vec![0.0; n];
                    let mut ni = vec![0.0; n];
                    for (j, (&a, &b)) in re.iter().zip(&im).enumerate() {
                        if j > 0 {
                            nr[j - 1] += a * j as f64;
                            ni[j - 1] += b * j as f64;
                        }
                        // (i - 2x)(a + ib) = (-b - 2xa) + i(a - 2xb)
                        nr[j] -= b;
                        ni[j] += a;
                        nr[j + 1] -= 2.0 * a;
                        ni[j + 1] -= 2.0 * b;
                    }
                    re = nr;
                    im = ni;
                }
                out
            }
            Self::Tanh => {
                // d^j tanh = P_j(T), P_{j+1}(T) = P_j'(T)(1 - T²)
                let t = x.tanh();
                let mut p = vec![0.0, 1.0];
                let mut out = Vec::with_capacity(k + 1);
                for _ in 0..=k {
                    out.push(horner(&p, t));
                    let d: Vec<f64> = p
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(i, a)| a * i as f64)
                        .collect();
                    let mut next = vec![0.0; d.len() + 2];
                    for (i, a) in d.iter().enumerate() {
                        next[i] += a;
                        next[i + 2] -= a;
                    }
                    p = next;
                }
                out
            }
        }
    }

    /// sup |f^{(l)}| over |x| ≤ a (a = ∞ for the whole line), from a
    /// 10⁵-point grid; infinite for a polynomial whose l-th derivative is
    /// not constant on the line.
    pub fn sup_derivative(&self, l: usize, a: f64) -> f64 {
        if let Self::Polynomial { coeffs } = self {
            if l >= coeffs.len() {
                return 0.0;
            }
            if a.is_infinite() && l + 1 < coeffs.len() {
                return f64::INFINITY;
            }
        }
        // beyond |x| = 40 every shipped bounded derivative is monotone or
        // negligible
        let r = a.min(40.0);
        let pts = 100_000;
        (0..=pts)
            .map(|i| {
                let x = -r + 2.0 * r * i as f64 / pts as f64;
                self.derivatives(l, x)[l].abs()
            })
            .fold(0.0, f64::max)
    }
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

/// (E[|h|^k 1_{|h|≤a}], E[|h|^k 1_{|h|>a}]).
pub fn split_abs_moment(dist: EntryDistribution, k: u32, a: f64) -> Result<(f64, f64)> {
    let kf = k as f64;
    Ok(match dist {
        EntryDistribution::ComplexGaussian => {
            return Err(Error::Unsupported("real laws only".into()))
        }
        EntryDistribution::Rademacher => {
            if a >= 1.0 {
                (1.0, 0.0)
            } else {
                (0.0, 1.0)
            }
        }
        EntryDistribution::SkewedTwoPoint { p } => {
            let lo = -((1.0 - p) / p).sqrt();
            let hi = (p / (1.0 - p)).sqrt();
            let mut s = (0.0, 0.0);
            for (x, w) in [(lo, p), (hi, 1.0 - p)] {
                let v = w * x.abs().powf(kf);
                if x.abs() <= a {
                    s.0 += v;
                } else {
                    s.1 += v;
                }
            }
            s
        }
        EntryDistribution::Uniform => {
            let r = 3f64.sqrt();
            let full = |b: f64| b.powf(kf + 1.0) / ((kf + 1.0) * r);
            if a >= r {
                (full(r), 0.0)
            } else {
                (full(a), full(r) - full(a))
            }
        }
        EntryDistribution::Gaussian => {
            let rule = gl64();
            let dens = |x: f64| {
                2.0 * x.powf(kf) * (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
            };
            let inner = rule.integrate(0.0, a, dens);
            let mut outer = 0.0;
            for j in 0..20 {
                let lo = a + 2.0 * j as f64;
                outer += rule.integrate(lo, lo + 2.0, dens);
            }
            (inner, outer)
        }
    })
}

/// Explicit remainder bound with cutoff M. Subtracting the degree-(l-1)
/// Taylor polynomial at 0 (for which the expansion is exact) leaves
/// |R| ≤ sup|f^{(l)}|·(E|h|^{l+1}/l! + Σ_{p<l} |c^{(p+1)}|/p!·E|h|^{l-p}/(l-p)!),
/// and each moment is split at |h| = M.
pub fn remainder_bound(
    dist: EntryDistribution,
    f: &TestFunction,
    l: usize,
    cutoff: f64,
) -> Result<f64> {
    let c = cumulants_of(dist, l)?;
    let fact = |n: usize| (1..=n).map(|v| v as f64).product::<f64>();
    let mut inner = 0.0;
    let mut outer = 0.0;
    let (a, b) = split_abs_moment(dist, (l + 1) as u32, cutoff)?;
    inner += a / fact(l);
    outer += b / fact(l);
    for p in 0..l {
        let w = c.get(p + 1).abs() / fact(p) / fact(l - p);
        let (a, b) = split_abs_moment(dist, (l - p) as u32, cutoff)?;
        inner += w * a;
        outer += w * b;
    }
    let local = f.sup_derivative(l, cutoff);
    let mut total = inner * local;
    if outer > 0.0 {
        total += outer * f.sup_derivative(l, f64::INFINITY);
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub dist: EntryDistribution,
    pub function: String,
    pub l: usize,
    pub samples: u64,
    /// Ê[h f(h)]
    pub lhs: f64,
    /// Σ_{p<l} c^{(p+1)}/p!·Ê[f^{(p)}(h)]
    pub rhs: f64,
    /// |lhs - rhs|, computed from the paired per-sample difference.
    pub gap: f64,
    /// Standard error of the paired difference.
    pub stderr: f64,
    pub bound: f64,
}

impl ExpansionReport {
    /// gap ≤ min(bound, k·stderr).
    pub fn passes(&self, k: f64) -> bool {
        self.gap <= self.bound.min(k * self.stderr)
    }
}

const CHUNK: u64 = 10_000;

pub fn expansion_check(
    dist: EntryDistribution,
    f: &TestFunction,
    l: usize,
    samples: u64,
    seed: u64,
) -> Result<ExpansionReport> {
    f.validate()?;
    if dist.is_complex() {
        return Err(Error::Unsupported(
            "the expansion check takes real laws".into(),
        ));
    }
    if l == 0 || l > MAX_TRUNCATION {
        return domain(format!("truncation order {l} outside 1..={MAX_TRUNCATION}"));
    }
    if samples < 2 {
        return domain("need at least two samples");
    }
    let c = cumulants_of(dist, l)?;
    let fact = |n: usize| (1..=n).map(|v| v as f64).product::<f64>();
    let w: Vec<f64> = (0..l).map(|p| c.get(p + 1) / fact(p)).collect();
    // per chunk: sums of lhs and rhs, then mean and M2 of the difference
    let chunks = samples.div_ceil(CHUNK);
    let parts = run_trials(chunks, |k| {
        let mut rng = stream(seed, "cumulant", k);
        let count = CHUNK.min(samples - k * CHUNK);
        let mut buf = vec![0.0; count as usize];
        dist.fill_real(&mut rng, &mut buf, 1.0);
        let (mut sl, mut sr) = (0.0, 0.0);
        let diffs: Vec<f64> = buf
            .iter()
            .map(|&h| {
                let d = f.derivatives(l - 1, h);
                let left = h * d[0];
                let right: f64 = w.iter().zip(&d).map(|(a, b)| a * b).sum();
                sl += left;
                sr += right;
                left - right
            })
            .collect();
        let mean = diffs.iter().sum::<f64>() / count as f64;
        let m2: f64 = diffs.iter().map(|d| (d - mean) * (d - mean)).sum();
        [sl, sr, count as f64, mean, m2]
    });
    // Chan et al. pairwise combination of (count, mean, M2)
    let (mut cnt, mut mean, mut m2) = (0.0, 0.0, 0.0);
    for p in &parts {
        let (nb, mb, m2b) = (p[2], p[3], p[4]);
        let tot = cnt + nb;
        let delta = mb - mean;
        mean += delta * nb / tot;
        m2 += m2b + delta * delta * cnt * nb / tot;
        cnt = tot;
    }
    let sum = |i: usize| crate::mc::pairwise_sum(&parts.iter().map(|p| p[i]).collect::<Vec<_>>());
    let n = samples as f64;
    let var = m2 / (n - 1.0);
    Ok(ExpansionReport {
        dist,
        function: f.name(),
        l,
        samples,
        lhs: sum(0) / n,
        rhs: sum(1) / n,
        gap: mean.abs(),
        stderr: (var / n).sqrt(),
        bound: remainder_bound(dist, f, l, REMAINDER_CUTOFF)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binom(5, 2), 10.0);
        assert_eq!(binom(7, 0), 1.0);
    }
}
