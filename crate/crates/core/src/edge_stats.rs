//! Empirical CDFs, Kolmogorov distances to Tracy–Widom over r ≥ r0, and
//! log-log rate fits across N.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensembles::{
    laguerre_tridiagonal_largest, largest_gram_eigenvalue, rescale_largest, sample_matrix, stream,
    EdgeVariant, EntryDistribution,
};
use crate::error::{domain, Error, Result};
use crate::mc::run_trials;
use crate::mp_law::AspectRatio;
use crate::tracy_widom::{tw_cdf_total, Beta};

pub const DEFAULT_R0: f64 = -3.5;
pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// E[KS] of n samples against their own law, ≈ 0.87/√n.
pub fn noise_floor(n: usize) -> f64 {
    0.87 / (n as f64).sqrt()
}

/// Right-continuous empirical CDF.
#[derive(Debug, Clone)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return domain("empty sample");
        }
        if samples.iter().any(|v| v.is_nan()) {
            return Err(Error::Data("NaN sample".into()));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// F_n(x-).
    pub fn eval_left(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v < x) as f64 / self.sorted.len() as f64
    }

    /// sup_{r ≥ r0} |F_n(r) - F(r)| for a continuous nondecreasing F; the
    /// sup is attained at r0, at a sample point or at a left limit.
    pub fn ks_sup<F: Fn(f64) -> f64>(&self, cdf: F, r0: f64) -> f64 {
        let n = self.sorted.len() as f64;
        let start = self.sorted.partition_point(|&v| v < r0);
        let mut d = (self.eval(r0) - cdf(r0)).abs();
        let mut i = start;
        while i < self.sorted.len() {
            let x = self.sorted[i];
            let mut j = i;
            while j < self.sorted.len() && self.sorted[j] == x {
                j += 1;
            }
            let f = cdf(x);
            d = d
                .max((j as f64 / n - f).abs())
                .max((i as f64 / n - f).abs());
            i = j;
        }
        d
    }
}

pub fn ks_sup<F: Fn(f64) -> f64>(samples: &[f64], cdf: F, r0: f64) -> Result<f64> {
    if !r0.is_finite() {
        return domain("r0 must be finite");
    }
    Ok(Ecdf::new(samples)?.ks_sup(cdf, r0))
}

/// Weighted log-log fit of KS against N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub n_list: Vec<usize>,
    pub ks_list: Vec<f64>,
    pub stderr_list: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// 95% interval for the slope.
    pub slope_ci: (f64, f64),
}

// weighted least squares y = a + b x, returns (b, a, se_b)
fn wls(x: &[f64], y: &[f64], w: &[f64]) -> (f64, f64, f64) {
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(a, b)| b * (a - mx) * (a - mx)).sum();
    let sxy: f64 = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((a, c), b)| b * (a - mx) * (c - my))
        .sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx, (1.0 / sxx).sqrt())
}

fn check_fit_inputs(n_list: &[usize], ks: &[f64], se: &[f64]) -> Result<()> {
    if n_list.len() < 3 {
        return domain(format!("need at least 3 sizes, got {}", n_list.len()));
    }
    if ks.len() != n_list.len() || se.len() != n_list.len() {
        return Err(Error::Validation("list lengths differ".into()));
    }
    for ((n, k), s) in n_list.iter().zip(ks).zip(se) {
        if !(*s > 0.0 && k.is_finite()) {
            return Err(Error::Validation(format!(
                "N = {n}: bad KS {k} or stderr {s}"
            )));
        }
        if *k <= 3.0 * s {
            return Err(Error::NoiseGate(format!(
                "N = {n}: KS {k:.5} is within 3x its noise level {s:.5}; more trials are needed"
            )));
        }
    }
    Ok(())
}

/// WLS on (log N, log KS) with weights (KS/stderr)²; the interval is the
/// normal-theory one.
pub fn rate_fit(n_list: &[usize], ks_list: &[f64], stderr_list: &[f64]) -> Result<RateFit> {
    check_fit_inputs(n_list, ks_list, stderr_list)?;
    let x: Vec<f64> = n_list.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = ks_list.iter().map(|k| k.ln()).collect();
    let w: Vec<f64> = ks_list
        .iter()
        .zip(stderr_list)
        .map(|(k, s)| (k / s).powi(2))
        .collect();
    let (slope, intercept, se) = wls(&x, &y, &w);
    Ok(RateFit {
        n_list: n_list.to_vec(),
        ks_list: ks_list.to_vec(),
        stderr_list: stderr_list.to_vec(),
        slope,
        intercept,
        slope_ci: (slope - 1.96 * se, slope + 1.96 * se),
    })
}

/// Rate fit from raw samples: KS at r ≥ r0 with the noise floor as its
/// stderr, and a percentile bootstrap interval from resampled trials.
pub fn rate_fit_bootstrap<F: Fn(f64) -> f64 + Sync>(
    n_list: &[usize],
    samples: &[Vec<f64>],
    cdf: F,
    r0: f64,
    resamples: usize,
    seed: u64,
) -> Result<RateFit> {
    if samples.len() != n_list.len() {
        return Err(Error::Validation("one sample set per N is needed".into()));
    }
    let ks: Vec<f64> = samples
        .iter()
        .map(|s| ks_sup(s, &cdf, r0))
        .collect::<Result<_>>()?;
    let se: Vec<f64> = samples.iter().map(|s| noise_floor(s.len())).collect();
    let mut fit = rate_fit(n_list, &ks, &se)?;
    if resamples == 0 {
        return Ok(fit);
    }
    let x: Vec<f64> = n_list.iter().map(|&n| (n as f64).ln()).collect();
    let w: Vec<f64> = ks.iter().zip(&se).map(|(k, s)| (k / s).powi(2)).collect();
    let mut slopes = run_trials(resamples as u64, |b| {
        let mut rng = stream(seed, "bootstrap", b);
        let y: Vec<f64> = samples
            .iter()
            .map(|s| {
                let re: Vec<f64> = (0..s.len())
                    .map(|_| s[rng.random_range(0..s.len())])
                    .collect();
                Ecdf::new(&re)
                    .expect("nonempty")
                    .ks_sup(&cdf, r0)
                    .max(f64::MIN_POSITIVE)
                    .ln()
            })
            .collect();
        wls(&x, &y, &w).0
    });
    slopes.sort_by(f64::total_cmp);
    let q =
        |p: f64| slopes[((p * (slopes.len() - 1) as f64).round() as usize).min(slopes.len() - 1)];
    fit.slope_ci = (q(0.025), q(0.975));
    Ok(fit)
}

/// How the largest eigenvalue is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "kebab-case")]
pub enum EdgeSampler {
    /// Bidiagonal β-Laguerre model.
    Tridiagonal { beta: Beta },
    /// Dense matrix with the given entries, SVD route.
    Dense { dist: EntryDistribution },
}

impl EdgeSampler {
    pub fn beta(&self) -> Beta {
        match self {
            Self::Tridiagonal { beta } => *beta,
            Self::Dense { dist } => {
                if dist.is_complex() {
                    Beta::Two
                } else {
                    Beta::One
                }
            }
        }
    }

    pub fn largest(&self, dims: AspectRatio, seed: u64, trial: u64) -> Result<f64> {
        match self {
            Self::Tridiagonal { beta } => laguerre_tridiagonal_largest(
                dims.n_cols(),
                dims.m_rows(),
                *beta,
                &mut stream(seed, "edge-tri", trial),
            ),
            Self::Dense { dist } => largest_gram_eigenvalue(&sample_matrix(
                dims,
                *dist,
                &mut stream(seed, "edge-dense", trial),
            )),
        }
    }
}

/// Rescaled largest eigenvalues, one per trial, in trial order.
pub fn rescaled_samples(
    sampler: EdgeSampler,
    dims: AspectRatio,
    variant: EdgeVariant,
    trials: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    run_trials(trials, |k| {
        Ok(rescale_largest(
            sampler.largest(dims, seed, k)?,
            dims,
            variant,
        ))
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsRow {
    pub n: usize,
    pub m: usize,
    pub trials: u64,
    pub ks: f64,
    pub noise_floor: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsRateReport {
    pub sampler: EdgeSampler,
    pub variant: EdgeVariant,
    pub r0: f64,
    pub rows: Vec<KsRow>,
    /// Absent when the noise gate refused the fit.
    pub fit: Option<RateFit>,
    pub fit_error: Option<String>,
}

impl KsRateReport {
    pub fn decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].ks < w[0].ks)
    }
}

/// KS distance to TW_β for each N (M = ratio·N), then the bootstrap fit.
pub fn ks_rate_experiment(
    sampler: EdgeSampler,
    n_list: &[usize],
    ratio: f64,
    trials: u64,
    variant: EdgeVariant,
    r0: f64,
    seed: u64,
) -> Result<KsRateReport> {
    if n_list.is_empty() || trials == 0 {
        return domain("need at least one N and one trial");
    }
    let beta = sampler.beta();
    let cdf = move |s: f64| tw_cdf_total(s, beta);
    let mut rows = Vec::with_capacity(n_list.len());
    let mut all = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let m = (ratio * n as f64).round() as usize;
        let dims = AspectRatio::new(m, n)?;
        let start = std::time::Instant::now();
        let s = rescaled_samples(sampler, dims, variant, trials, seed)?;
        let seconds = start.elapsed().as_secs_f64();
        rows.push(KsRow {
            n,
            m,
            trials,
            ks: ks_sup(&s, cdf, r0)?,
            noise_floor: noise_floor(trials as usize),
            seconds,
        });
        all.push(s);
    }
    let (fit, fit_error) =
        match rate_fit_bootstrap(n_list, &all, cdf, r0, BOOTSTRAP_RESAMPLES, seed) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };
    Ok(KsRateReport {
        sampler,
        variant,
        r0,
        rows,
        fit,
        fit_error,
    })
}
