//! Green function comparison along the Ornstein–Uhlenbeck flow.

use serde::{Deserialize, Serialize};

use super::counting::{cutoff_f, default_window, observable_chi};
use super::spectrum::Spectrum;
use crate::ensembles::{
    flow_coefficients, flow_matrix, sample_gaussian_like, sample_matrix, stream, DataMatrix,
    EntryDistribution, FlowState,
};
use crate::error::{domain, Result};
use crate::mc::{run_trials, MeanStderr};
use crate::mp_law::AspectRatio;
use crate::tracy_widom::Beta;
use crate::Complex64;

/// Fewer trials than this leave the standard errors meaningless.
pub const MIN_TRIALS: u64 = 100;

/// z = E₊ + i·N^{-0.75}.
pub fn edge_point(dims: AspectRatio) -> Complex64 {
    let n = dims.n_cols() as f64;
    Complex64::new(dims.model().e_plus, n.powf(-0.75))
}

/// X(t) for one trial; X0 and W use separate streams so that X0 is shared
/// across the t grid.
pub fn flowed_matrix(
    dist: EntryDistribution,
    dims: AspectRatio,
    t: f64,
    seed: u64,
    trial: u64,
) -> Result<DataMatrix> {
    flow_coefficients(t)?;
    let x0 = sample_matrix(dims, dist, &mut stream(seed, "flow-x0", trial));
    if t == 0.0 {
        return Ok(x0);
    }
    let w = sample_gaussian_like(&x0, &mut stream(seed, "flow-w", trial));
    flow_matrix(&FlowState { x0, w, t })
}

/// Per-trial functionals at one spectral point.
#[derive(Debug, Clone, Copy)]
struct Functionals {
    re_m: f64,
    im_m: f64,
    f_chi: f64,
}

fn functionals(
    spectrum: &Spectrum,
    z: Complex64,
    window: (f64, f64),
    dims: AspectRatio,
) -> Result<Functionals> {
    let m = spectrum.stieltjes(z);
    let chi = observable_chi(spectrum, window.0, window.1, z.im, &dims.model())?;
    Ok(Functionals {
        re_m: m.re,
        im_m: m.im,
        f_chi: cutoff_f(chi),
    })
}

/// Monte Carlo means of Re m_N, Im m_N and F(𝒳).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalMeans {
    pub re_m: MeanStderr,
    pub im_m: MeanStderr,
    pub f_chi: MeanStderr,
}

fn summarize(v: &[Functionals]) -> FunctionalMeans {
    let col = |f: fn(&Functionals) -> f64| MeanStderr::of(&v.iter().map(f).collect::<Vec<_>>());
    FunctionalMeans {
        re_m: col(|f| f.re_m),
        im_m: col(|f| f.im_m),
        f_chi: col(|f| f.f_chi),
    }
}

/// |Δ| and |Δ|/stderr for one functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub abs: f64,
    pub combined_stderr: f64,
    pub z_score: f64,
}

impl Discrepancy {
    fn between(a: &MeanStderr, b: &MeanStderr) -> Self {
        let (abs, se) = a.difference(b);
        Self {
            abs,
            combined_stderr: se,
            z_score: if se > 0.0 {
                abs / se
            } else if abs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            },
        }
    }

    pub fn within(&self, k: f64) -> bool {
        self.abs <= k * self.combined_stderr
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GfcRow {
    pub t: f64,
    pub sample: FunctionalMeans,
    pub re_m: Discrepancy,
    pub im_m: Discrepancy,
    pub f_chi: Discrepancy,
    /// N^{1/3}·Ê[Im m_N]
    pub scaled_im_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GfcReport {
    pub dist: EntryDistribution,
    pub n: usize,
    pub m: usize,
    pub z: Complex64,
    pub window: (f64, f64),
    pub trials: u64,
    pub reference: FunctionalMeans,
    pub rows: Vec<GfcRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GfcConfig {
    pub dist: EntryDistribution,
    pub dims: AspectRatio,
    pub t_grid: Vec<f64>,
    /// Defaults to [`edge_point`].
    pub z: Option<Complex64>,
    /// Defaults to [`default_window`].
    pub window: Option<(f64, f64)>,
    pub trials: u64,
    pub seed: u64,
}

/// Gaussian reference spectrum from the bidiagonal model.
pub fn gaussian_reference_spectrum(
    dims: AspectRatio,
    complex: bool,
    seed: u64,
    trial: u64,
) -> Result<Spectrum> {
    let beta = if complex { Beta::Two } else { Beta::One };
    Spectrum::gaussian(
        dims.n_cols(),
        dims.m_rows(),
        beta,
        &mut stream(seed, "gaussian-ref", trial),
    )
}

pub fn gfc_experiment(cfg: &GfcConfig) -> Result<GfcReport> {
    if cfg.trials < MIN_TRIALS {
        return domain(format!(
            "{} trials; at least {MIN_TRIALS} are needed",
            cfg.trials
        ));
    }
    if cfg.t_grid.is_empty() {
        return domain("empty t grid");
    }
    let dims = cfg.dims;
    let z = cfg.z.unwrap_or_else(|| edge_point(dims));
    if !(z.im > 0.0) {
        return domain("need Im z > 0");
    }
    let window = cfg.window.unwrap_or_else(|| default_window(dims.n_cols()));
    let complex = cfg.dist.is_complex();
    let reference = run_trials(cfg.trials, |k| {
        let s = gaussian_reference_spectrum(dims, complex, cfg.seed, k)?;
        functionals(&s, z, window, dims)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let reference = summarize(&reference);
    let n13 = (dims.n_cols() as f64).cbrt();
    let mut rows = Vec::with_capacity(cfg.t_grid.len());
    for &t in &cfg.t_grid {
        flow_coefficients(t)?;
        let v = run_trials(cfg.trials, |k| {
            let x = flowed_matrix(cfg.dist, dims, t, cfg.seed, k)?;
            functionals(&Spectrum::from_matrix(&x)?, z, window, dims)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let sample = summarize(&v);
        rows.push(GfcRow {
            t,
            re_m: Discrepancy::between(&sample.re_m, &reference.re_m),
            im_m: Discrepancy::between(&sample.im_m, &reference.im_m),
            f_chi: Discrepancy::between(&sample.f_chi, &reference.f_chi),
            scaled_im_m: n13 * sample.im_m.mean,
            sample,
        });
    }
    Ok(GfcReport {
        dist: cfg.dist,
        n: dims.n_cols(),
        m: dims.m_rows(),
        z,
        window,
        trials: cfg.trials,
        reference,
        rows,
    })
}

/// N^{1/3}·Ê[Im m_N(z)] with its standard error. Gaussian entries use the
/// bidiagonal model, everything else the dense route.
pub fn scaled_im_m(
    dist: EntryDistribution,
    dims: AspectRatio,
    z: Complex64,
    trials: u64,
    seed: u64,
) -> Result<MeanStderr> {
    let n13 = (dims.n_cols() as f64).cbrt();
    let v = run_trials(trials, |k| -> Result<f64> {
        let s = match dist {
            EntryDistribution::Gaussian | EntryDistribution::ComplexGaussian => {
                gaussian_reference_spectrum(dims, dist.is_complex(), seed, k)?
            }
            _ => {
                Spectrum::from_matrix(&sample_matrix(dims, dist, &mut stream(seed, "edge-im", k)))?
            }
        };
        Ok(n13 * s.stieltjes(z).im)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(MeanStderr::of(&v))
}
