//! One function per subcommand. Each returns its tables and summary; the
//! caller persists them.

use serde_json::json;
use twlab_core::cumulants::{expansion_check, TestFunction};
use twlab_core::edge_stats::{ks_rate_experiment, EdgeSampler};
use twlab_core::ensembles::{gram_eigenvalues, sample_matrix, stream};
use twlab_core::green::counting::default_window;
use twlab_core::green::{
    gfc_experiment, registry, registry_term, rigidity_check, term_average, trace_residual,
    GfcConfig, Spectrum,
};
use twlab_core::identities::{identity_suite, INVERSE_TOL, QUADRATIC_TOL, TRACE_TOL, WARD_TOL};
use twlab_core::kernels::{default_grid, kernel_rate_experiment, RateReport};
use twlab_core::mc::{run_trials, MeanStderr};
use twlab_core::tracy_widom::tw_cdf_total;
use twlab_core::{AspectRatio, Beta, Complex64, EdgeVariant, EntryDistribution};

use crate::config::{ExperimentConfig, Kind};
use crate::output::{Cell, Table};
use crate::CliError;

/// |m_N - m̃| ≤ C/(Nη) is counted as a local-law hit.
pub const LOCAL_LAW_C: f64 = 10.0;

pub struct Outcome {
    pub data: Table,
    pub plot: Option<Table>,
    pub summary: serde_json::Value,
    /// Set when an accuracy or noise gate refused the result.
    pub gate: Option<String>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    match cfg.kind.expect("resolved config") {
        Kind::TwTable => tw_table(),
        Kind::KernelRates => kernel_rates(cfg),
        Kind::KsScan => ks_scan(cfg),
        Kind::Gfc => gfc(cfg),
        Kind::Locallaw => locallaw(cfg),
        Kind::Rigidity => rigidity(cfg),
        Kind::CumulantCheck => cumulant_check(cfg),
        Kind::TermAverage => term_avg(cfg),
        Kind::Selftest => selftest(cfg),
    }
}

fn dist_of(cfg: &ExperimentConfig) -> Result<EntryDistribution, CliError> {
    let name = cfg.dist.as_deref().unwrap_or("gaussian");
    EntryDistribution::from_name(name).map_err(|e| CliError::Usage(format!("dist: {e}")))
}

fn shape(cfg: &ExperimentConfig, n: usize) -> Result<AspectRatio, CliError> {
    let m = (cfg.ratio.unwrap_or(2.0) * n as f64).round() as usize;
    Ok(AspectRatio::new(m, n)?)
}

fn spectral_point(cfg: &ExperimentConfig, dims: AspectRatio) -> Complex64 {
    let n = dims.n_cols() as f64;
    let e = cfg.energy.unwrap_or(dims.model().e_plus);
    let eta = cfg
        .eta
        .unwrap_or_else(|| n.powf(-cfg.eta_exponent.unwrap_or(0.75)));
    Complex64::new(e, eta)
}

fn first_dim(cfg: &ExperimentConfig) -> usize {
    cfg.dims
        .as_ref()
        .and_then(|d| d.first().copied())
        .expect("resolved dims")
}

fn tw_table() -> Result<Outcome, CliError> {
    let mut t = Table::new(&["s", "tw1", "tw2"]);
    for k in 0..=1600u32 {
        let s = (k as f64 - 1000.0) / 100.0;
        t.push(vec![
            s.into(),
            tw_cdf_total(s, Beta::One).into(),
            tw_cdf_total(s, Beta::Two).into(),
        ]);
    }
    Ok(Outcome {
        data: t,
        plot: None,
        summary: json!({ "spacing": 0.01, "range": [-10.0, 6.0] }),
        gate: None,
    })
}

fn kernel_rates(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let dims = cfg.dims.clone().expect("resolved dims");
    let hash = cfg.hash();
    let grid = default_grid();
    let two = kernel_rate_experiment(Beta::Two, &dims, &grid)?;
    // the orthogonal kernel exists only for even N
    let one: Result<RateReport, String> =
        kernel_rate_experiment(Beta::One, &dims, &grid).map_err(|e| e.to_string());
    let mut data = Table::new(&["N", "sup_err_beta1", "sup_err_beta2", "config_hash"]);
    let mut plot = Table::new(&["N", "sup_err_beta1", "sup_err_beta2"]);
    for (i, &n) in dims.iter().enumerate() {
        let e1 = one.as_ref().map(|r| r.sup_error[i]).unwrap_or(f64::NAN);
        let e2 = two.sup_error[i];
        data.push(vec![n.into(), e1.into(), e2.into(), hash.clone().into()]);
        plot.push(vec![n.into(), e1.into(), e2.into()]);
    }
    let ratios = |r: &RateReport| r.ratios(4);
    Ok(Outcome {
        data,
        plot: Some(plot),
        summary: json!({
            "beta2": { "slope": two.slope, "intercept": two.intercept, "ratios_4x": ratios(&two) },
            "beta1": match &one {
                Ok(r) => json!({ "slope": r.slope, "intercept": r.intercept, "ratios_4x": ratios(r) }),
                Err(e) => json!({ "error": e }),
            },
        }),
        gate: None,
    })
}

fn ks_scan(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let sampler = match cfg.sampler.as_deref() {
        Some("dense") => EdgeSampler::Dense {
            dist: dist_of(cfg)?,
        },
        _ => EdgeSampler::Tridiagonal {
            beta: Beta::from_int(cfg.beta.unwrap_or(1))?,
        },
    };
    let variant: EdgeVariant = cfg.variant.as_deref().unwrap_or("ma").parse()?;
    let dims = cfg.dims.clone().expect("resolved dims");
    let r = ks_rate_experiment(
        sampler,
        &dims,
        cfg.ratio.unwrap_or(2.0),
        cfg.trials.expect("resolved trials"),
        variant,
        cfg.r0.unwrap_or(-3.5),
        cfg.seed.expect("resolved seed"),
    )?;
    let hash = cfg.hash();
    let mut data = Table::new(&["N", "M", "trials", "ks", "noise_floor", "config_hash"]);
    let mut plot = Table::new(&["N", "KS", "stderr", "fitline"]);
    for row in &r.rows {
        data.push(vec![
            row.n.into(),
            row.m.into(),
            row.trials.into(),
            row.ks.into(),
            row.noise_floor.into(),
            hash.clone().into(),
        ]);
        let fitline = r
            .fit
            .as_ref()
            .map(|f| (f.intercept + f.slope * (row.n as f64).ln()).exp())
            .unwrap_or(f64::NAN);
        plot.push(vec![
            row.n.into(),
            row.ks.into(),
            row.noise_floor.into(),
            fitline.into(),
        ]);
    }
    let gated: Vec<usize> = r
        .rows
        .iter()
        .filter(|w| w.ks <= 3.0 * w.noise_floor)
        .map(|w| w.n)
        .collect();
    let gate = (!gated.is_empty())
        .then(|| format!("KS within 3x the noise floor at N = {gated:?}; raise trials"));
    Ok(Outcome {
        data,
        plot: Some(plot),
        summary: json!({
            "fit": r.fit,
            "fit_error": r.fit_error,
            "decreasing": r.decreasing(),
            "seconds": r.rows.iter().map(|w| w.seconds).collect::<Vec<_>>(),
        }),
        gate,
    })
}

fn gfc(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let dims = shape(cfg, first_dim(cfg))?;
    let window = match (cfg.kappa1, cfg.kappa2) {
        (None, None) => None,
        (a, b) => {
            let (d1, d2) = default_window(dims.n_cols());
            Some((a.unwrap_or(d1), b.unwrap_or(d2)))
        }
    };
    let gc = GfcConfig {
        dist: dist_of(cfg)?,
        dims,
        t_grid: cfg.t_grid.clone().expect("resolved t grid"),
        z: Some(spectral_point(cfg, dims)),
        window,
        trials: cfg.trials.expect("resolved trials"),
        seed: cfg.seed.expect("resolved seed"),
    };
    let r = gfc_experiment(&gc)?;
    let hash = cfg.hash();
    let mut data = Table::new(&[
        "t",
        "re_m",
        "re_m_se",
        "im_m",
        "im_m_se",
        "f",
        "f_se",
        "d_re",
        "d_re_se",
        "d_im",
        "d_im_se",
        "d_f",
        "d_f_se",
        "scaled_im_m",
        "config_hash",
    ]);
    let mut plot = Table::new(&[
        "t", "delta_re", "delta_im", "delta_f", "se_re", "se_im", "se_f",
    ]);
    for row in &r.rows {
        let s = &row.sample;
        data.push(vec![
            row.t.into(),
            s.re_m.mean.into(),
            s.re_m.stderr.into(),
            s.im_m.mean.into(),
            s.im_m.stderr.into(),
            s.f_chi.mean.into(),
            s.f_chi.stderr.into(),
            row.re_m.abs.into(),
            row.re_m.combined_stderr.into(),
            row.im_m.abs.into(),
            row.im_m.combined_stderr.into(),
            row.f_chi.abs.into(),
            row.f_chi.combined_stderr.into(),
            row.scaled_im_m.into(),
            hash.clone().into(),
        ]);
        plot.push(vec![
            row.t.into(),
            row.re_m.abs.into(),
            row.im_m.abs.into(),
            row.f_chi.abs.into(),
            row.re_m.combined_stderr.into(),
            row.im_m.combined_stderr.into(),
            row.f_chi.combined_stderr.into(),
        ]);
    }
    Ok(Outcome {
        data,
        plot: Some(plot),
        summary: json!({
            "n": r.n, "m": r.m, "z": [r.z.re, r.z.im], "window": r.window, "reference": r.reference,
        }),
        gate: None,
    })
}

/// One spectrum per trial: the bidiagonal model for Gaussian laws, the
/// dense route otherwise.
fn spectrum(
    dist: EntryDistribution,
    dims: AspectRatio,
    seed: u64,
    tag: &str,
    k: u64,
) -> twlab_core::Result<Spectrum> {
    let mut rng = stream(seed, tag, k);
    match dist {
        EntryDistribution::Gaussian => {
            Spectrum::gaussian(dims.n_cols(), dims.m_rows(), Beta::One, &mut rng)
        }
        EntryDistribution::ComplexGaussian => {
            Spectrum::gaussian(dims.n_cols(), dims.m_rows(), Beta::Two, &mut rng)
        }
        _ => Spectrum::from_matrix(&sample_matrix(dims, dist, &mut rng)),
    }
}

fn locallaw(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let dist = dist_of(cfg)?;
    let (trials, seed) = (
        cfg.trials.expect("resolved trials"),
        cfg.seed.expect("resolved seed"),
    );
    let hash = cfg.hash();
    let mut data = Table::new(&[
        "N",
        "M",
        "trials",
        "eta",
        "hit_fraction",
        "max_ratio",
        "scaled_im_m",
        "scaled_im_m_se",
        "config_hash",
    ]);
    let mut plot = Table::new(&["N", "im_m", "stderr"]);
    for &n in cfg.dims.as_ref().expect("resolved dims") {
        let dims = shape(cfg, n)?;
        let z = spectral_point(cfg, dims);
        let n13 = (n as f64).cbrt();
        let per: Vec<(f64, f64)> = run_trials(trials, |k| -> twlab_core::Result<(f64, f64)> {
            let m = spectrum(dist, dims, seed, "cli-locallaw", k)?.stieltjes(z);
            Ok((trace_residual(m, z, n, dims.rho())?.m_ratio(), n13 * m.im))
        })
        .into_iter()
        .collect::<twlab_core::Result<_>>()?;
        let hits = per.iter().filter(|p| p.0 <= LOCAL_LAW_C).count();
        let worst = per.iter().map(|p| p.0).fold(0.0, f64::max);
        let im = MeanStderr::of(&per.iter().map(|p| p.1).collect::<Vec<_>>());
        data.push(vec![
            n.into(),
            dims.m_rows().into(),
            trials.into(),
            z.im.into(),
            (hits as f64 / trials as f64).into(),
            worst.into(),
            im.mean.into(),
            im.stderr.into(),
            hash.clone().into(),
        ]);
        plot.push(vec![n.into(), im.mean.into(), im.stderr.into()]);
    }
    Ok(Outcome {
        data,
        plot: Some(plot),
        summary: json!({ "local_law_constant": LOCAL_LAW_C }),
        gate: None,
    })
}

fn rigidity(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let dist = dist_of(cfg)?;
    let (trials, seed) = (
        cfg.trials.expect("resolved trials"),
        cfg.seed.expect("resolved seed"),
    );
    let hash = cfg.hash();
    let mut data = Table::new(&[
        "N",
        "M",
        "trials",
        "max_rescaled_mean",
        "max_rescaled_max",
        "counting_mean",
        "counting_max",
        "config_hash",
    ]);
    for &n in cfg.dims.as_ref().expect("resolved dims") {
        let dims = shape(cfg, n)?;
        let model = dims.model();
        let per: Vec<(f64, f64)> = run_trials(trials, |k| -> twlab_core::Result<(f64, f64)> {
            let eigs = match dist {
                EntryDistribution::Gaussian | EntryDistribution::ComplexGaussian => {
                    spectrum(dist, dims, seed, "cli-rigidity", k)?.eigenvalues()?
                }
                _ => gram_eigenvalues(&sample_matrix(
                    dims,
                    dist,
                    &mut stream(seed, "cli-rigidity", k),
                ))?,
            };
            let r = rigidity_check(&eigs, &model)?;
            Ok((r.max_rescaled, r.counting_discrepancy))
        })
        .into_iter()
        .collect::<twlab_core::Result<_>>()?;
        let a = MeanStderr::of(&per.iter().map(|p| p.0).collect::<Vec<_>>());
        let b = MeanStderr::of(&per.iter().map(|p| p.1).collect::<Vec<_>>());
        data.push(vec![
            n.into(),
            dims.m_rows().into(),
            trials.into(),
            a.mean.into(),
            per.iter().map(|p| p.0).fold(0.0, f64::max).into(),
            b.mean.into(),
            per.iter().map(|p| p.1).fold(0.0, f64::max).into(),
            hash.clone().into(),
        ]);
    }
    Ok(Outcome {
        data,
        plot: None,
        summary: json!({}),
        gate: None,
    })
}

fn cumulant_check(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let dists = match cfg.dist.as_deref() {
        Some("all") | None => EntryDistribution::real_library(),
        _ => vec![dist_of(cfg)?],
    };
    let functions = cfg
        .functions
        .as_ref()
        .expect("resolved functions")
        .iter()
        .map(|f| TestFunction::from_name(f).map_err(|e| CliError::Usage(format!("functions: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let (l, samples, seed) = (
        cfg.order.expect("resolved order"),
        cfg.samples.expect("resolved samples"),
        cfg.seed.expect("resolved seed"),
    );
    let hash = cfg.hash();
    let mut data = Table::new(&[
        "dist",
        "function",
        "order",
        "samples",
        "lhs",
        "rhs",
        "gap",
        "stderr",
        "bound",
        "pass",
        "config_hash",
    ]);
    let mut failed = Vec::new();
    for d in &dists {
        for f in &functions {
            let r = expansion_check(*d, f, l, samples, seed)?;
            let pass = r.passes(5.0);
            if !pass {
                failed.push(format!("{}/{}", d.name(), r.function));
            }
            data.push(vec![
                d.name().into(),
                r.function.clone().into(),
                l.into(),
                samples.into(),
                r.lhs.into(),
                r.rhs.into(),
                r.gap.into(),
                r.stderr.into(),
                r.bound.into(),
                pass.into(),
                hash.clone().into(),
            ]);
        }
    }
    let gate = (!failed.is_empty())
        .then(|| format!("gap above min(bound, 5 stderr) for {}", failed.join(", ")));
    Ok(Outcome {
        data,
        plot: None,
        summary: json!({ "failed": failed }),
        gate,
    })
}

fn term_avg(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let dims = shape(cfg, first_dim(cfg))?;
    let dist = dist_of(cfg)?;
    let z = spectral_point(cfg, dims);
    let mut terms = match &cfg.terms {
        Some(names) => names
            .iter()
            .map(|n| registry_term(n))
            .collect::<twlab_core::Result<Vec<_>>>()?,
        None => registry(),
    };
    if cfg.stripped == Some(true) {
        terms = terms.iter().map(|t| t.stripped()).collect();
    }
    let (trials, seed) = (
        cfg.trials.expect("resolved trials"),
        cfg.seed.expect("resolved seed"),
    );
    let hash = cfg.hash();
    let mut data = Table::new(&[
        "term",
        "weight",
        "re",
        "re_se",
        "im",
        "im_se",
        "abs",
        "psi",
        "psi_power",
        "degree",
        "matched",
        "printed_scale",
        "config_hash",
    ]);
    for t in &terms {
        let r = term_average(t, dist, dims, z, trials, seed)?;
        data.push(vec![
            r.name.clone().into(),
            r.weight.into(),
            r.re.mean.into(),
            r.re.stderr.into(),
            r.im.mean.into(),
            r.im.stderr.into(),
            r.abs().into(),
            r.psi.into(),
            r.psi_power().into(),
            r.degree.into(),
            r.matched.into(),
            r.printed_scale.into(),
            hash.clone().into(),
        ]);
    }
    Ok(Outcome {
        data,
        plot: None,
        summary: json!({ "n": dims.n_cols(), "m": dims.m_rows(), "z": [z.re, z.im] }),
        gate: None,
    })
}

fn selftest(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let r = identity_suite(cfg.seed.unwrap_or(1))?;
    let mut data = Table::new(&["check", "worst", "tolerance", "pass"]);
    let rows = [
        ("ward", r.ward, WARD_TOL),
        ("quadratic", r.quadratic, QUADRATIC_TOL),
        ("trace", r.trace, TRACE_TOL),
        ("block_inverse", r.inverse, INVERSE_TOL),
    ];
    for (name, v, tol) in rows {
        data.push(vec![
            Cell::from(name),
            v.into(),
            tol.into(),
            (v <= tol).into(),
        ]);
    }
    let gate = (!r.passes()).then(|| "an exact identity exceeded its tolerance".to_string());
    Ok(Outcome {
        data,
        plot: None,
        summary: json!(r),
        gate,
    })
}
