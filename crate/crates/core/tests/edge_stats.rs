use proptest::prelude::*;
use rand::Rng;
use twlab_core::edge_stats::*;
use twlab_core::ensembles::{stream, EdgeVariant};
use twlab_core::tracy_widom::{tw_cdf_total, tw_quantile};
use twlab_core::{Beta, EntryDistribution, Error};

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[test]
fn ecdf_basics() {
    let e = Ecdf::new(&[0.0]).unwrap();
    assert_eq!(e.eval(-1.0), 0.0);
    assert_eq!(e.eval(0.0), 1.0);
    let e = Ecdf::new(&[2.0; 5]).unwrap();
    assert_eq!(e.eval(1.999), 0.0);
    assert_eq!(e.eval(2.0), 1.0);
    assert_eq!(e.eval_left(2.0), 0.0);
    assert!(matches!(Ecdf::new(&[]), Err(Error::Domain(_))));
}

#[test]
fn ecdf_matches_brute_force() {
    let mut rng = stream(1, "ecdf", 0);
    let s: Vec<f64> = (0..300)
        .map(|_| (rng.random::<f64>() * 20.0).round() / 4.0)
        .collect();
    let e = Ecdf::new(&s).unwrap();
    for k in 0..200 {
        let x = -0.3 + k as f64 * 0.027;
        let brute = s.iter().filter(|&&v| v <= x).count() as f64 / 300.0;
        assert_eq!(e.eval(x), brute);
    }
}

#[test]
fn equioscillating_quantiles() {
    let n = 400;
    let s: Vec<f64> = (1..=n)
        .map(|k| {
            let p = (k as f64 - 0.5) / n as f64;
            (p / (1.0 - p)).ln()
        })
        .collect();
    let d = ks_sup(&s, logistic, -50.0).unwrap();
    assert!((d - 0.5 / n as f64).abs() <= 1e-12, "{d}");
}

#[test]
fn single_sample_at_median() {
    let med = tw_quantile(0.5, Beta::Two).unwrap();
    let d = ks_sup(&[med], |s| tw_cdf_total(s, Beta::Two), -3.5).unwrap();
    assert!((d - 0.5).abs() <= 1e-6);
}

#[test]
fn ks_matches_grid_brute_force() {
    let mut rng = stream(2, "grid", 0);
    let s: Vec<f64> = (0..500).map(|_| rng.random::<f64>() * 6.0 - 4.0).collect();
    let cdf = |x: f64| tw_cdf_total(x, Beta::One);
    let d = ks_sup(&s, cdf, -3.5).unwrap();
    let e = Ecdf::new(&s).unwrap();
    let grid = 100_000;
    let (lo, hi) = (-3.5, 8.0);
    let mut brute: f64 = 0.0;
    for k in 0..=grid {
        let x = lo + (hi - lo) * k as f64 / grid as f64;
        brute = brute.max((e.eval(x) - cdf(x)).abs());
    }
    // the grid misses jumps by at most one step of F and of F_n
    assert!(brute <= d + 1e-12);
    assert!(d - brute <= 1.0 / 500.0 + 1e-3, "{d} vs {brute}");
}

#[test]
fn truncation_ignores_the_left_tail() {
    let s = [-10.0, -9.0, 0.0];
    let full = ks_sup(&s, logistic, -50.0).unwrap();
    let cut = ks_sup(&s, logistic, -1.0).unwrap();
    assert!(cut <= full);
    // the largest excursion is the jump at 0: 1 - F(0) = 1/2
    assert!((cut - 0.5).abs() < 1e-12);
}

#[test]
fn exact_power_law_fit() {
    let n = [50usize, 100, 200, 400];
    let ks: Vec<f64> = n.iter().map(|&v| (v as f64).powf(-2.0 / 3.0)).collect();
    let se: Vec<f64> = ks.iter().map(|k| k / 100.0).collect();
    let f = rate_fit(&n, &ks, &se).unwrap();
    assert!((f.slope + 2.0 / 3.0).abs() <= 1e-12);
    assert!(f.slope_ci.0 <= f.slope && f.slope <= f.slope_ci.1);
}

#[test]
fn noisy_power_law_fit() {
    let n = [50usize, 100, 200, 400, 800];
    let mut rng = stream(3, "noise", 0);
    let ks: Vec<f64> = n
        .iter()
        .map(|&v| {
            0.3 * (v as f64).powf(-1.0 / 3.0) * (1.0 + 0.01 * (2.0 * rng.random::<f64>() - 1.0))
        })
        .collect();
    let se: Vec<f64> = ks.iter().map(|k| 0.01 * k).collect();
    let f = rate_fit(&n, &ks, &se).unwrap();
    assert!((-0.37..=-0.30).contains(&f.slope), "{}", f.slope);
}

#[test]
fn fit_preconditions() {
    assert!(matches!(
        rate_fit(&[10, 20], &[0.1, 0.05], &[0.001, 0.001]),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        rate_fit(&[10, 20, 40], &[0.1, 0.05, 0.002], &[0.001, 0.001, 0.001]),
        Err(Error::NoiseGate(_))
    ));
    assert!(matches!(
        rate_fit(&[10, 20, 40], &[0.1, 0.05], &[0.001; 3]),
        Err(Error::Validation(_))
    ));
}

#[test]
fn noise_floor_matches_self_ks() {
    let n = 2000;
    let v: Vec<f64> = (0..300)
        .map(|k| {
            let mut rng = stream(4, "floor", k);
            let s: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            ks_sup(&s, |x| x.clamp(0.0, 1.0), -1.0).unwrap()
        })
        .collect();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    assert!(
        (mean / noise_floor(n) - 1.0).abs() < 0.06,
        "{mean} vs {}",
        noise_floor(n)
    );
}

#[test]
fn bootstrap_interval_brackets_slope() {
    let n_list = [40usize, 80, 160];
    let samples: Vec<Vec<f64>> = n_list
        .iter()
        .map(|&n| {
            let mut rng = stream(5, "boot", n as u64);
            // shifted logistic with shift ∝ N^{-1/2}
            let shift = 3.0 / (n as f64).sqrt();
            (0..20_000)
                .map(|_| {
                    let u: f64 = rng.random::<f64>().clamp(1e-12, 1.0 - 1e-12);
                    (u / (1.0 - u)).ln() + shift
                })
                .collect()
        })
        .collect();
    let f = rate_fit_bootstrap(&n_list, &samples, logistic, -20.0, 200, 9).unwrap();
    assert!(f.slope_ci.0 < f.slope && f.slope < f.slope_ci.1, "{f:?}");
    assert!((-0.7..=-0.3).contains(&f.slope), "{}", f.slope);
}

#[test]
fn small_gaussian_rate_experiment_runs() {
    let r = ks_rate_experiment(
        EdgeSampler::Tridiagonal { beta: Beta::One },
        &[10, 20, 40],
        2.0,
        4000,
        EdgeVariant::Ma,
        DEFAULT_R0,
        1,
    )
    .unwrap();
    assert_eq!(r.rows.len(), 3);
    assert!(r.rows.iter().all(|row| row.ks > 0.0 && row.ks < 0.2));
    assert!(r.fit.is_some() || r.fit_error.is_some());
    let d = ks_rate_experiment(
        EdgeSampler::Dense {
            dist: EntryDistribution::Rademacher,
        },
        &[8],
        2.0,
        200,
        EdgeVariant::Paper,
        DEFAULT_R0,
        1,
    )
    .unwrap();
    assert!(d.fit.is_none() && d.fit_error.is_some());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn affine_invariance(a in 0.1f64..5.0, b in -3.0f64..3.0, seed in 0u64..1000) {
        let mut rng = stream(seed, "affine", 0);
        let s: Vec<f64> = (0..200).map(|_| rng.random::<f64>() * 8.0 - 4.0).collect();
        let d1 = ks_sup(&s, logistic, -2.0).unwrap();
        let t: Vec<f64> = s.iter().map(|x| a * x + b).collect();
        let d2 = ks_sup(&t, |y| logistic((y - b) / a), a * -2.0 + b).unwrap();
        prop_assert!((d1 - d2).abs() <= 1e-12);
    }
}
