use nalgebra::DMatrix;
use rand::Rng;
use twlab_core::ensembles::*;
use twlab_core::mc::MeanStderr;
use twlab_core::mp_law::AspectRatio;
use twlab_core::{Beta, DataMatrix, EntryDistribution, Error};

fn dims(m: usize, n: usize) -> AspectRatio {
    AspectRatio::new(m, n).unwrap()
}

fn trace_gram(x: &DataMatrix) -> f64 {
    (0..x.m())
        .flat_map(|i| (0..x.n()).map(move |j| (i, j)))
        .map(|(i, j)| x.get(i, j).norm_sqr())
        .sum()
}

#[test]
fn expected_trace_is_m() {
    for dist in [
        EntryDistribution::Gaussian,
        EntryDistribution::ComplexGaussian,
        EntryDistribution::SkewedTwoPoint { p: 0.25 },
    ] {
        let v: Vec<f64> = (0..1000)
            .map(|k| {
                trace_gram(&sample_matrix(
                    dims(40, 20),
                    dist,
                    &mut stream(1, "trace", k),
                ))
            })
            .collect();
        let s = MeanStderr::of(&v);
        assert!((s.mean - 40.0).abs() <= 4.0 * s.stderr, "{dist:?}: {s:?}");
    }
}

#[test]
fn rademacher_support() {
    let x = sample_matrix(
        dims(30, 16),
        EntryDistribution::Rademacher,
        &mut stream(2, "rad", 0),
    );
    let r = 4.0;
    for v in x.real_data().unwrap() {
        assert!(v * r == 1.0 || v * r == -1.0, "{v}");
    }
}

#[test]
fn gaussian_fourth_moment() {
    let x = sample_matrix(
        dims(400, 100),
        EntryDistribution::Gaussian,
        &mut stream(3, "g4", 0),
    );
    let h: Vec<f64> = x
        .real_data()
        .unwrap()
        .iter()
        .map(|v| (v * 10.0).powi(4))
        .collect();
    let s = MeanStderr::of(&h);
    assert!((s.mean - 3.0).abs() <= 4.0 * s.stderr, "{s:?}");
}

#[test]
fn sampled_instances_are_standardized() {
    let (m, n) = (300, 100);
    for dist in EntryDistribution::real_library() {
        let x = sample_matrix(dims(m, n), dist, &mut stream(4, "std", 0));
        let h: Vec<f64> = x
            .real_data()
            .unwrap()
            .iter()
            .map(|v| v * (n as f64).sqrt())
            .collect();
        let mean = h.iter().sum::<f64>() / h.len() as f64;
        let var = h.iter().map(|v| v * v).sum::<f64>() / h.len() as f64;
        let tol = 4.0 / ((m * n) as f64).sqrt();
        // the variance of h² is E h⁴ - 1, so scale the tolerance by it
        let spread = (dist.raw_moment(4).unwrap() - 1.0).sqrt();
        assert!(mean.abs() <= tol, "{dist:?}: mean {mean}");
        assert!((var - 1.0).abs() <= tol * spread, "{dist:?}: var {var}");
    }
}

#[test]
fn complex_law_is_circular() {
    let x = sample_matrix(
        dims(200, 100),
        EntryDistribution::ComplexGaussian,
        &mut stream(5, "c", 0),
    );
    let mut s = twlab_core::Complex64::new(0.0, 0.0);
    for i in 0..200 {
        for j in 0..100 {
            let h = x.get(i, j) * 10.0;
            s += h * h;
        }
    }
    let mean = s / 20000.0;
    assert!(mean.norm() <= 4.0 * (2.0f64 / 20000.0).sqrt(), "{mean}");
}

#[test]
fn flow_endpoints_and_coefficients() {
    let d = dims(12, 6);
    let x0 = sample_matrix(d, EntryDistribution::Rademacher, &mut stream(6, "x0", 0));
    let w = sample_gaussian_like(&x0, &mut stream(6, "w", 0));
    let same = flow_matrix(&FlowState {
        x0: x0.clone(),
        w: w.clone(),
        t: 0.0,
    })
    .unwrap();
    assert_eq!(same, x0);
    let t = 8.0 * 100f64.ln();
    let (a, b) = flow_coefficients(t).unwrap();
    assert!((a - 1e-8).abs() <= 1e-20);
    for t in [0.0, 0.3, 1.0, 7.0, 40.0] {
        let (a, b) = flow_coefficients(t).unwrap();
        assert!((a * a + b * b - 1.0).abs() <= 1e-15);
    }
    assert!(b < 1.0 && b > 1.0 - 1e-15);
    assert!(matches!(flow_coefficients(-0.1), Err(Error::Domain(_))));
    let y = flow_matrix(&FlowState {
        x0: x0.clone(),
        w: w.clone(),
        t: 1.0,
    })
    .unwrap();
    let (a, b) = flow_coefficients(1.0).unwrap();
    let want = a * x0.real_data().unwrap()[7] + b * w.real_data().unwrap()[7];
    assert_eq!(y.real_data().unwrap()[7], want);
}

#[test]
fn flow_cumulants_decay() {
    let dist = EntryDistribution::SkewedTwoPoint { p: 0.25 };
    let (m, n) = (2000, 250);
    let d = dims(m, n);
    let s3 = dist.third_cumulant();
    let s4 = dist.fourth_cumulant();
    for (k, t) in [0.0, 2f64.ln(), 16f64.ln()].into_iter().enumerate() {
        let x0 = sample_matrix(d, dist, &mut stream(7, "x0", k as u64));
        let w = sample_gaussian_like(&x0, &mut stream(7, "w", k as u64));
        let x = flow_matrix(&FlowState { x0, w, t }).unwrap();
        let h: Vec<f64> = x
            .real_data()
            .unwrap()
            .iter()
            .map(|v| v * (n as f64).sqrt())
            .collect();
        let m3 = MeanStderr::of(&h.iter().map(|v| v.powi(3)).collect::<Vec<_>>());
        // unit variance in law, so κ4 = E h⁴ - 3
        let m4 = MeanStderr::of(&h.iter().map(|v| v.powi(4) - 3.0).collect::<Vec<_>>());
        let want3 = s3 * (-1.5 * t).exp();
        let want4 = s4 * (-2.0 * t).exp();
        assert!(
            (m3.mean - want3).abs() <= 4.0 * m3.stderr,
            "t={t}: {m3:?} vs {want3}"
        );
        assert!(
            (m4.mean - want4).abs() <= 4.0 * m4.stderr,
            "t={t}: {m4:?} vs {want4}"
        );
    }
}

#[test]
fn gram_eigenvalue_examples() {
    let id = DataMatrix::from_real_rows(2, 2, &[1.0, 0.0, 0.0, 1.0]).unwrap();
    let e = gram_eigenvalues(&id).unwrap();
    assert!((e[0] - 1.0).abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15);
    let col = DataMatrix::from_real_rows(2, 1, &[3.0, 4.0]).unwrap();
    assert!((gram_eigenvalues(&col).unwrap()[0] - 25.0).abs() <= 1e-12);
    assert!((largest_gram_eigenvalue(&col).unwrap() - 25.0).abs() <= 1e-12);
}

fn dense_gram(x: &DataMatrix) -> DMatrix<f64> {
    let xm = DMatrix::from_column_slice(x.m(), x.n(), x.real_data().unwrap());
    xm.transpose() * xm
}

#[test]
fn gram_eigenvalues_match_dense_oracle() {
    for k in 0..10 {
        let x = sample_matrix(
            dims(20, 10),
            EntryDistribution::Uniform,
            &mut stream(8, "dense", k),
        );
        let g = dense_gram(&x);
        let mut want: Vec<f64> = g.clone().symmetric_eigenvalues().iter().cloned().collect();
        want.sort_by(f64::total_cmp);
        let got = gram_eigenvalues(&x).unwrap();
        let fast = gram_eigenvalues_fast(&x).unwrap();
        assert_eq!(got.len(), 10);
        for i in 0..10 {
            assert!(
                (got[i] - want[i]).abs() <= 1e-8,
                "{} vs {}",
                got[i],
                want[i]
            );
            assert!((fast[i] - want[i]).abs() <= 1e-8);
        }
        assert!((largest_gram_eigenvalue(&x).unwrap() - want[9]).abs() <= 1e-10);
        // backward error: smallest singular value of X*X - λ
        let norm = want[9];
        for &l in &[got[0], got[4], got[9]] {
            let shifted = &g - DMatrix::identity(10, 10) * l;
            let smin = shifted
                .singular_values()
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            assert!(smin <= 1e-8 * norm);
        }
    }
}

#[test]
fn complex_gram_eigenvalues() {
    let x = sample_matrix(
        dims(14, 6),
        EntryDistribution::ComplexGaussian,
        &mut stream(9, "cplx", 0),
    );
    let xm = DMatrix::from_fn(14, 6, |i, j| x.get(i, j));
    let g = xm.adjoint() * &xm;
    let mut want: Vec<f64> = g.symmetric_eigenvalues().iter().cloned().collect();
    want.sort_by(f64::total_cmp);
    let got = gram_eigenvalues(&x).unwrap();
    assert_eq!(got.len(), 6);
    for i in 0..6 {
        assert!((got[i] - want[i]).abs() <= 1e-8);
    }
}

#[test]
fn non_finite_entries_rejected() {
    let x = DataMatrix::from_real_rows(2, 1, &[f64::NAN, 1.0]).unwrap();
    assert!(matches!(gram_eigenvalues(&x), Err(Error::Data(_))));
    assert!(matches!(gram_eigenvalues_fast(&x), Err(Error::Data(_))));
}

#[test]
fn tridiagonal_trace_mean() {
    let v: Vec<f64> = (0..10_000)
        .map(|k| {
            laguerre_tridiagonal_eigs(50, 100, Beta::One, &mut stream(10, "tr", k))
                .unwrap()
                .iter()
                .sum::<f64>()
        })
        .collect();
    let s = MeanStderr::of(&v);
    assert!((s.mean - 100.0).abs() <= 4.0 * s.stderr, "{s:?}");
}

#[test]
fn tridiagonal_scalar_case() {
    let v: Vec<f64> = (0..20_000)
        .map(|k| laguerre_tridiagonal_eigs(1, 1, Beta::One, &mut stream(11, "chi", k)).unwrap()[0])
        .collect();
    let s = MeanStderr::of(&v);
    assert!((s.mean - 1.0).abs() <= 4.0 * s.stderr, "{s:?}");
    // χ²₁ has variance 2
    let var = v.iter().map(|x| (x - 1.0).powi(2)).sum::<f64>() / v.len() as f64;
    assert!((var - 2.0).abs() < 0.15, "{var}");
}

fn two_sample_ks(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[test]
fn tridiagonal_matches_dense_sampler_in_law() {
    let trials = 10_000u64;
    for beta in [Beta::One, Beta::Two] {
        let dist = match beta {
            Beta::One => EntryDistribution::Gaussian,
            Beta::Two => EntryDistribution::ComplexGaussian,
        };
        let tri: Vec<f64> = (0..trials)
            .map(|k| {
                laguerre_tridiagonal_largest(50, 100, beta, &mut stream(12, "tri", k)).unwrap()
            })
            .collect();
        let dense: Vec<f64> = (0..trials)
            .map(|k| {
                largest_gram_eigenvalue(&sample_matrix(
                    dims(100, 50),
                    dist,
                    &mut stream(12, "dense", k),
                ))
                .unwrap()
            })
            .collect();
        let d = two_sample_ks(tri, dense);
        let noise = 0.87 * (2.0 / trials as f64).sqrt();
        assert!(d <= 3.0 * noise, "{beta:?}: {d} vs {noise}");
    }
}

#[test]
fn tridiagonal_largest_agrees_with_full_spectrum() {
    for k in 0..20 {
        let mut r1 = stream(13, "same", k);
        let mut r2 = stream(13, "same", k);
        let all = laguerre_tridiagonal_eigs(40, 70, Beta::Two, &mut r1).unwrap();
        let top = laguerre_tridiagonal_largest(40, 70, Beta::Two, &mut r2).unwrap();
        assert!(all.windows(2).all(|w| w[0] <= w[1]));
        assert!(all[0] >= 0.0);
        assert!((all[39] - top).abs() <= 1e-12 * top);
    }
    assert!(laguerre_tridiagonal_eigs(5, 4, Beta::One, &mut stream(0, "x", 0)).is_err());
}

#[test]
fn rescale_examples() {
    let r = rescale_largest(4.0, dims(100, 100), EdgeVariant::Paper);
    assert!(r.abs() <= 1e-12, "{r}");
    let (mu, sigma) = edge_constants(dims(400, 100), EdgeVariant::Paper);
    assert!((mu - 900.0).abs() <= 1e-10);
    assert!((sigma - 30.0 * 0.15f64.cbrt()).abs() <= 1e-10);
    // Ma's half-integer shifts move r by O(N^{-1/3})
    let d = dims(1000, 1000);
    let (mu_p, sigma_p) = edge_constants(d, EdgeVariant::Paper);
    let lambda = mu_p / 1000.0;
    let diff = (rescale_largest(lambda, d, EdgeVariant::Ma)
        - rescale_largest(lambda, d, EdgeVariant::Paper))
    .abs();
    assert!(
        diff > 0.0 && diff <= 10.0 * 1000f64.powf(-1.0 / 3.0),
        "{diff}"
    );
    assert!(sigma_p > 0.0);
    assert_eq!("ma".parse::<EdgeVariant>().unwrap(), EdgeVariant::Ma);
}

#[test]
fn edge_rigidity_gaussian() {
    // |λ_N - E₊| ≤ C N^{-2/3+0.1} in ≥ 99% of trials, C = 7 fixed once
    let (n, m) = (500, 1000);
    let e_plus = AspectRatio::new(m, n).unwrap().model().e_plus;
    let bound = 7.0 * (n as f64).powf(-2.0 / 3.0 + 0.1);
    let hits = (0..500)
        .filter(|&k| {
            let l =
                laguerre_tridiagonal_largest(n, m, Beta::One, &mut stream(14, "rig", k)).unwrap();
            (l - e_plus).abs() <= bound
        })
        .count();
    assert!(hits >= 495, "{hits}");
}

#[test]
fn streams_are_order_independent() {
    let a: Vec<u64> = (0..4).map(|k| stream(99, "t", k).random::<u64>()).collect();
    let b: Vec<u64> = (0..4)
        .rev()
        .map(|k| stream(99, "t", k).random::<u64>())
        .collect();
    assert_eq!(a, b.into_iter().rev().collect::<Vec<_>>());
    assert_ne!(
        stream(99, "t", 0).random::<u64>(),
        stream(99, "u", 0).random::<u64>()
    );
}
