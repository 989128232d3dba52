use twlab_core::tracy_widom::{
    left_tail_asymptotic, table, tw1_fredholm, tw2_fredholm, tw_cdf, tw_quantile, Beta,
};

fn grid(lo: f64, hi: f64, step: f64) -> impl Iterator<Item = f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(move |k| lo + step * k as f64)
}

#[test]
fn painleve_matches_fredholm_tw2() {
    let mut worst: f64 = 0.0;
    for s in grid(-8.0, 4.0, 0.05) {
        let a = tw_cdf(s, Beta::Two).unwrap();
        let b = tw2_fredholm(s, 64);
        worst = worst.max((a - b).abs());
    }
    assert!(worst <= 1e-6, "max |painleve - fredholm| = {worst:e}");
}

#[test]
fn painleve_matches_fredholm_tw1() {
    let mut worst: f64 = 0.0;
    for s in grid(-8.0, 4.0, 0.1) {
        let a = tw_cdf(s, Beta::One).unwrap();
        let b = tw1_fredholm(s, 96);
        worst = worst.max((a - b).abs());
    }
    assert!(worst <= 1e-6, "max |painleve - fredholm| = {worst:e}");
}

#[test]
fn zero_agrees_between_routes() {
    let a = tw_cdf(0.0, Beta::Two).unwrap();
    let b = tw2_fredholm(0.0, 64);
    assert!((a - b).abs() < 1e-6);
    // F2(0) ≈ 0.96937, a well-known value
    assert!((a - 0.969_372).abs() < 1e-5, "{a}");
}

#[test]
fn left_tail_is_tiny_and_matches_asymptotics() {
    let f = tw_cdf(-10.0, Beta::Two).unwrap();
    assert!(f <= 1e-6);
    // the relative error of the asymptotic form is O(|s|^{-3})
    for &s in &[-6.0, -7.0] {
        for beta in [Beta::One, Beta::Two] {
            let table_v = table().cdf(s, beta);
            let asym = left_tail_asymptotic(s, beta);
            assert!(
                (table_v / asym - 1.0).abs() < 0.02,
                "s={s} {beta:?}: {table_v} vs {asym}"
            );
        }
    }
}

#[test]
fn table_invariants() {
    let t = table();
    for f in [&t.f1, &t.f2] {
        assert!(f.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(f.windows(2).all(|w| w[0] <= w[1]));
        assert!(f[0] <= 1e-6);
        assert!(*f.last().unwrap() >= 1.0 - 1e-8);
    }
}

#[test]
fn densities_integrate_to_one_and_stay_bounded() {
    let t = table();
    for beta in [Beta::One, Beta::Two] {
        let h = 1e-3;
        let mut total = 0.0;
        let mut max_d: f64 = 0.0;
        // numerical derivative of the CDF, trapezoid in s
        let xs: Vec<f64> = grid(-10.0 + h, 8.0 - h, h).collect();
        let dens: Vec<f64> = xs
            .iter()
            .map(|&s| (t.cdf(s + h, beta) - t.cdf(s - h, beta)) / (2.0 * h))
            .collect();
        for w in dens.windows(2) {
            total += 0.5 * (w[0] + w[1]) * h;
        }
        for &d in &dens {
            assert!(d >= -1e-9);
            max_d = max_d.max(d);
        }
        assert!((total - 1.0).abs() <= 1e-4, "{beta:?}: {total}");
        assert!(max_d <= 0.6, "{beta:?}: max density {max_d}");
    }
}

#[test]
fn quantiles_round_trip_and_order() {
    for beta in [Beta::One, Beta::Two] {
        let q = tw_quantile(0.5, beta).unwrap();
        assert!((tw_cdf(q, beta).unwrap() - 0.5).abs() <= 1e-6);
        let q1 = tw_quantile(0.25, beta).unwrap();
        let q3 = tw_quantile(0.75, beta).unwrap();
        assert!(q1 < q && q < q3);
    }
}

#[test]
fn median_of_tw2_matches_fredholm_bisection() {
    // median located on the Fredholm route alone
    let (mut lo, mut hi) = (-3.0, 0.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if tw2_fredholm(mid, 64) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q = tw_quantile(0.5, Beta::Two).unwrap();
    assert!(
        (q - 0.5 * (lo + hi)).abs() < 1e-5,
        "{q} vs {}",
        0.5 * (lo + hi)
    );
}
