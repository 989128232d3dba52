//! Symmetric eigenvalues: Householder tridiagonalization, implicit QL and
//! Sturm-sequence bisection.

use super::blas::{axpy, axpy2, dot, fast_hypot, householder};
use crate::error::{Error, Result};

/// Reduces the symmetric column-major n×n matrix `a` (lower triangle read)
/// to tridiagonal form; returns (diagonal, offdiagonal). `a` is destroyed.
pub fn tridiagonalize(n: usize, a: &mut [f64]) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n);
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let len = n - k - 1;
        let vk = &mut v[..len];
        vk.copy_from_slice(&a[k * n + k + 1..(k + 1) * n]);
        let (tau, beta) = householder(vk);
        diag[k] = a[k * n + k];
        off[k] = beta;
        if tau == 0.0 {
            continue;
        }
        // p = τ S v using the lower triangle of S = a[k+1.., k+1..]
        let pk = &mut p[..len];
        pk.fill(0.0);
        for j in 0..len {
            let col = &a[(k + 1 + j) * n + k + 1 + j..(k + 2 + j) * n];
            // col[0] is S_jj, col[1..] are S_{j+1..,j}
            pk[j] += dot(col, &vk[j..]);
            axpy(vk[j], &col[1..], &mut pk[j + 1..]);
        }
        for x in pk.iter_mut() {
            *x *= tau;
        }
        // w = p - (τ/2)(pᵀv) v, then S -= v wᵀ + w vᵀ on the lower triangle
        let c = -0.5 * tau * dot(pk, vk);
        axpy(c, vk, pk);
        for j in 0..len {
            let col = &mut a[(k + 1 + j) * n + k + 1 + j..(k + 2 + j) * n];
            axpy2(-pk[j], &vk[j..], -vk[j], &pk[j..], col);
        }
    }
    if n > 0 {
        diag[n - 1] = a[n * n - 1];
    }
    (diag, off)
}

/// Eigenvalues of the symmetric tridiagonal (d, e), ascending, by implicit QL
/// with Wilkinson shifts.
pub fn tridiagonal_eigenvalues(mut d: Vec<f64>, e_in: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(d);
    }
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&e_in[..n - 1]);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Conditioning(
                    "tridiagonal QL did not converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = fast_hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = fast_hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Number of eigenvalues of the tridiagonal (d, e²) strictly below x.
pub fn sturm_count(d: &[f64], e2: &[f64], x: f64) -> usize {
    let pivmin = f64::MIN_POSITIVE * 1e10;
    let mut q = d[0] - x;
    let mut c = (q < 0.0) as usize;
    for i in 1..d.len() {
        if q.abs() < pivmin {
            q = -pivmin;
        }
        q = d[i] - x - e2[i - 1] / q;
        c += (q < 0.0) as usize;
    }
    c
}

/// Largest eigenvalue of the tridiagonal (d, e) by bisection.
pub fn tridiagonal_largest(d: &[f64], e: &[f64]) -> f64 {
    let n = d.len();
    let e2: Vec<f64> = e.iter().map(|v| v * v).collect();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    lo = lo.max(d.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let span = hi.abs().max(lo.abs());
    hi += 4.0 * f64::EPSILON * span + f64::MIN_POSITIVE;
    while hi - lo > 2.0 * f64::EPSILON * span {
        let mid = 0.5 * (lo + hi);
        if sturm_count(d, &e2, mid) >= n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Eigenvalues of a dense symmetric matrix (lower triangle, column-major).
pub fn symmetric_eigenvalues(n: usize, mut a: Vec<f64>) -> Result<Vec<f64>> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("non-finite matrix entry".into()));
    }
    let (d, e) = tridiagonalize(n, &mut a);
    tridiagonal_eigenvalues(d, &e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_tridiagonal() {
        // the path-graph Laplacian-like matrix 2, -1 has eigenvalues 2 - 2cos(kπ/(n+1))
        let n = 12;
        let ev = tridiagonal_eigenvalues(vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        for (k, v) in ev.iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - want).abs() < 1e-13, "{k}: {v} vs {want}");
        }
        let top = tridiagonal_largest(&vec![2.0; n], &vec![-1.0; n - 1]);
        assert!((top - ev[n - 1]).abs() < 1e-13);
    }

    #[test]
    fn dense_matches_trace_and_frobenius() {
        let n = 7;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[j * n + i] = 1.0 / (1.0 + i as f64 + j as f64) + if i == j { 1.0 } else { 0.0 };
            }
        }
        let tr: f64 = (0..n).map(|i| a[i * n + i]).sum();
        let fro: f64 = a.iter().map(|v| v * v).sum();
        let ev = symmetric_eigenvalues(n, a).unwrap();
        assert!((ev.iter().sum::<f64>() - tr).abs() < 1e-12);
        assert!((ev.iter().map(|v| v * v).sum::<f64>() - fro).abs() < 1e-12);
    }
}
