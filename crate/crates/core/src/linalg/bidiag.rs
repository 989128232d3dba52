//! Golub–Kahan bidiagonalization and implicit-shift QR on the bidiagonal.

use super::blas::{axpy, dot, householder};
use crate::error::{Error, Result};

/// Reduces the column-major M×N matrix `a` (M ≥ N) to upper bidiagonal
/// form in place and returns (diagonal, superdiagonal).
pub fn bidiagonalize(m: usize, n: usize, a: &mut [f64]) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= n && a.len() == m * n);
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut u = vec![0.0; n];
    let mut w = vec![0.0; m];
    for k in 0..n {
        // left reflector on column k, rows k..m
        let (head, rest) = a.split_at_mut((k + 1) * m);
        let col = &mut head[k * m + k..];
        let (tau, beta) = householder(col);
        d[k] = beta;
        if tau != 0.0 {
            for j in 0..n - k - 1 {
                let cj = &mut rest[j * m + k..(j + 1) * m];
                let s = tau * dot(col, cj);
                axpy(-s, col, cj);
            }
        }
        if k + 1 >= n {
            break;
        }
        // right reflector on row k, columns k+1..n
        let len = n - k - 1;
        for j in 0..len {
            u[j] = rest[j * m + k];
        }
        let (tau, beta) = householder(&mut u[..len]);
        e[k] = beta;
        for j in 0..len {
            rest[j * m + k] = if j == 0 { beta } else { 0.0 };
        }
        if tau != 0.0 && k + 1 < m {
            let rows = m - k - 1;
            let wv = &mut w[..rows];
            wv.fill(0.0);
            for j in 0..len {
                axpy(u[j], &rest[j * m + k + 1..(j + 1) * m], wv);
            }
            for j in 0..len {
                axpy(-tau * u[j], wv, &mut rest[j * m + k + 1..(j + 1) * m]);
            }
        }
    }
    (d, e)
}

fn rot(f: f64, g: f64) -> (f64, f64, f64) {
    if g == 0.0 {
        (1.0, 0.0, f)
    } else if f == 0.0 {
        (0.0, 1.0, g)
    } else {
        let r = super::blas::fast_hypot(f, g);
        (f / r, g / r, r)
    }
}

/// Smaller singular value of [[f, g], [0, h]].
fn ssmin_2x2(f: f64, g: f64, h: f64) -> f64 {
    let (fa, ga, ha) = (f.abs(), g.abs(), h.abs());
    let (fhmn, fhmx) = (fa.min(ha), fa.max(ha));
    if fhmn == 0.0 {
        return 0.0;
    }
    if ga < fhmx {
        let as_ = 1.0 + fhmn / fhmx;
        let at = (fhmx - fhmn) / fhmx;
        let au = (ga / fhmx).powi(2);
        let c = 2.0 / ((as_ * as_ + au).sqrt() + (at * at + au).sqrt());
        fhmn * c
    } else {
        let au = fhmx / ga;
        if au == 0.0 {
            (fhmn * fhmx) / ga
        } else {
            let as_ = 1.0 + fhmn / fhmx;
            let at = (fhmx - fhmn) / fhmx;
            let c = 1.0 / ((1.0 + (as_ * au).powi(2)).sqrt() + (1.0 + (at * au).powi(2)).sqrt());
            2.0 * (fhmn * c) * au
        }
    }
}

// One shifted QR sweep on d[lo..=hi], e[lo..hi].
fn qr_sweep(d: &mut [f64], e: &mut [f64], lo: usize, hi: usize) {
    let mut shift = ssmin_2x2(d[hi - 1], e[hi - 1], d[hi]);
    let sll = d[lo].abs();
    if sll > 0.0 && (shift / sll).powi(2) < f64::EPSILON {
        shift = 0.0;
    }
    // d[lo] ≠ 0 here: zero diagonals are chased out before sweeping
    let mut f = (d[lo].abs() - shift) * (d[lo].signum() + shift / d[lo]);
    let mut g = e[lo];
    for i in lo..hi {
        let (cr, sr, r) = rot(f, g);
        if i > lo {
            e[i - 1] = r;
        }
        f = cr * d[i] + sr * e[i];
        e[i] = cr * e[i] - sr * d[i];
        g = sr * d[i + 1];
        d[i + 1] *= cr;
        let (cl, sl, r) = rot(f, g);
        d[i] = r;
        f = cl * e[i] + sl * d[i + 1];
        d[i + 1] = cl * d[i + 1] - sl * e[i];
        if i + 1 < hi {
            g = sl * e[i + 1];
            e[i + 1] *= cl;
        }
    }
    e[hi - 1] = f;
}

// d[i] = 0 with i < hi: rotate row i against the rows below to clear e[i].
fn chase_zero_diagonal(d: &mut [f64], e: &mut [f64], i: usize, hi: usize) {
    let mut f = e[i];
    e[i] = 0.0;
    for j in i + 1..=hi {
        let (c, s, r) = rot(d[j], f);
        d[j] = r;
        if j < hi {
            f = -s * e[j];
            e[j] *= c;
        }
    }
}

/// Singular values of the upper bidiagonal (d, e), descending.
pub fn bidiagonal_singular_values(mut d: Vec<f64>, mut e: Vec<f64>) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(d);
    }
    let scale = d.iter().chain(e.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
    if !scale.is_finite() {
        return Err(Error::Data("non-finite bidiagonal entry".into()));
    }
    let tol = f64::EPSILON;
    let abs_floor = tol * scale * 1e-3;
    let max_iter = 40 * n * n + 100;
    let mut hi = n - 1;
    let mut iter = 0;
    while hi > 0 {
        // negligible superdiagonals split the problem
        if e[hi - 1].abs() <= tol * (d[hi - 1].abs() + d[hi].abs()) || e[hi - 1].abs() <= abs_floor
        {
            e[hi - 1] = 0.0;
            hi -= 1;
            continue;
        }
        let mut lo = hi - 1;
        while lo > 0 {
            let k = lo - 1;
            if e[k].abs() <= tol * (d[k].abs() + d[k + 1].abs()) || e[k].abs() <= abs_floor {
                e[k] = 0.0;
                break;
            }
            lo -= 1;
        }
        if let Some(i) = (lo..hi).find(|&i| d[i].abs() <= abs_floor) {
            d[i] = 0.0;
            chase_zero_diagonal(&mut d, &mut e, i, hi);
            continue;
        }
        iter += 1;
        if iter > max_iter {
            return Err(Error::Conditioning("bidiagonal QR did not converge".into()));
        }
        qr_sweep(&mut d, &mut e, lo, hi);
    }
    let mut s: Vec<f64> = d.into_iter().map(f64::abs).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Largest singular value of the upper bidiagonal (d, e) by Sturm bisection
/// on the Golub–Kahan tridiagonal [[0, B], [Bᵀ, 0]].
pub fn bidiagonal_largest_sv(d: &[f64], e: &[f64]) -> f64 {
    let n = d.len();
    if n == 0 {
        return 0.0;
    }
    // off-diagonals d0, e0, d1, e1, ..., squared
    let mut off2 = Vec::with_capacity(2 * n - 1);
    let mut gersh: f64 = 0.0;
    for i in 0..n {
        off2.push(d[i] * d[i]);
        let left = d[i].abs() + if i > 0 { e[i - 1].abs() } else { 0.0 };
        let right = d[i].abs() + if i + 1 < n { e[i].abs() } else { 0.0 };
        gersh = gersh.max(left).max(right);
        if i + 1 < n {
            off2.push(e[i] * e[i]);
        }
    }
    let size = 2 * n;
    let count_below = |x: f64| -> usize {
        let pivmin = f64::MIN_POSITIVE * 1e10;
        let mut q = -x;
        let mut c = (q < 0.0) as usize;
        for &o in &off2 {
            if q.abs() < pivmin {
                q = -pivmin;
            }
            q = -x - o / q;
            c += (q < 0.0) as usize;
        }
        c
    };
    let (mut lo, mut hi) = (0.0, gersh * (1.0 + 4.0 * f64::EPSILON) + f64::MIN_POSITIVE);
    // a cheap lower bound: the largest column norm of B
    for i in 0..n {
        let c = (d[i] * d[i] + if i > 0 { e[i - 1] * e[i - 1] } else { 0.0 }).sqrt();
        lo = f64::max(lo, c * (1.0 - 4.0 * f64::EPSILON));
    }
    while hi - lo > 2.0 * f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if count_below(mid) >= size {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input() {
        let s = bidiagonal_singular_values(vec![3.0, -1.0, 2.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(s, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn two_by_two() {
        // B = [[1, 1], [0, 1]] has singular values (1 ± √5)/2 in modulus
        let s = bidiagonal_singular_values(vec![1.0, 1.0], vec![1.0]).unwrap();
        let g = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((s[0] - g).abs() < 1e-15);
        assert!((s[1] - 1.0 / g).abs() < 1e-15);
        assert!((bidiagonal_largest_sv(&[1.0, 1.0], &[1.0]) - g).abs() < 1e-14);
    }

    #[test]
    fn zero_diagonal_is_handled() {
        let s = bidiagonal_singular_values(vec![0.0, 2.0, 1.0], vec![1.0, 0.5]).unwrap();
        // Frobenius norm is preserved
        let f: f64 = s.iter().map(|v| v * v).sum();
        assert!((f - (4.0 + 1.0 + 1.0 + 0.25)).abs() < 1e-13);
        assert!(s[2].abs() < 1e-15);
    }

    #[test]
    fn column_vector() {
        let mut a = vec![3.0, 4.0];
        let (d, e) = bidiagonalize(2, 1, &mut a);
        assert!(e.is_empty());
        assert!((d[0].abs() - 5.0).abs() < 1e-15);
    }
}
