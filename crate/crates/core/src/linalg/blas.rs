//! Small vector kernels written so LLVM vectorizes them.

macro_rules! dispatch {
    ($generic:ident, $avx:ident, ($($arg:expr),*)) => {{
        #[cfg(target_arch = "x86_64")]
        {
            if has_avx2_fma() {
                // SAFETY: the CPU supports the features enabled on `$avx`.
                return unsafe { $avx($($arg),*) };
            }
        }
        $generic($($arg),*)
    }};
}

#[cfg(target_arch = "x86_64")]
fn has_avx2_fma() -> bool {
    use std::sync::atomic::{AtomicU8, Ordering};
    static STATE: AtomicU8 = AtomicU8::new(0);
    match STATE.load(Ordering::Relaxed) {
        1 => true,
        2 => false,
        _ => {
            let ok = is_x86_feature_detected!("avx2") && is_x86_feature_detected!("fma");
            STATE.store(if ok { 1 } else { 2 }, Ordering::Relaxed);
            ok
        }
    }
}

// FMA = false avoids mul_add, which is a slow library call without hardware FMA
#[inline(always)]
fn madd<const FMA: bool>(a: f64, b: f64, c: f64) -> f64 {
    if FMA {
        a.mul_add(b, c)
    } else {
        a * b + c
    }
}

#[inline(always)]
fn dot_body<const FMA: bool>(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] = madd::<FMA>(x[k], y[k], acc[k]);
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    (acc[0] + acc[4]) + (acc[1] + acc[5]) + (acc[2] + acc[6]) + (acc[3] + acc[7]) + tail
}

#[inline(always)]
fn axpy_body<const FMA: bool>(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = madd::<FMA>(a, *xi, *yi);
    }
}

#[inline(always)]
fn axpy2_body<const FMA: bool>(a: f64, x: &[f64], b: f64, z: &[f64], y: &mut [f64]) {
    for ((yi, xi), zi) in y.iter_mut().zip(x).zip(z) {
        *yi = madd::<FMA>(b, *zi, madd::<FMA>(a, *xi, *yi));
    }
}

fn dot_plain(a: &[f64], b: &[f64]) -> f64 {
    dot_body::<false>(a, b)
}

fn axpy_plain(a: f64, x: &[f64], y: &mut [f64]) {
    axpy_body::<false>(a, x, y)
}

fn axpy2_plain(a: f64, x: &[f64], b: f64, z: &[f64], y: &mut [f64]) {
    axpy2_body::<false>(a, x, b, z, y)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn dot_avx(a: &[f64], b: &[f64]) -> f64 {
    dot_body::<true>(a, b)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn axpy_avx(a: f64, x: &[f64], y: &mut [f64]) {
    axpy_body::<true>(a, x, y)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn axpy2_avx(a: f64, x: &[f64], b: f64, z: &[f64], y: &mut [f64]) {
    axpy2_body::<true>(a, x, b, z, y)
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    dispatch!(dot_plain, dot_avx, (a, b))
}

/// y += a·x
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    dispatch!(axpy_plain, axpy_avx, (a, x, y))
}

/// y += a·x + b·z
#[inline]
pub fn axpy2(a: f64, x: &[f64], b: f64, z: &[f64], y: &mut [f64]) {
    dispatch!(axpy2_plain, axpy2_avx, (a, x, b, z, y))
}

/// √(a² + b²), falling back to `hypot` only when squaring could over- or underflow.
#[inline]
pub fn fast_hypot(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m > 1e-140 && m < 1e140 {
        (a * a + b * b).sqrt()
    } else {
        a.hypot(b)
    }
}

/// Euclidean norm with scaling against overflow.
pub fn norm2(x: &[f64]) -> f64 {
    let amax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if amax == 0.0 || !amax.is_finite() {
        return amax;
    }
    if amax > 1e-150 && amax < 1e150 {
        return dot(x, x).sqrt();
    }
    let s: f64 = x.iter().map(|v| (v / amax) * (v / amax)).sum();
    amax * s.sqrt()
}

/// Householder vector for x: on return x[0] = 1 and x[1..] holds v[1..];
/// the reflector I - τ v vᵀ maps the original x to (β, 0, ..., 0).
pub fn householder(x: &mut [f64]) -> (f64, f64) {
    let alpha = x[0];
    let xnorm = norm2(&x[1..]);
    if xnorm == 0.0 {
        x[0] = 1.0;
        return (0.0, alpha);
    }
    let beta = -alpha.signum() * alpha.hypot(xnorm);
    let tau = (beta - alpha) / beta;
    let scale = 1.0 / (alpha - beta);
    for v in &mut x[1..] {
        *v *= scale;
    }
    x[0] = 1.0;
    (tau, beta)
}
