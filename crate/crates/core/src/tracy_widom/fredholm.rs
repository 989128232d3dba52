//! Nyström discretisation of the Fredholm determinants for TW_2 and TW_1.

use nalgebra::DMatrix;

use crate::kernels::airy_limit::airy_kernel_unchecked;
use crate::quadrature::GaussLegendre;
use crate::special::airy::airy_unchecked;

/// Beyond this point the Airy kernel is below 1e-40 and is cut off.
const CUTOFF: f64 = 12.0;

fn det_identity_minus(mut a: DMatrix<f64>) -> f64 {
    a.neg_mut();
    for i in 0..a.nrows() {
        a[(i, i)] += 1.0;
    }
    a.lu().determinant()
}

/// F2(s) = det(I - K_Ai) on L²(s, ∞) with an m-point Gauss–Legendre rule.
pub fn tw2_fredholm(s: f64, m: usize) -> f64 {
    let b = s.max(0.0) + CUTOFF;
    let (x, w) = GaussLegendre::new(m).mapped(s, b);
    let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let a = DMatrix::from_fn(m, m, |i, j| {
        sw[i] * airy_kernel_unchecked(x[i], x[j]) * sw[j]
    });
    det_identity_minus(a)
}

/// F1(s) = det(I - A_s) on L²(0, ∞), A_s(x, y) = ½ Ai((x+y)/2 + s).
pub fn tw1_fredholm(s: f64, m: usize) -> f64 {
    let b = 2.0 * (CUTOFF - s.min(0.0));
    let (x, w) = GaussLegendre::new(m).mapped(0.0, b);
    let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let a = DMatrix::from_fn(m, m, |i, j| {
        let arg = 0.5 * (x[i] + x[j]) + s;
        sw[i] * 0.5 * airy_unchecked(arg.min(200.0)).ai * sw[j]
    });
    det_identity_minus(a)
}
