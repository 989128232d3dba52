//! Soft-edge limit kernels.

use crate::error::{domain, Result};
use crate::special::airy::{
    airy_kernel_diag_tail, airy_primitive, airy_unchecked, AIRY_HI, AIRY_LO,
};

const NEAR_DIAGONAL: f64 = 1e-4;

/// K_Ai(x, y) = (Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x - y).
///
/// Within |x-y| ≤ 1e-4 the ratio loses digits, so the kernel is expanded
/// about the midpoint c: K(c+d, c-d) = K(c,c) - d² ∫_c^∞ K(t,t) dt + O(d⁴).
pub fn airy_kernel(x: f64, y: f64) -> Result<f64> {
    check(x)?;
    check(y)?;
    Ok(airy_kernel_unchecked(x, y))
}

pub(crate) fn airy_kernel_unchecked(x: f64, y: f64) -> f64 {
    if (x - y).abs() > NEAR_DIAGONAL {
        let a = airy_unchecked(x);
        let b = airy_unchecked(y);
        return (a.ai * b.ai_prime - a.ai_prime * b.ai) / (x - y);
    }
    let c = 0.5 * (x + y);
    let d = 0.5 * (x - y);
    let v = airy_unchecked(c);
    let diag = v.ai_prime * v.ai_prime - c * v.ai * v.ai;
    if d == 0.0 {
        return diag;
    }
    diag - d * d * airy_kernel_diag_tail(c)
}

/// K_Ai(x, y) + ½ Ai(x) ∫_{-∞}^{y} Ai.
pub fn loe_limit_kernel(x: f64, y: f64) -> Result<f64> {
    let k = airy_kernel(x, y)?;
    Ok(k + 0.5 * airy_unchecked(x).ai * airy_primitive(y)?)
}

fn check(x: f64) -> Result<()> {
    if !(AIRY_LO..=AIRY_HI).contains(&x) {
        return domain(format!(
            "Airy kernel argument {x} outside [{AIRY_LO}, {AIRY_HI}]"
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_at_zero() {
        let k = airy_kernel(0.0, 0.0).unwrap();
        assert!((k - 0.258_819_403_792_806_8f64.powi(2)).abs() < 1e-15);
        assert!((k - 0.066_987_483).abs() < 1e-8);
    }

    #[test]
    fn symmetric_and_continuous_across_switch() {
        for &(x, y) in &[(0.3, 1.7), (-2.0, 0.5), (1.0, 1.0 + 2e-4)] {
            assert_eq!(airy_kernel(x, y).unwrap(), airy_kernel(y, x).unwrap());
        }
        // both forms at the same off-diagonal point
        let (x, y) = (1.0, 1.0 + 0.9e-4);
        let a = airy_unchecked(x);
        let b = airy_unchecked(y);
        let ratio = (a.ai * b.ai_prime - a.ai_prime * b.ai) / (x - y);
        assert!((airy_kernel(x, y).unwrap() - ratio).abs() < 1e-11);
    }
}
