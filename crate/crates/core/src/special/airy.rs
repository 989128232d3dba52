//! Airy function of the first kind on [-40, 200].

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::gl20;

pub const AIRY_LO: f64 = -40.0;
pub const AIRY_HI: f64 = 200.0;

// Maclaurin on [-8, 6]; outside, the asymptotic series are accurate to
// well below 1e-12 relative.
const SERIES_LO: f64 = -8.0;
const SERIES_HI: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValue {
    pub ai: f64,
    pub ai_prime: f64,
}

/// Ai(x) and Ai'(x).
pub fn airy(x: f64) -> Result<AiryValue> {
    if !(AIRY_LO..=AIRY_HI).contains(&x) {
        return Err(Error::Range {
            value: x,
            lo: AIRY_LO,
            hi: AIRY_HI,
        });
    }
    Ok(airy_unchecked(x))
}

pub(crate) fn airy_unchecked(x: f64) -> AiryValue {
    if x > SERIES_HI {
        airy_positive_asymptotic(x)
    } else if x < SERIES_LO {
        airy_negative_asymptotic(-x)
    } else {
        airy_maclaurin(x)
    }
}

// Double-double arithmetic for the Maclaurin sums: the terms grow like
// exp(2/3 |x|^{3/2}) before cancelling, which costs ~7 digits at x = -8 in
// plain f64.
#[derive(Clone, Copy)]
struct Dd(f64, f64);

impl Dd {
    fn from(a: f64) -> Self {
        Dd(a, 0.0)
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.0, o.0);
        let e = e + self.1 + o.1;
        let (hi, lo) = quick_two_sum(s, e);
        Dd(hi, lo)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.0 * o.0;
        let e = self.0.mul_add(o.0, -p) + (self.0 * o.1 + self.1 * o.0);
        let (hi, lo) = quick_two_sum(p, e);
        Dd(hi, lo)
    }

    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.0 / d;
        let p = q1 * d;
        let pe = q1.mul_add(d, -p);
        let r = (self.0 - p - pe + self.1) / d;
        let (hi, lo) = quick_two_sum(q1, r);
        Dd(hi, lo)
    }

    fn abs_hi(self) -> f64 {
        self.0.abs()
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

const AI0_DD: Dd = Dd(0.355_028_053_887_817_2, 2.052_336_324_362_12e-17);
const MINUS_AIP0_DD: Dd = Dd(0.258_819_403_792_806_8, -2.522_243_111_610_832e-17);

fn airy_maclaurin(x: f64) -> AiryValue {
    let xd = Dd::from(x);
    let x3 = xd.mul(xd).mul(xd);
    // f = Σ t_k, g = Σ s_k, with Ai = c1 f - c2 g
    let mut t = Dd::from(1.0);
    let mut s = xd;
    let mut f = t;
    let mut g = s;
    let mut tp = xd.mul(xd).div_f64(2.0);
    let mut fp = tp;
    let mut sp = Dd::from(1.0);
    let mut gp = sp;
    for k in 1..300 {
        let kf = k as f64;
        t = t.mul(x3).div_f64((3.0 * kf - 1.0) * (3.0 * kf));
        s = s.mul(x3).div_f64((3.0 * kf) * (3.0 * kf + 1.0));
        if k > 1 {
            tp = tp.mul(x3).div_f64((3.0 * kf - 1.0) * (3.0 * kf - 3.0));
            fp = fp.add(tp);
        }
        sp = sp.mul(x3).div_f64((3.0 * kf) * (3.0 * kf - 2.0));
        f = f.add(t);
        g = g.add(s);
        gp = gp.add(sp);
        let scale = f.abs_hi() + g.abs_hi() + fp.abs_hi() + gp.abs_hi();
        if t.abs_hi() + s.abs_hi() + tp.abs_hi() + sp.abs_hi() <= 1e-33 * scale {
            break;
        }
    }
    let neg = |d: Dd| Dd(-d.0, -d.1);
    let ai = AI0_DD.mul(f).add(neg(MINUS_AIP0_DD.mul(g)));
    let aip = AI0_DD.mul(fp).add(neg(MINUS_AIP0_DD.mul(gp)));
    AiryValue {
        ai: ai.0 + ai.1,
        ai_prime: aip.0 + aip.1,
    }
}

// u_k and v_k of the standard asymptotic expansions
fn uv_coefficients(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0; n];
    let mut v = vec![1.0; n];
    for k in 1..n {
        let kf = k as f64;
        u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        v[k] = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u[k];
    }
    (u, v)
}

fn airy_positive_asymptotic(x: f64) -> AiryValue {
    let (u, v) = uv_coefficients(40);
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let mut su = 0.0;
    let mut sv = 0.0;
    let mut p = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..u.len() {
        let term = u[k] * p;
        if term.abs() > last {
            break;
        }
        last = term.abs();
        su += term;
        sv += v[k] * p;
        if term.abs() < 1e-17 * su.abs() {
            break;
        }
        p *= -1.0 / zeta;
    }
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = x.sqrt().sqrt();
    AiryValue {
        ai: e / q * su,
        ai_prime: -e * q * sv,
    }
}

// Ai(-x), Ai'(-x) for x > 0
fn airy_negative_asymptotic(x: f64) -> AiryValue {
    let (u, v) = uv_coefficients(40);
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let (mut p, mut q, mut r, mut s) = (0.0, 0.0, 0.0, 0.0);
    let mut zp = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..u.len() {
        let tu = u[k] * zp;
        if tu.abs() > last {
            break;
        }
        last = tu.abs();
        // sign pattern (-1)^floor(k/2)
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * tu;
            r += sign * v[k] * zp;
        } else {
            q += sign * tu;
            s += sign * v[k] * zp;
        }
        if tu.abs() < 1e-17 {
            break;
        }
        zp /= zeta;
    }
    let (sn, cs) = (zeta + PI / 4.0).sin_cos();
    let x4 = x.sqrt().sqrt();
    let rp = PI.sqrt();
    AiryValue {
        ai: (sn * p - cs * q) / (x4 * rp),
        ai_prime: -x4 / rp * (cs * r + sn * s),
    }
}

/// ∫_{-∞}^{y} Ai(t) dt.
pub fn airy_primitive(y: f64) -> Result<f64> {
    if !(AIRY_LO..=AIRY_HI).contains(&y) {
        return Err(Error::Range {
            value: y,
            lo: AIRY_LO,
            hi: AIRY_HI,
        });
    }
    let rule = gl20();
    if y >= 0.0 {
        // 1 - ∫_y^∞ Ai, tail on unit panels until Ai is negligible
        let mut tail = 0.0;
        let mut a = y;
        loop {
            let b = a + 1.0;
            tail += rule.integrate(a, b, |t| airy_unchecked(t).ai);
            if b > AIRY_HI || airy_unchecked(b).ai < 1e-20 {
                break;
            }
            a = b;
        }
        Ok(1.0 - tail)
    } else {
        // ∫_{-∞}^0 Ai = 2/3
        let panels = (-y).ceil().max(1.0) as usize;
        let h = -y / panels as f64;
        let mut s = 0.0;
        for i in 0..panels {
            let a = y + h * i as f64;
            s += rule.integrate(a, a + h, |t| airy_unchecked(t).ai);
        }
        Ok(2.0 / 3.0 - s)
    }
}

/// ∫_s^∞ K_Ai(x, x) dx in closed form.
pub(crate) fn airy_kernel_diag_tail(s: f64) -> f64 {
    let AiryValue { ai, ai_prime } = airy_unchecked(s);
    (2.0 * s * s * ai * ai - 2.0 * s * ai_prime * ai_prime - ai * ai_prime) / 3.0
}
