//! Hastings–McLeod solution of q'' = s q + 2 q³ by Taylor-series stepping.
//!
//! Alongside q the integrator carries u = ∫_s^∞ q², I = ∫_s^∞ (x-s) q² and
//! v = ∫_s^∞ q, which give F2 = exp(-I) and F1 = exp(-(I + v)/2).

use crate::special::airy::{airy_kernel_diag_tail, airy_primitive, airy_unchecked};

const ORDER: usize = 24;

/// Solution values on a uniform grid, ordered by increasing s.
#[derive(Debug, Clone)]
pub struct PainleveSolution {
    pub s: Vec<f64>,
    pub q: Vec<f64>,
    pub u: Vec<f64>,
    pub i: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct State {
    q: f64,
    p: f64,
    u: f64,
    i: f64,
    v: f64,
}

fn taylor_step(s0: f64, st: State, h: f64) -> State {
    let mut a = [0.0; ORDER + 3];
    let mut b = [0.0; ORDER + 3];
    let mut c = [0.0; ORDER + 3];
    a[0] = st.q;
    a[1] = st.p;
    for n in 0..=ORDER {
        b[n] = (0..=n).map(|i| a[i] * a[n - i]).sum();
        c[n] = (0..=n).map(|i| b[i] * a[n - i]).sum();
        let prev = if n >= 1 { a[n - 1] } else { 0.0 };
        a[n + 2] = (s0 * a[n] + prev + 2.0 * c[n]) / ((n + 2) as f64 * (n + 1) as f64);
    }
    // u' = -q², I' = -u, v' = -q
    let mut uc = [0.0; ORDER + 3];
    let mut ic = [0.0; ORDER + 3];
    let mut vc = [0.0; ORDER + 3];
    uc[0] = st.u;
    ic[0] = st.i;
    vc[0] = st.v;
    for n in 0..=ORDER {
        uc[n + 1] = -b[n] / (n + 1) as f64;
        vc[n + 1] = -a[n] / (n + 1) as f64;
    }
    for n in 0..=ORDER {
        ic[n + 1] = -uc[n] / (n + 1) as f64;
    }
    let horner = |co: &[f64]| {
        co[..=ORDER + 1]
            .iter()
            .rev()
            .fold(0.0, |acc, &x| acc * h + x)
    };
    let mut dp = 0.0;
    for n in (1..=ORDER + 1).rev() {
        dp = dp * h + n as f64 * a[n];
    }
    State {
        q: horner(&a),
        p: dp,
        u: horner(&uc),
        i: horner(&ic),
        v: horner(&vc),
    }
}

/// q(s) ≈ √(-s/2)(1 + s⁻³/8 - 73 s⁻⁶/128 + 10657 s⁻⁹/1024) for s → -∞.
pub(crate) fn q_left_asymptotic(s: f64) -> f64 {
    let s3 = s * s * s;
    let inv = 1.0 / s3;
    (-s / 2.0).sqrt()
        * (1.0 + inv / 8.0 - 73.0 / 128.0 * inv * inv + 10657.0 / 1024.0 * inv * inv * inv)
}

/// Integrates from `s_max` down to `s_min` with spacing `h`; below `s_switch`
/// q is replaced by its left asymptotic expansion, since the backward
/// problem amplifies rounding like exp((2√2/3)|s|^{3/2}).
pub fn solve(s_min: f64, s_max: f64, h: f64, s_switch: f64) -> PainleveSolution {
    let n = ((s_max - s_min) / h).round() as usize;
    let grid: Vec<f64> = (0..=n).map(|k| s_min + h * k as f64).collect();
    let ai = airy_unchecked(s_max);
    // q ~ Ai with corrections of order Ai³, far below rounding at s = 8
    let mut st = State {
        q: ai.ai,
        p: ai.ai_prime,
        u: ai.ai_prime * ai.ai_prime - s_max * ai.ai * ai.ai,
        i: airy_kernel_diag_tail(s_max),
        v: 1.0 - airy_primitive(s_max).expect("s_max inside the Airy window"),
    };
    let mut q = vec![0.0; n + 1];
    let mut u = vec![0.0; n + 1];
    let mut ii = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let record =
        |k: usize, st: &State, q: &mut [f64], u: &mut [f64], ii: &mut [f64], v: &mut [f64]| {
            q[k] = st.q;
            u[k] = st.u;
            ii[k] = st.i;
            v[k] = st.v;
        };
    record(n, &st, &mut q, &mut u, &mut ii, &mut v);
    let mut k = n;
    while k > 0 && grid[k - 1] >= s_switch - 1e-12 {
        st = taylor_step(grid[k], st, grid[k - 1] - grid[k]);
        k -= 1;
        record(k, &st, &mut q, &mut u, &mut ii, &mut v);
    }
    // asymptotic q below the switch; (u, I, v) by RK4 on sub-steps
    let sub = 10;
    while k > 0 {
        let s0 = grid[k];
        let hh = (grid[k - 1] - s0) / sub as f64;
        let (mut uu, mut iv, mut vv) = (st.u, st.i, st.v);
        for j in 0..sub {
            let s = s0 + hh * j as f64;
            let f = |s: f64, u: f64| {
                let qq = q_left_asymptotic(s);
                (-qq * qq, -u, -qq)
            };
            let k1 = f(s, uu);
            let k2 = f(s + hh / 2.0, uu + hh / 2.0 * k1.0);
            let k3 = f(s + hh / 2.0, uu + hh / 2.0 * k2.0);
            let k4 = f(s + hh, uu + hh * k3.0);
            iv += hh / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            vv += hh / 6.0 * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2);
            uu += hh / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        }
        k -= 1;
        st = State {
            q: q_left_asymptotic(grid[k]),
            p: 0.0,
            u: uu,
            i: iv,
            v: vv,
        };
        record(k, &st, &mut q, &mut u, &mut ii, &mut v);
    }
    PainleveSolution {
        s: grid,
        q,
        u,
        i: ii,
        v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_branch_meets_left_asymptotic() {
        let sol = solve(-8.0, 8.0, 0.01, -8.0);
        // at s = -7 the asymptotic series is good to ~1e-8 relative
        let k = sol.s.iter().position(|&s| (s + 7.0).abs() < 1e-9).unwrap();
        let rel = (sol.q[k] / q_left_asymptotic(-7.0) - 1.0).abs();
        assert!(rel < 1e-6, "{rel}");
    }
}
