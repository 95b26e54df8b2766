//! Airy function `Ai` and its derivative on the real line.
//!
//! Maclaurin series near the origin, Poincaré asymptotic expansions
//! (truncated at the smallest term) further out.

use std::f64::consts::{FRAC_PI_4, PI};

/// Evaluation uses the power series on `[SWITCH_NEGATIVE, SWITCH_POSITIVE]`
/// and the asymptotic expansions outside. At these points both agree to
/// about 1e-12 for `Ai` and `Ai'`.
pub const SWITCH_POSITIVE: f64 = 5.5;
pub const SWITCH_NEGATIVE: f64 = -7.0;

fn use_series(x: f64) -> bool {
    (SWITCH_NEGATIVE..=SWITCH_POSITIVE).contains(&x)
}

/// Ai(0)
const AI0: f64 = 0.355_028_053_887_817_24;
/// -Ai'(0)
const AIP0: f64 = 0.258_819_403_792_806_8;

/// Ai(x).
pub fn ai(x: f64) -> f64 {
    if use_series(x) {
        ai_series(x).0
    } else {
        ai_asymptotic(x).0
    }
}

/// Ai'(x).
pub fn ai_prime(x: f64) -> f64 {
    if use_series(x) {
        ai_series(x).1
    } else {
        ai_asymptotic(x).1
    }
}

/// `(Ai(x), Ai'(x))` from the Maclaurin series `Ai = c1 f - c2 g`.
pub fn ai_series(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    // f = sum x^{3k} / ((2·3)(5·6)...), g = sum x^{3k+1} / ((3·4)(6·7)...)
    let mut f = 1.0;
    let mut g = x;
    let mut tf = 1.0;
    let mut tg = x;
    // derivative series: f' starts at x^2/2, g' at 1
    let mut fp = 0.0;
    let mut gp = 1.0;
    let mut tfp = x * x / 2.0;
    let mut tgp = 1.0;
    for k in 0..200 {
        let kf = k as f64;
        tf *= x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        tg *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        tgp *= x3 / ((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        f += tf;
        g += tg;
        gp += tgp;
        fp += tfp;
        tfp *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 5.0));
        let scale = f.abs() + g.abs() + fp.abs() + gp.abs();
        if tf.abs() + tg.abs() + tfp.abs() + tgp.abs() <= f64::EPSILON * 0.25 * scale {
            break;
        }
    }
    (AI0 * f - AIP0 * g, AI0 * fp - AIP0 * gp)
}

/// Coefficients `u_k` of the asymptotic expansions (DLMF 9.7.2).
fn u_coefficients(n: usize) -> Vec<f64> {
    let mut u = Vec::with_capacity(n);
    u.push(1.0);
    for k in 1..n {
        let kf = k as f64;
        let prev = u[k - 1];
        u.push(
            prev * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                / ((2.0 * kf - 1.0) * 216.0 * kf),
        );
    }
    u
}

/// Sums `sum_k sign_k c_k z^{-k}` over the indices in `ks`, stopping once
/// terms start growing (optimal truncation).
fn truncated_sum(coeffs: &[f64], zeta: f64, ks: impl Iterator<Item = usize>, alternating: bool) -> f64 {
    let mut acc = 0.0;
    let mut last = f64::INFINITY;
    for (j, k) in ks.enumerate() {
        let term = coeffs[k] / zeta.powi(k as i32);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        let sign = if alternating && j % 2 == 1 { -1.0 } else { 1.0 };
        acc += sign * term;
        if term.abs() < f64::EPSILON * acc.abs() * 0.1 {
            break;
        }
    }
    acc
}

/// `(Ai(x), Ai'(x))` from the large-|x| expansions.
pub fn ai_asymptotic(x: f64) -> (f64, f64) {
    const N: usize = 40;
    let u = u_coefficients(N);
    let v: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(k, &uk)| {
            let kf = k as f64;
            -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk
        })
        .collect();
    let sqrt_pi = PI.sqrt();
    if x > 0.0 {
        let zeta = 2.0 / 3.0 * x.powf(1.5);
        let e = (-zeta).exp();
        let s_u = truncated_sum(&u, zeta, 0..N, true);
        let s_v = truncated_sum(&v, zeta, 0..N, true);
        let ai = e / (2.0 * sqrt_pi * x.powf(0.25)) * s_u;
        let aip = -x.powf(0.25) * e / (2.0 * sqrt_pi) * s_v;
        (ai, aip)
    } else {
        let y = -x;
        let zeta = 2.0 / 3.0 * y.powf(1.5);
        let phase = zeta + FRAC_PI_4;
        let (s, c) = phase.sin_cos();
        let even_u = truncated_sum(&u, zeta, (0..N).step_by(2), true);
        let odd_u = truncated_sum(&u, zeta, (1..N).step_by(2), true);
        let even_v = truncated_sum(&v, zeta, (0..N).step_by(2), true);
        let odd_v = truncated_sum(&v, zeta, (1..N).step_by(2), true);
        let ai = (s * even_u - c * odd_u) / (sqrt_pi * y.powf(0.25));
        let aip = -y.powf(0.25) / sqrt_pi * (c * even_v + s * odd_v);
        (ai, aip)
    }
}
