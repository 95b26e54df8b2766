//! Single-well initial data and its branch inverses.
//!
//! A profile `u0` is negative, has a single minimum `u0(0) = -1` and decays
//! to zero at both ends. Everything downstream consumes `u0` only through the
//! inverses `f_L` (left, decreasing part) and `f_R` (right, increasing part)
//! and the derivatives of `f_L`, so a profile is described by closed-form
//! callables for exactly those functions.

use crate::error::{Error, Result};

/// Endpoint margin: public operations only accept states in `(-1 + δ₀, -δ₀)`.
pub const ENDPOINT_DELTA: f64 = 1e-6;

/// Admissible initial data.
///
/// `f_left_deriv` and `f_right_deriv` must be valid on the whole open interval
/// `(-1, 0)`; quadrature nodes of desingularized integrals come arbitrarily
/// close to the endpoints.
pub trait Profile: Send + Sync {
    fn name(&self) -> &str;

    fn u0(&self, x: f64) -> f64;

    fn u0_prime(&self, x: f64) -> f64;

    /// Inverse of the decreasing branch, `(-1, 0) -> (-inf, 0)`.
    fn f_left(&self, lambda: f64) -> f64;

    /// Inverse of the increasing branch, `(-1, 0) -> (0, inf)`.
    fn f_right(&self, lambda: f64) -> f64;

    /// `order`-th derivative of `f_L` for `order` in `1..=4`.
    fn f_left_deriv(&self, order: usize, lambda: f64) -> f64;

    /// First derivative of `f_R`.
    fn f_right_prime(&self, lambda: f64) -> f64;
}

/// `u0(x) = -sech²(x)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Sech2;

/// Builds the `-sech²` profile.
pub fn builtin_sech2() -> Sech2 {
    Sech2
}

impl Profile for Sech2 {
    fn name(&self) -> &str {
        "sech2"
    }

    fn u0(&self, x: f64) -> f64 {
        let c = x.cosh();
        -1.0 / (c * c)
    }

    fn u0_prime(&self, x: f64) -> f64 {
        let c = x.cosh();
        2.0 * x.tanh() / (c * c)
    }

    fn f_left(&self, lambda: f64) -> f64 {
        // sinh²x = (1 + λ)/(-λ); asinh keeps precision at both ends
        -((1.0 + lambda) / -lambda).sqrt().asinh()
    }

    fn f_right(&self, lambda: f64) -> f64 {
        -self.f_left(lambda)
    }

    fn f_left_deriv(&self, order: usize, lambda: f64) -> f64 {
        assert!((1..=4).contains(&order), "f_L derivative order {order} not provided");
        sech2_fl_deriv(order, lambda)
    }

    fn f_right_prime(&self, lambda: f64) -> f64 {
        -sech2_fl_deriv(1, lambda)
    }
}

/// `d^n/dλ^n f_L` for the `-sech²` profile, `n >= 1`.
///
/// `f_L'(λ) = ½ λ^{-1} (1+λ)^{-1/2}`; higher orders follow from Leibniz' rule
/// on the two power factors.
fn sech2_fl_deriv(order: usize, lambda: f64) -> f64 {
    let m = order - 1;
    let one_plus = 1.0 + lambda;
    let mut acc = 0.0;
    let mut binom = 1.0;
    for k in 0..=m {
        // d^k λ^{-1} = (-1)^k k! λ^{-1-k}
        let mut dk = if k % 2 == 0 { 1.0 } else { -1.0 };
        for j in 1..=k {
            dk *= j as f64;
        }
        dk *= lambda.powi(-1 - k as i32);
        // d^j (1+λ)^{-1/2} = prod_{i<j} (-1/2 - i) (1+λ)^{-1/2-j}
        let j = m - k;
        let mut dj = 1.0;
        for i in 0..j {
            dj *= -0.5 - i as f64;
        }
        dj *= one_plus.powf(-0.5 - j as f64);
        acc += binom * dk * dj;
        binom = binom * (m - k) as f64 / (k + 1) as f64;
    }
    0.5 * acc
}

/// Looks up a built-in profile by its configuration name.
pub fn by_name(name: &str) -> Option<Box<dyn Profile>> {
    match name {
        "sech2" => Some(Box::new(Sech2)),
        _ => None,
    }
}

/// The gradient catastrophe of the Hopf flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatastrophePoint {
    pub t_c: f64,
    pub u_c: f64,
    pub x_c: f64,
    /// `f_L'''(u_c)`, negative in the generic case.
    pub fl3: f64,
    /// Maximizer of `-6 u0'` (the foot of the breaking characteristic).
    pub xi_c: f64,
}

const GENERIC_THRESHOLD: f64 = 1e-8;
const SCAN_POINTS: usize = 10_000;

/// Locates the gradient catastrophe.
///
/// Scans `-6 u0'` on a log-spaced grid over `x < 0`, refines the best bracket
/// by golden-section search, then polishes `u_c` by Newton on `f_L''(u_c) = 0`.
pub fn catastrophe(p: &dyn Profile) -> Result<CatastrophePoint> {
    let slope = |x: f64| -6.0 * p.u0_prime(x);
    // |x| from 1e-4 to 1e2, log-spaced
    let (lo_exp, hi_exp) = (-4.0f64, 2.0f64);
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| {
            let e = lo_exp + (hi_exp - lo_exp) * i as f64 / (SCAN_POINTS - 1) as f64;
            -(10f64.powf(e))
        })
        .collect();
    let (best, _) = grid
        .iter()
        .enumerate()
        .map(|(i, &x)| (i, slope(x)))
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    if best == 0 || best == SCAN_POINTS - 1 {
        return Err(Error::NoInteriorMax);
    }
    // grid runs from -1e-4 towards -1e2, so neighbours bracket the max
    let (mut a, mut b) = (grid[best + 1], grid[best - 1]);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (slope(c), slope(d));
    while (b - a).abs() > 1e-12 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = slope(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = slope(d);
        }
    }
    let xi = 0.5 * (a + b);
    let max_slope = slope(xi);
    if !(max_slope > 0.0) {
        return Err(Error::NoInteriorMax);
    }
    let t_c = 1.0 / max_slope;

    // polish: f_L'' has a simple zero at u_c
    let mut u_c = p.u0(xi);
    for _ in 0..50 {
        let f2 = p.f_left_deriv(2, u_c);
        let f3 = p.f_left_deriv(3, u_c);
        let step = f2 / f3;
        u_c -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    let fl3 = p.f_left_deriv(3, u_c);
    if fl3.abs() < GENERIC_THRESHOLD {
        return Err(Error::NonGeneric { fl3 });
    }
    let x_c = 6.0 * t_c * u_c + p.f_left(u_c);
    Ok(CatastrophePoint {
        t_c,
        u_c,
        x_c,
        fl3,
        xi_c: p.f_left(u_c),
    })
}

/// Outcome of one numerical check in [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Measured quantity that the threshold applies to (e.g. the worst error).
    pub measured: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Chebyshev points mapped to `(a, b)`.
pub(crate) fn chebyshev_points(n: usize, a: f64, b: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let x = (std::f64::consts::PI * (k as f64 + 0.5) / n as f64).cos();
            0.5 * (a + b) + 0.5 * (b - a) * x
        })
        .collect()
}

/// Difference step scaled to the distance from the branch points.
pub(crate) fn fd_step(lambda: f64) -> f64 {
    1e-2 * lambda.abs().min(1.0 + lambda)
}

/// Richardson-extrapolated central difference.
pub(crate) fn richardson_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// Numerically checks the profile assumptions and internal consistency of
/// the supplied inverses and derivatives.
pub fn validate(p: &dyn Profile) -> ValidationReport {
    let mut checks = Vec::new();
    let mut push = |name, measured: f64, threshold: f64, passed: bool| {
        checks.push(Check {
            name,
            passed: passed && measured.is_finite(),
            measured,
            threshold,
        })
    };

    let norm = (p.u0(0.0) + 1.0).abs();
    push("normalization", norm, 1e-12, norm <= 1e-12);

    let slope0 = p.u0_prime(0.0).abs();
    push("critical_point", slope0, 1e-12, slope0 <= 1e-12);

    let h = 1e-4;
    let curv = (p.u0(h) - 2.0 * p.u0(0.0) + p.u0(-h)) / (h * h);
    push("minimum_curvature", curv, 0.0, curv > 0.0);

    let samples: Vec<f64> = (1..=400).map(|i| -20.0 + 40.0 * i as f64 / 401.0).filter(|x| *x != 0.0).collect();
    let worst = samples.iter().map(|&x| p.u0(x)).fold(f64::NEG_INFINITY, f64::max);
    let lowest = samples.iter().map(|&x| p.u0(x)).fold(f64::INFINITY, f64::min);
    push("range", worst.max(-1.0 - lowest), 0.0, worst < 0.0 && lowest > -1.0);

    let tail = p.u0(-50.0).abs().max(p.u0(50.0).abs());
    push("decay", tail, 1e-6, tail <= 1e-6);

    let lambdas = chebyshev_points(200, -0.99, -0.01);
    let rt_left = lambdas.iter().map(|&l| (p.u0(p.f_left(l)) - l).abs()).fold(0.0, f64::max);
    push("round_trip_left", rt_left, 1e-12, rt_left <= 1e-12);
    let rt_right = lambdas.iter().map(|&l| (p.u0(p.f_right(l)) - l).abs()).fold(0.0, f64::max);
    push("round_trip_right", rt_right, 1e-12, rt_right <= 1e-12);
    let sides = lambdas.iter().all(|&l| p.f_left(l) < 0.0 && p.f_right(l) > 0.0);
    push("branch_sides", if sides { 0.0 } else { 1.0 }, 0.0, sides);

    let inner = chebyshev_points(50, -0.9, -0.1);
    for (k, name) in [
        (1usize, "fl_deriv_1"),
        (2, "fl_deriv_2"),
        (3, "fl_deriv_3"),
        (4, "fl_deriv_4"),
    ] {
        let worst = inner
            .iter()
            .map(|&l| {
                let fd = if k == 1 {
                    richardson_derivative(|y| p.f_left(y), l, fd_step(l))
                } else {
                    richardson_derivative(|y| p.f_left_deriv(k - 1, y), l, fd_step(l))
                };
                let exact = p.f_left_deriv(k, l);
                (fd - exact).abs() / exact.abs().max(1e-300)
            })
            .fold(0.0, f64::max);
        push(name, worst, 1e-6, worst <= 1e-6);
    }
    let fr_worst = inner
        .iter()
        .map(|&l| {
            let fd = richardson_derivative(|y| p.f_right(y), l, fd_step(l));
            let exact = p.f_right_prime(l);
            (fd - exact).abs() / exact.abs()
        })
        .fold(0.0, f64::max);
    push("fr_deriv_1", fr_worst, 1e-6, fr_worst <= 1e-6);

    ValidationReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sech2_normalization_and_inverses() {
        let p = builtin_sech2();
        assert_eq!(p.u0(0.0), -1.0);
        assert!(p.f_left(-1.0).abs() < 1e-15);
        let fl1 = p.f_left_deriv(1, -2.0 / 3.0);
        assert!((fl1 + 3.0 * 3f64.sqrt() / 4.0).abs() < 1e-14);
        assert!(p.f_left_deriv(2, -2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn sech2_closed_form_first_derivative() {
        let p = builtin_sech2();
        for l in [-0.95f64, -0.5, -0.2, -0.01] {
            let exact = 1.0 / (2.0 * l * (1.0 + l).sqrt());
            assert!((p.f_left_deriv(1, l) - exact).abs() <= 1e-14 * exact.abs());
        }
    }

    #[test]
    fn sech2_higher_derivatives_match_finite_differences() {
        let p = builtin_sech2();
        for l in chebyshev_points(30, -0.95, -0.05) {
            for k in 2..=4 {
                let fd = richardson_derivative(|y| p.f_left_deriv(k - 1, y), l, fd_step(l));
                let exact = p.f_left_deriv(k, l);
                assert!(((fd - exact) / exact).abs() < 1e-7, "k={k}, λ={l}");
            }
        }
    }

    #[test]
    fn catastrophe_of_sech2() {
        let c = catastrophe(&builtin_sech2()).unwrap();
        // closed form: tanh x = -1/sqrt(3)
        assert!((c.t_c - 3f64.sqrt() / 8.0).abs() < 1e-12);
        assert!((c.u_c + 2.0 / 3.0).abs() < 1e-12);
        let x_c = -(3f64.sqrt()) / 2.0 - (1.5f64).sqrt().acosh();
        assert!((c.x_c - x_c).abs() < 1e-10);
        assert!((c.x_c + 1.524_504_352_246_847).abs() < 1e-10);
        assert!(c.fl3 < 0.0);
        // f_L''' at u_c, independent 30-digit evaluation
        assert!((c.fl3 + 8.768_507_213_317_441).abs() < 1e-9);
    }

    #[test]
    fn catastrophe_time_definitions_agree() {
        let p = builtin_sech2();
        let c = catastrophe(&p).unwrap();
        let alt = -p.f_left_deriv(1, c.u_c) / 6.0;
        assert!(((c.t_c - alt) / c.t_c).abs() < 1e-10);
    }

    #[test]
    fn sech2_validates() {
        let r = validate(&builtin_sech2());
        for c in &r.checks {
            assert!(c.passed, "{c:?}");
        }
    }

    struct Shallow;
    impl Profile for Shallow {
        fn name(&self) -> &str {
            "shallow"
        }
        fn u0(&self, x: f64) -> f64 {
            0.9 * Sech2.u0(x)
        }
        fn u0_prime(&self, x: f64) -> f64 {
            0.9 * Sech2.u0_prime(x)
        }
        fn f_left(&self, l: f64) -> f64 {
            Sech2.f_left(l / 0.9)
        }
        fn f_right(&self, l: f64) -> f64 {
            Sech2.f_right(l / 0.9)
        }
        fn f_left_deriv(&self, k: usize, l: f64) -> f64 {
            Sech2.f_left_deriv(k, l / 0.9) / 0.9f64.powi(k as i32)
        }
        fn f_right_prime(&self, l: f64) -> f64 {
            Sech2.f_right_prime(l / 0.9) / 0.9
        }
    }

    #[test]
    fn unnormalized_profile_fails_normalization() {
        let r = validate(&Shallow);
        assert!(!r.get("normalization").unwrap().passed);
        assert!(!r.all_passed());
    }

    struct Perturbed;
    impl Profile for Perturbed {
        fn name(&self) -> &str {
            "perturbed"
        }
        fn u0(&self, x: f64) -> f64 {
            Sech2.u0(x)
        }
        fn u0_prime(&self, x: f64) -> f64 {
            Sech2.u0_prime(x)
        }
        fn f_left(&self, l: f64) -> f64 {
            Sech2.f_left(l)
        }
        fn f_right(&self, l: f64) -> f64 {
            Sech2.f_right(l)
        }
        fn f_left_deriv(&self, k: usize, l: f64) -> f64 {
            let v = Sech2.f_left_deriv(k, l);
            if k == 2 {
                v * 1.01
            } else {
                v
            }
        }
        fn f_right_prime(&self, l: f64) -> f64 {
            Sech2.f_right_prime(l)
        }
    }

    #[test]
    fn one_percent_derivative_error_is_detected() {
        let r = validate(&Perturbed);
        assert!(!r.get("fl_deriv_2").unwrap().passed);
        assert!(r.get("fl_deriv_1").unwrap().passed);
        assert!(r.get("normalization").unwrap().passed);
    }

    #[test]
    fn registry_lookup() {
        assert_eq!(by_name("sech2").unwrap().name(), "sech2");
        assert!(by_name("gaussian").is_none());
    }
}
