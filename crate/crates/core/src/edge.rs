//! Leading edge of the oscillatory zone.
//!
//! For `t > t_c` the edge `x⁻(t)` and the confluent Whitham values
//! `v(t) < u(t)` solve
//!
//! ```text
//! x⁻ = 6 t u + f_L(u),   6 t + θ(v; u) = 0,   ∂_v θ(v; u) = 0,
//! θ(v; u) = 1/(2√(u-v)) ∫_v^u f_L'(ξ) / √(ξ-v) dξ = ∫_0^1 f_L'(v + (u-v)τ²) dτ.
//! ```
//!
//! The module also evaluates the phase function `φ(λ; x)`, the integral
//! `τ(λ)` and the three admissibility inequalities that bound the time
//! window in which the edge asymptotics hold.

use std::sync::OnceLock;

use crate::csv::Table;
use crate::error::{Error, Result};
use crate::profile::{catastrophe, CatastrophePoint, Profile, ENDPOINT_DELTA};
use crate::quadrature::{integrate, DEFAULT_TOL};

/// Residual bound for the three edge equations.
pub const SYSTEM_TOL: f64 = 1e-10;

/// Continuation starts this far after the catastrophe.
pub const CONTINUATION_START: f64 = 1e-4;

/// Largest continuation step in `t`.
pub const CONTINUATION_STEP: f64 = 1e-2;

/// `estimate_t_max` never looks beyond `t_c + WINDOW_CAP`.
pub const WINDOW_CAP: f64 = 0.5;

/// Points of each λ grid in [`verify_window`].
pub const WINDOW_SAMPLES: usize = 400;

/// Radius of the excluded ball around `λ = v` in [`verify_window`].
pub const V_EXCLUSION: f64 = 1e-3;

const NEWTON_BUDGET: usize = 100;

/// Solved leading-edge data at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeState {
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub x_minus: f64,
    /// `c = -√(u-v) ∂²_vθ(v;u) > 0`
    pub c: f64,
    pub theta_v2: f64,
    pub theta_v3: f64,
    /// `f_L'(u)`
    pub fl_prime_u: f64,
}

impl EdgeState {
    /// Residuals `(6t + θ, ∂_vθ, x⁻ - 6tu - f_L(u))`, recomputed.
    pub fn residuals(&self, p: &dyn Profile) -> Result<[f64; 3]> {
        Ok([
            6.0 * self.t + theta(p, self.v, self.u)?,
            theta_dv(p, self.v, self.u, 1)?,
            self.x_minus - 6.0 * self.t * self.u - p.f_left(self.u),
        ])
    }
}

fn check_state(name: &'static str, value: f64) -> Result<()> {
    if (-1.0 + ENDPOINT_DELTA..=-ENDPOINT_DELTA).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfDomain { name, value, domain: "[-1 + 1e-6, -1e-6]" })
    }
}

fn check_pair(v: f64, u: f64) -> Result<()> {
    check_state("v", v)?;
    check_state("u", u)?;
    if v > u {
        return Err(Error::OutOfDomain { name: "v", value: v, domain: "v <= u" });
    }
    Ok(())
}

/// `∫_0^1 f_L^{(order)}(v + (u-v)τ²) w(τ) dτ`.
fn weighted(p: &dyn Profile, order: usize, v: f64, u: f64, w: impl Fn(f64) -> f64) -> f64 {
    let d = u - v;
    integrate(|s| p.f_left_deriv(order, v + d * s * s) * w(s), 0.0, 1.0, DEFAULT_TOL)
}

/// `θ(v; u)`, requires `-1 < v <= u < 0`.
pub fn theta(p: &dyn Profile, v: f64, u: f64) -> Result<f64> {
    check_pair(v, u)?;
    Ok(weighted(p, 1, v, u, |_| 1.0))
}

/// `∂ⁿ_v θ(v; u) = ∫_0^1 f_L^{(n+1)}(v + (u-v)τ²) (1-τ²)ⁿ dτ` for `n` in `1..=3`.
pub fn theta_dv(p: &dyn Profile, v: f64, u: f64, n: usize) -> Result<f64> {
    check_pair(v, u)?;
    if !(1..=3).contains(&n) {
        return Err(Error::OutOfDomain { name: "n", value: n as f64, domain: "1..=3" });
    }
    Ok(weighted(p, n + 1, v, u, |s| (1.0 - s * s).powi(n as i32)))
}

/// Newton system and its Jacobian at `(u, v)`. Both `u`-derivatives are
/// the analytic integrals with weight `τ²`.
fn system(p: &dyn Profile, t: f64, u: f64, v: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let f1 = 6.0 * t + weighted(p, 1, v, u, |_| 1.0);
    let f2 = weighted(p, 2, v, u, |s| 1.0 - s * s);
    let j11 = weighted(p, 2, v, u, |s| s * s);
    let j21 = weighted(p, 3, v, u, |s| s * s * (1.0 - s * s));
    let j22 = weighted(p, 3, v, u, |s| (1.0 - s * s).powi(2));
    // ∂_v θ is f2 itself
    ([f1, f2], [[j11, f2], [j21, j22]])
}

fn norm(f: [f64; 2]) -> f64 {
    f[0].abs().max(f[1].abs())
}

fn admissible(u: f64, v: f64) -> bool {
    v < u && v > -1.0 + ENDPOINT_DELTA && u < -ENDPOINT_DELTA
}

/// Damped Newton from `(u, v)`; returns the root and the iteration count.
fn newton(p: &dyn Profile, t: f64, mut u: f64, mut v: f64) -> Result<(f64, f64, usize)> {
    let (mut f, mut j) = system(p, t, u, v);
    let mut fnorm = norm(f);
    for it in 0..NEWTON_BUDGET {
        if fnorm <= 1e-3 * SYSTEM_TOL {
            return Ok((u, v, it));
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let du = -(j[1][1] * f[0] - j[0][1] * f[1]) / det;
        let dv = -(-j[1][0] * f[0] + j[0][0] * f[1]) / det;
        if !du.is_finite() || !dv.is_finite() {
            break;
        }
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-8 {
            let (un, vn) = (u + lambda * du, v + lambda * dv);
            if admissible(un, vn) {
                let (fn_, jn) = system(p, t, un, vn);
                let nn = norm(fn_);
                if nn < fnorm {
                    (u, v, f, j, fnorm) = (un, vn, fn_, jn, nn);
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            // no further decrease: accept if already at the noise floor
            if fnorm <= SYSTEM_TOL {
                return Ok((u, v, it));
            }
            break;
        }
        if (lambda * du).abs().max((lambda * dv).abs()) < 1e-15 && fnorm <= SYSTEM_TOL {
            return Ok((u, v, it + 1));
        }
    }
    if fnorm <= SYSTEM_TOL {
        return Ok((u, v, NEWTON_BUDGET));
    }
    Err(Error::NoConvergence { iterations: NEWTON_BUDGET, residual: fnorm })
}

/// Seed from the local model about the confluent point:
/// `u ≈ u_c + 12σ`, `v ≈ u_c - 3σ`, `σ = √((t - t_c)/(-2 f_L'''(u_c)))`.
pub fn confluent_seed(cat: &CatastrophePoint, t: f64) -> (f64, f64) {
    let sigma = ((t - cat.t_c) / (-2.0 * cat.fl3)).sqrt();
    (cat.u_c + 12.0 * sigma, cat.u_c - 3.0 * sigma)
}

/// Solves the edge system by continuation from the catastrophe.
pub struct EdgeSolver<'a> {
    profile: &'a dyn Profile,
    cat: CatastrophePoint,
    t_max: OnceLock<f64>,
}

impl<'a> EdgeSolver<'a> {
    pub fn new(profile: &'a dyn Profile) -> Result<Self> {
        let cat = catastrophe(profile)?;
        Ok(EdgeSolver { profile, cat, t_max: OnceLock::new() })
    }

    pub fn profile(&self) -> &'a dyn Profile {
        self.profile
    }

    pub fn catastrophe(&self) -> &CatastrophePoint {
        &self.cat
    }

    /// Estimated end of the admissible window (computed once).
    pub fn t_max(&self) -> f64 {
        *self.t_max.get_or_init(|| estimate_t_max_with(self))
    }

    /// Edge state at `t` with `t_c < t < T`.
    pub fn solve(&self, t: f64) -> Result<EdgeState> {
        if !(t > self.cat.t_c) {
            return Err(Error::BeforeCatastrophe { t, t_c: self.cat.t_c });
        }
        let t_max = self.t_max();
        if t >= t_max {
            return Err(Error::WindowExceeded { t, t_max });
        }
        self.solve_unchecked(t)
    }

    /// States at several times, sharing one continuation path.
    pub fn solve_many(&self, times: &[f64]) -> Result<Vec<EdgeState>> {
        times.iter().map(|&t| self.solve(t)).collect()
    }

    /// Edge state without the window check (still requires `t > t_c`).
    pub fn solve_unchecked(&self, t: f64) -> Result<EdgeState> {
        if !(t > self.cat.t_c) {
            return Err(Error::BeforeCatastrophe { t, t_c: self.cat.t_c });
        }
        let start = self.cat.t_c + CONTINUATION_START;
        let (u, v) = if t <= start {
            let (u0, v0) = confluent_seed(&self.cat, t);
            let (u, v, _) = newton(self.profile, t, u0, v0)?;
            (u, v)
        } else {
            let (u0, v0) = confluent_seed(&self.cat, start);
            let (u, v, _) = newton(self.profile, start, u0, v0)?;
            self.advance((start, u, v), t)?
        };
        self.finish(t, u, v)
    }

    /// Continues a solved `(t, u, v)` forward to `t`.
    fn advance(&self, (mut tp, mut u, mut v): (f64, f64, f64), t: f64) -> Result<(f64, f64)> {
        let p = self.profile;
        let (t_c, u_c) = (self.cat.t_c, self.cat.u_c);
        while tp < t {
            // geometric in t - t_c near the fold, capped step further out
            let next = (t_c + 2.0 * (tp - t_c)).min(tp + CONTINUATION_STEP).min(t);
            // predictor: the branches open like √(t - t_c)
            let r = ((next - t_c) / (tp - t_c)).sqrt();
            let (mut up, mut vp) = (u_c + (u - u_c) * r, u_c + (v - u_c) * r);
            if !admissible(up, vp) {
                (up, vp) = (u, v);
            }
            let (un, vn, _) = newton(p, next, up, vp).or_else(|_| newton(p, next, u, v))?;
            (u, v, tp) = (un, vn, next);
        }
        Ok((u, v))
    }

    fn finish(&self, t: f64, u: f64, v: f64) -> Result<EdgeState> {
        let p = self.profile;
        let theta_v2 = theta_dv(p, v, u, 2)?;
        let theta_v3 = theta_dv(p, v, u, 3)?;
        let state = EdgeState {
            t,
            u,
            v,
            x_minus: 6.0 * t * u + p.f_left(u),
            c: -(u - v).sqrt() * theta_v2,
            theta_v2,
            theta_v3,
            fl_prime_u: p.f_left_deriv(1, u),
        };
        let r = state.residuals(p)?;
        let worst = r[0].abs().max(r[1].abs());
        if !(worst <= SYSTEM_TOL) || !(r[2].abs() <= 1e-12 * (1.0 + state.x_minus.abs())) {
            return Err(Error::NoConvergence { iterations: NEWTON_BUDGET, residual: worst });
        }
        Ok(state)
    }
}

/// One-shot edge solve at `t`.
pub fn solve_edge(p: &dyn Profile, t: f64) -> Result<EdgeState> {
    EdgeSolver::new(p)?.solve(t)
}

/// `φ(λ; x)` for `λ <= u`.
///
/// `φ = √(u-λ)(x - x⁻) + ∫_λ^u (f_L'(ξ) + 6t) √(ξ-λ) dξ`.
pub fn phi(p: &dyn Profile, e: &EdgeState, lambda: f64, x: f64) -> Result<f64> {
    check_state("lambda", lambda)?;
    if lambda > e.u {
        return Err(Error::OutOfDomain { name: "lambda", value: lambda, domain: "lambda <= u" });
    }
    let d = e.u - lambda;
    let integral = 2.0
        * d.powf(1.5)
        * integrate(|s| (p.f_left_deriv(1, lambda + d * s * s) + 6.0 * e.t) * s * s, 0.0, 1.0, DEFAULT_TOL);
    Ok(d.sqrt() * (x - e.x_minus) + integral)
}

/// `∂_λ φ(λ; x) = -(x - x⁻)/(2√(u-λ)) - √(u-λ)(6t + θ(λ; u))` for `λ < u`.
pub fn phi_prime(p: &dyn Profile, e: &EdgeState, lambda: f64, x: f64) -> Result<f64> {
    check_state("lambda", lambda)?;
    if !(lambda < e.u) {
        return Err(Error::OutOfDomain { name: "lambda", value: lambda, domain: "lambda < u" });
    }
    let d = e.u - lambda;
    Ok(-(x - e.x_minus) / (2.0 * d.sqrt()) - d.sqrt() * (6.0 * e.t + theta(p, lambda, e.u)?))
}

/// `Im φ₊(λ; x)` for `u < λ < 0`, the boundary value from the upper half
/// plane with the cut of `√(u-λ)` on `[u, ∞)`, where `√(u-λ)₊ = -i√(λ-u)`:
///
/// `Im φ₊ = -√(λ-u)(x - x⁻) + ∫_u^λ (f_L'(ξ) + 6t) √(λ-ξ) dξ`.
pub fn phi_plus_imag(p: &dyn Profile, e: &EdgeState, lambda: f64, x: f64) -> Result<f64> {
    check_state("lambda", lambda)?;
    if !(lambda > e.u) {
        return Err(Error::OutOfDomain { name: "lambda", value: lambda, domain: "lambda > u" });
    }
    let d = lambda - e.u;
    let integral = 2.0
        * d.powf(1.5)
        * integrate(|s| (p.f_left_deriv(1, lambda - d * s * s) + 6.0 * e.t) * s * s, 0.0, 1.0, DEFAULT_TOL);
    Ok(-d.sqrt() * (x - e.x_minus) + integral)
}

/// `∫_a^b g(ξ) √(λ-ξ) dξ` with `b <= λ`, integrable endpoint behavior at
/// `a` (like `(ξ-a)^{-1/2}`) and a square-root zero at `b = λ` handled by
/// substitutions at both ends.
fn sqrt_weighted(g: impl Fn(f64) -> f64, a: f64, b: f64, lambda: f64) -> f64 {
    let m = 0.5 * (a + b);
    let lo = m - a;
    let left = integrate(
        |s| {
            let xi = a + lo * s * s;
            g(xi) * (lambda - xi).sqrt() * 2.0 * lo * s
        },
        0.0,
        1.0,
        DEFAULT_TOL,
    );
    let hi = b - m;
    let right = integrate(
        |s| {
            let xi = b - hi * s * s;
            g(xi) * (lambda - xi).max(0.0).sqrt() * 2.0 * hi * s
        },
        0.0,
        1.0,
        DEFAULT_TOL,
    );
    left + right
}

/// `τ(λ) = ∫_{f_L(λ)}^{f_R(λ)} √(λ - u0(x)) dx`.
pub fn tau(p: &dyn Profile, lambda: f64) -> Result<f64> {
    check_state("lambda", lambda)?;
    let root = |x: f64| (lambda - p.u0(x)).max(0.0).sqrt();
    // split at the minimum x = 0; x = endpoint ∓ width·s² on each half
    let a = p.f_left(lambda);
    let b = p.f_right(lambda);
    let left = integrate(|s| root(a - a * s * s) * (-2.0 * a * s), 0.0, 1.0, DEFAULT_TOL);
    let right = integrate(|s| root(b - b * s * s) * (2.0 * b * s), 0.0, 1.0, DEFAULT_TOL);
    Ok(left + right)
}

/// The three terms of the closed form
/// `-τ(λ) + iφ₊(λ; x⁻) = -4t(λ-u)^{3/2} + ∫_{-1}^u √(λ-ξ) f_L'(ξ) dξ - ∫_{-1}^λ √(λ-ξ) f_R'(ξ) dξ`.
pub fn tau_closed_form_terms(p: &dyn Profile, e: &EdgeState, lambda: f64) -> Result<[f64; 3]> {
    check_state("lambda", lambda)?;
    if !(lambda > e.u) {
        return Err(Error::OutOfDomain { name: "lambda", value: lambda, domain: "lambda > u" });
    }
    let t1 = -4.0 * e.t * (lambda - e.u).powf(1.5);
    let t2 = sqrt_weighted(|xi| p.f_left_deriv(1, xi), -1.0, e.u, lambda);
    let t3 = -sqrt_weighted(|xi| p.f_right_prime(xi), -1.0, lambda, lambda);
    Ok([t1, t2, t3])
}

/// Minimum margins of the admissibility inequalities at `x = x⁻`, each
/// positive when the inequality holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowReport {
    pub t: f64,
    /// `min φ'(λ; x⁻)` over `[-1, u)` minus a ball around `v`.
    pub phi_prime: f64,
    /// `min -Im φ₊(λ; x⁻)` over `(u, 0)`.
    pub im_phi_plus: f64,
    /// `min (τ + Im φ₊)`, i.e. `-(-τ + iφ₊)` from the direct evaluation.
    pub tau_direct: f64,
    /// The same quantity from the closed form.
    pub tau_closed: f64,
    /// Largest value of any single closed-form term (expected `<= 0`).
    pub max_term: f64,
    /// `max |direct - closed|` over the grid.
    pub form_discrepancy: f64,
}

impl WindowReport {
    pub fn all_positive(&self) -> bool {
        self.phi_prime > 0.0
            && self.im_phi_plus > 0.0
            && self.tau_direct > 0.0
            && self.tau_closed > 0.0
            && self.max_term <= 0.0
    }
}

/// `λ` grid on `[-1, u)` without the ball around `v`.
pub fn lower_grid(e: &EdgeState) -> Vec<f64> {
    let lo = -1.0 + ENDPOINT_DELTA;
    (0..WINDOW_SAMPLES)
        .map(|i| lo + (e.u - lo) * i as f64 / WINDOW_SAMPLES as f64)
        .filter(|l| (l - e.v).abs() >= V_EXCLUSION)
        .collect()
}

/// `λ` grid on `(u, 0)`, ending at `-δ₀`.
pub fn upper_grid(e: &EdgeState) -> Vec<f64> {
    let hi = -ENDPOINT_DELTA;
    (1..=WINDOW_SAMPLES)
        .map(|i| hi - (hi - e.u) * (WINDOW_SAMPLES - i) as f64 / WINDOW_SAMPLES as f64)
        .collect()
}

/// Samples the three inequalities on the λ grids.
pub fn verify_window(p: &dyn Profile, e: &EdgeState) -> Result<WindowReport> {
    let mut report = WindowReport {
        t: e.t,
        phi_prime: f64::INFINITY,
        im_phi_plus: f64::INFINITY,
        tau_direct: f64::INFINITY,
        tau_closed: f64::INFINITY,
        max_term: f64::NEG_INFINITY,
        form_discrepancy: 0.0,
    };
    for l in lower_grid(e) {
        report.phi_prime = report.phi_prime.min(phi_prime(p, e, l, e.x_minus)?);
    }
    for l in upper_grid(e) {
        let im = phi_plus_imag(p, e, l, e.x_minus)?;
        let direct = tau(p, l)? + im;
        let terms = tau_closed_form_terms(p, e, l)?;
        let closed = -(terms[0] + terms[1] + terms[2]);
        report.im_phi_plus = report.im_phi_plus.min(-im);
        report.tau_direct = report.tau_direct.min(direct);
        report.tau_closed = report.tau_closed.min(closed);
        report.max_term = terms.iter().fold(report.max_term, |m, &x| m.max(x));
        report.form_discrepancy = report.form_discrepancy.max((direct - closed).abs());
    }
    Ok(report)
}

fn window_holds(solver: &EdgeSolver, e: &EdgeState) -> bool {
    verify_window(solver.profile, e).map(|r| r.all_positive()).unwrap_or(false)
}

fn window_ok(solver: &EdgeSolver, t: f64) -> bool {
    solver.solve_unchecked(t).map(|e| window_holds(solver, &e)).unwrap_or(false)
}

fn estimate_t_max_with(solver: &EdgeSolver) -> f64 {
    let t_c = solver.cat.t_c;
    let cap = t_c + WINDOW_CAP;
    // one continuation pass on a coarse grid, then bisection on the first
    // failing interval
    let mut good = t_c;
    let mut state = match solver.solve_unchecked(t_c + CONTINUATION_START) {
        Ok(e) => (e.t, e.u, e.v),
        Err(_) => return t_c,
    };
    let steps = (WINDOW_CAP / CONTINUATION_STEP).round() as usize;
    for k in 1..=steps {
        let t = if k == steps { cap } else { t_c + k as f64 * CONTINUATION_STEP };
        let ok = match solver.advance(state, t).and_then(|(u, v)| solver.finish(t, u, v)) {
            Ok(e) => {
                state = (e.t, e.u, e.v);
                window_holds(solver, &e)
            }
            Err(_) => false,
        };
        if !ok {
            let mut bad = t;
            while bad - good > 1e-6 {
                let mid = 0.5 * (good + bad);
                if window_ok(solver, mid) {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            return good;
        }
        good = t;
    }
    cap
}

/// Largest `t <= t_c + 0.5` (to about 1e-6) for which the edge system is
/// solvable and all inequalities hold on the sampled grids.
pub fn estimate_t_max(p: &dyn Profile) -> Result<f64> {
    Ok(EdgeSolver::new(p)?.t_max())
}

/// `t,u,v,x_minus,c` rows for the given states.
pub fn edge_table(states: &[EdgeState]) -> Table {
    let mut table = Table::new(&["t", "u", "v", "x_minus", "c"]);
    for e in states {
        table.push(vec![e.t, e.u, e.v, e.x_minus, e.c]);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::builtin_sech2;

    fn solver() -> &'static EdgeSolver<'static> {
        static P: crate::profile::Sech2 = crate::profile::Sech2;
        static S: OnceLock<EdgeSolver<'static>> = OnceLock::new();
        S.get_or_init(|| EdgeSolver::new(&P).unwrap())
    }

    #[test]
    fn theta_on_diagonal_is_fl_prime() {
        let p = builtin_sech2();
        for u in [-0.9, -0.5, -0.1] {
            assert!((theta(&p, u, u).unwrap() - p.f_left_deriv(1, u)).abs() < 1e-14);
            let d1 = theta_dv(&p, u, u, 1).unwrap();
            assert!((d1 - 2.0 / 3.0 * p.f_left_deriv(2, u)).abs() < 1e-13);
        }
    }

    #[test]
    fn theta_rejects_bad_arguments() {
        let p = builtin_sech2();
        assert!(theta(&p, -0.3, -0.5).is_err());
        assert!(theta(&p, -1.5, -0.5).is_err());
        assert!(theta_dv(&p, -0.6, -0.5, 4).is_err());
    }

    #[test]
    fn theta_derivatives_match_richardson() {
        let p = builtin_sech2();
        let u = -0.3;
        for v in [-0.8, -0.6] {
            for n in 1..=3 {
                let f = |v: f64| if n == 1 { theta(&p, v, u).unwrap() } else { theta_dv(&p, v, u, n - 1).unwrap() };
                let c = |h: f64| (f(v + h) - f(v - h)) / (2.0 * h);
                let h = 1e-3;
                let fd = (4.0 * c(h / 2.0) - c(h)) / 3.0;
                let exact = theta_dv(&p, v, u, n).unwrap();
                assert!(((fd - exact) / exact).abs() < 1e-6, "n={n} v={v}: {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn jacobian_u_column_matches_differences() {
        let p = builtin_sech2();
        let (t, u, v) = (0.3, -0.2, -0.7);
        let (_, j) = system(&p, t, u, v);
        let h = 1e-5;
        let (fp, _) = system(&p, t, u + h, v);
        let (fm, _) = system(&p, t, u - h, v);
        assert!(((fp[0] - fm[0]) / (2.0 * h) - j[0][0]).abs() < 1e-6 * j[0][0].abs());
        assert!(((fp[1] - fm[1]) / (2.0 * h) - j[1][0]).abs() < 1e-6 * j[1][0].abs());
    }

    #[test]
    fn edge_at_fig_time() {
        let s = solver();
        let p = s.profile();
        let e = s.solve(0.4).unwrap();
        let r = e.residuals(p).unwrap();
        assert!(r[0].abs() <= 1e-10 && r[1].abs() <= 1e-10 && r[2].abs() <= 1e-12);
        assert!(e.v < e.u && e.c > 0.0 && 6.0 * e.t + e.fl_prime_u < 0.0);
    }

    #[test]
    fn before_catastrophe_and_window_errors() {
        let s = solver();
        assert!(matches!(s.solve(0.2), Err(Error::BeforeCatastrophe { .. })));
        assert!(matches!(s.solve(s.t_max() + 0.01), Err(Error::WindowExceeded { .. })));
    }

    #[test]
    fn smooth_in_time() {
        let s = solver();
        let a = s.solve(0.3).unwrap();
        let b = s.solve(0.3 + 1e-4).unwrap();
        for (x, y) in [(a.u, b.u), (a.v, b.v), (a.x_minus, b.x_minus)] {
            assert!((x - y).abs() < 1e-2 * 1e-1 && (x - y).abs() > 0.0);
        }
    }

    #[test]
    fn phi_vanishes_at_u_and_derivative_matches() {
        let s = solver();
        let p = s.profile();
        let e = s.solve(0.3).unwrap();
        assert!(phi(p, &e, e.u, e.x_minus).unwrap().abs() < 1e-15);
        for (l, x) in [(-0.9, e.x_minus), (-0.5, e.x_minus + 0.01), (e.v + 0.05, e.x_minus - 0.02)] {
            let h = 1e-5;
            let fd = (phi(p, &e, l + h, x).unwrap() - phi(p, &e, l - h, x).unwrap()) / (2.0 * h);
            let d = phi_prime(p, &e, l, x).unwrap();
            assert!((fd - d).abs() < 1e-6 * (1.0 + d.abs()), "{fd} vs {d}");
        }
    }

    #[test]
    fn tau_limits_and_monotone() {
        let p = builtin_sech2();
        assert!(tau(&p, -1.0 + 2e-6).unwrap() < 1e-5);
        let mut prev = 0.0;
        for i in 1..=50 {
            let l = -1.0 + 0.98 * i as f64 / 50.0;
            let v = tau(&p, l).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn window_margins_at_quarter() {
        let s = solver();
        let p = s.profile();
        let e = s.solve(0.25).unwrap();
        let r = verify_window(p, &e).unwrap();
        assert!(r.all_positive(), "{r:?}");
        assert!(r.form_discrepancy < 1e-8, "{r:?}");
    }
}
