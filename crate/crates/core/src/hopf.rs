//! Dispersionless (Hopf) solution `u_t + 6 u u_x = 0` by characteristics.
//!
//! On the left branch the solution solves `x = 6 t u + f_L(u)`; on the right
//! branch `x = 6 t u + f_R(u)`. After the catastrophe the left relation has
//! three roots inside the cusp; the physically continued branch is the one
//! connected to `u -> 0⁻` as `x -> -∞`, i.e. the root closest to zero.

use crate::error::{Error, Result};
use crate::profile::{Profile, ENDPOINT_DELTA};

const SCAN_POINTS: usize = 512;
const RESIDUAL_LIMIT: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfSolution {
    pub u: f64,
    pub branch: Branch,
    /// `|x - 6 t u - f_branch(u)|`
    pub residual: f64,
}

fn inverse(p: &dyn Profile, branch: Branch, u: f64) -> f64 {
    match branch {
        Branch::Left => p.f_left(u),
        Branch::Right => p.f_right(u),
    }
}

fn inverse_prime(p: &dyn Profile, branch: Branch, u: f64) -> f64 {
    match branch {
        Branch::Left => p.f_left_deriv(1, u),
        Branch::Right => p.f_right_prime(u),
    }
}

/// Brackets of sign changes of `g(u) = x - 6tu - f(u)` on `(-1, 0)`,
/// ordered by increasing `u`.
fn brackets(p: &dyn Profile, branch: Branch, x: f64, t: f64) -> Vec<(f64, f64)> {
    let g = |u: f64| x - 6.0 * t * u - inverse(p, branch, u);
    let lo = -1.0 + ENDPOINT_DELTA;
    let hi = -ENDPOINT_DELTA;
    let mut out = Vec::new();
    // characteristics from next to the minimum: root in (-1, -1 + δ₀)
    let mut prev_u = -1.0 + ENDPOINT_DELTA * 1e-10;
    let mut prev_g = g(prev_u);
    for k in (0..10).rev() {
        let u = -1.0 + ENDPOINT_DELTA * 10f64.powi(-k);
        let gu = g(u);
        if gu == 0.0 || (gu > 0.0) != (prev_g > 0.0) {
            out.push((prev_u, u));
        }
        prev_u = u;
        prev_g = gu;
    }
    for i in 1..SCAN_POINTS {
        let u = lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64;
        let gu = g(u);
        if gu == 0.0 || (gu > 0.0) != (prev_g > 0.0) {
            out.push((prev_u, u));
        }
        prev_u = u;
        prev_g = gu;
    }
    // x beyond the δ₀ characteristic: the root sits in (-δ₀, 0)
    if out.len() % 2 == 0 {
        let target_sign = match branch {
            Branch::Left => prev_g < 0.0,
            Branch::Right => prev_g > 0.0,
        };
        if target_sign {
            let mut u = hi;
            for _ in 0..300 {
                let next = u * 0.1;
                if next == 0.0 {
                    break;
                }
                let gn = g(next);
                if (gn > 0.0) != (prev_g > 0.0) {
                    out.push((u, next));
                    break;
                }
                u = next;
                prev_g = gn;
            }
        }
    }
    out
}

/// Safeguarded Newton on a sign-change bracket.
fn refine(p: &dyn Profile, branch: Branch, x: f64, t: f64, (a0, b0): (f64, f64)) -> f64 {
    let g = |u: f64| x - 6.0 * t * u - inverse(p, branch, u);
    let (mut a, mut b) = (a0, b0);
    let mut ga = g(a);
    let mut u = 0.5 * (a + b);
    for _ in 0..200 {
        let gu = g(u);
        if gu == 0.0 {
            return u;
        }
        if (gu > 0.0) == (ga > 0.0) {
            a = u;
            ga = gu;
        } else {
            b = u;
        }
        let dg = -6.0 * t - inverse_prime(p, branch, u);
        let newton = u - gu / dg;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        u = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else if hi < 0.0 && lo / hi > 10.0 {
            // geometric bisection in the decaying tail
            -(lo * hi).sqrt()
        } else {
            0.5 * (a + b)
        };
        if (b - a).abs() <= 4.0 * f64::EPSILON * u.abs() {
            break;
        }
        let next_g = g(u);
        if next_g.abs() <= 1e-15 * (1.0 + x.abs()) {
            return u;
        }
    }
    u
}

fn finish(p: &dyn Profile, branch: Branch, x: f64, t: f64, u: f64) -> Result<HopfSolution> {
    let residual = (x - 6.0 * t * u - inverse(p, branch, u)).abs();
    if !(residual <= RESIDUAL_LIMIT) {
        return Err(Error::NoConvergence {
            iterations: 200,
            residual,
        });
    }
    Ok(HopfSolution { u, branch, residual })
}

/// Solves on the given branch. With `forced`, an ambiguous (three-root)
/// left relation resolves to the root connected to the `x -> -∞` tail;
/// without it, ambiguity is an error.
pub fn solve_branch(p: &dyn Profile, x: f64, t: f64, branch: Branch, forced: bool) -> Result<HopfSolution> {
    let br = brackets(p, branch, x, t);
    if br.is_empty() {
        return Err(Error::NoRoot { x, t });
    }
    if br.len() > 1 && !forced {
        return Err(Error::Multivalued { x, t, roots: br.len() });
    }
    let chosen = *br.last().expect("non-empty");
    let u = refine(p, branch, x, t, chosen);
    finish(p, branch, x, t, u)
}

/// Left-branch solution, continuous from `x -> -∞`.
pub fn solve_left(p: &dyn Profile, x: f64, t: f64) -> Result<HopfSolution> {
    solve_branch(p, x, t, Branch::Left, true)
}

/// Hopf solution on the whole line: characteristics with foot `ξ <= 0`
/// cover `x <= -6t`, the others come from the right branch.
pub fn solve(p: &dyn Profile, x: f64, t: f64) -> Result<HopfSolution> {
    let (first, second) = if x <= -6.0 * t {
        (Branch::Left, Branch::Right)
    } else {
        (Branch::Right, Branch::Left)
    };
    match solve_branch(p, x, t, first, true) {
        Err(Error::NoRoot { .. }) => solve_branch(p, x, t, second, true),
        other => other,
    }
}

/// `∂u/∂x = 1 / (6t + f_L'(u))` on the left branch.
pub fn x_slope(p: &dyn Profile, x: f64, t: f64) -> Result<f64> {
    let sol = solve_left(p, x, t)?;
    slope_at(p, sol.u, t)
}

pub(crate) fn slope_at(p: &dyn Profile, u: f64, t: f64) -> Result<f64> {
    let denominator = 6.0 * t + p.f_left_deriv(1, u);
    if denominator.abs() < 1e-8 {
        return Err(Error::NearCatastrophe { denominator });
    }
    Ok(1.0 / denominator)
}
