//! Hastings–McLeod solution of Painlevé II, `q'' = s q + 2 q³`.
//!
//! `q ~ Ai(s)` as `s -> +∞` and `q ~ √(-s/2)` as `s -> -∞`. Forward
//! shooting is exponentially unstable, so the solution is computed as a
//! two-point boundary value problem: Numerov discretization (fourth order,
//! tridiagonal), damped Newton, Dirichlet data from the asymptotics.

use crate::airy;
use crate::csv::Table;
use crate::error::{Error, Result};

pub const DEFAULT_S_MIN: f64 = -12.0;
pub const DEFAULT_S_MAX: f64 = 8.0;
pub const DEFAULT_NODES: usize = 4000;
pub const DEFAULT_TOL: f64 = 1e-12;

/// Evaluation is only trusted this far inside the table.
pub const GUARD: f64 = 0.5;

/// Sup-norm bound on `q'' - s q - 2 q³` at the nodes.
pub const RESIDUAL_LIMIT: f64 = 1e-8;

const NEWTON_BUDGET: usize = 200;

/// `√(-s/2) (1 + 1/(8 s³))`, the left boundary value.
pub fn left_asymptotic(s: f64) -> f64 {
    (-s / 2.0).sqrt() * (1.0 + 1.0 / (8.0 * s * s * s))
}

/// Tabulated Hastings–McLeod solution.
#[derive(Debug, Clone)]
pub struct HmTable {
    pub s_min: f64,
    pub s_max: f64,
    pub nodes: Vec<f64>,
    pub q: Vec<f64>,
    pub dq: Vec<f64>,
    /// Sup-norm of the five-point ODE residual over all nodes.
    pub residual: f64,
    /// Damped Newton steps taken.
    pub iterations: usize,
}

/// `q`, `q'` and the derived `p = -q⁴ - s q² + q'²`, `b = (q' + q p)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxValues {
    pub s: f64,
    pub q: f64,
    pub qp: f64,
    pub p: f64,
    pub b: f64,
}

impl AuxValues {
    pub fn from_q(s: f64, q: f64, qp: f64) -> Self {
        let p = -q.powi(4) - s * q * q + qp * qp;
        let b = 0.5 * (qp + q * p);
        AuxValues { s, q, qp, p, b }
    }
}

fn rhs(s: f64, q: f64) -> f64 {
    s * q + 2.0 * q * q * q
}

fn rhs_dq(s: f64, q: f64) -> f64 {
    s + 6.0 * q * q
}

fn initial_guess(s: f64) -> f64 {
    let left = |s: f64| (-s / 2.0).sqrt();
    if s >= 1.0 {
        airy::ai(s)
    } else if s <= -1.0 {
        left(s)
    } else {
        // cubic Hermite between the two regimes on [-1, 1]
        let (y0, d0) = (left(-1.0), -0.25 / (0.5f64).sqrt());
        let (y1, d1) = (airy::ai(1.0), airy::ai_prime(1.0));
        let t = (s + 1.0) / 2.0;
        let (h00, h10) = (2.0 * t.powi(3) - 3.0 * t * t + 1.0, t.powi(3) - 2.0 * t * t + t);
        let (h01, h11) = (-2.0 * t.powi(3) + 3.0 * t * t, t.powi(3) - t * t);
        h00 * y0 + h10 * 2.0 * d0 + h01 * y1 + h11 * 2.0 * d1
    }
}

/// Numerov residuals at interior nodes.
fn numerov_residual(s: &[f64], q: &[f64], h: f64) -> Vec<f64> {
    let n = q.len();
    let c = h * h / 12.0;
    let f: Vec<f64> = s.iter().zip(q).map(|(&s, &q)| rhs(s, q)).collect();
    (1..n - 1)
        .map(|i| q[i + 1] - 2.0 * q[i] + q[i - 1] - c * (f[i + 1] + 10.0 * f[i] + f[i - 1]))
        .collect()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves a tridiagonal system in place (Thomas algorithm).
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = diag[0];
    c[0] = upper[0] / d;
    rhs[0] /= d;
    for i in 1..n {
        d = diag[i] - lower[i] * c[i - 1];
        if i + 1 < n {
            c[i] = upper[i] / d;
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / d;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// Builds the table on `[s_min, s_max]` with `n_nodes` grid intervals.
///
/// Newton stops once the update is below `tol` in sup-norm.
pub fn build_hm(s_min: f64, s_max: f64, n_nodes: usize, tol: f64) -> Result<HmTable> {
    if !(s_min <= -10.0) {
        return Err(Error::OutOfDomain { name: "s_min", value: s_min, domain: "s_min <= -10" });
    }
    if !(s_max >= 6.0) {
        return Err(Error::OutOfDomain { name: "s_max", value: s_max, domain: "s_max >= 6" });
    }
    if n_nodes < 1000 {
        return Err(Error::OutOfDomain {
            name: "n_nodes",
            value: n_nodes as f64,
            domain: "n_nodes >= 1000",
        });
    }
    if !(tol >= 1e-12) {
        return Err(Error::OutOfDomain { name: "tol", value: tol, domain: "tol >= 1e-12" });
    }

    let h = (s_max - s_min) / n_nodes as f64;
    let s: Vec<f64> = (0..=n_nodes).map(|i| s_min + h * i as f64).collect();
    let mut q: Vec<f64> = s.iter().map(|&s| initial_guess(s)).collect();
    q[0] = left_asymptotic(s_min);
    q[n_nodes] = airy::ai(s_max);

    let c = h * h / 12.0;
    let m = n_nodes - 1;
    let mut res = numerov_residual(&s, &q, h);
    let mut norm = sup(&res);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < NEWTON_BUDGET {
        iterations += 1;
        let mut lower = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        for k in 0..m {
            let i = k + 1;
            diag[k] = -2.0 - 10.0 * c * rhs_dq(s[i], q[i]);
            if k > 0 {
                lower[k] = 1.0 - c * rhs_dq(s[i - 1], q[i - 1]);
            }
            if k + 1 < m {
                upper[k] = 1.0 - c * rhs_dq(s[i + 1], q[i + 1]);
            }
        }
        let mut step: Vec<f64> = res.iter().map(|r| -r).collect();
        thomas(&lower, &diag, &upper, &mut step);
        let step_norm = sup(&step);

        let mut lambda = 1.0;
        loop {
            let mut trial = q.clone();
            for k in 0..m {
                trial[k + 1] += lambda * step[k];
            }
            let trial_res = numerov_residual(&s, &trial, h);
            let trial_norm = sup(&trial_res);
            if trial_norm.is_finite() && (trial_norm < norm || trial_norm == 0.0) {
                q = trial;
                res = trial_res;
                norm = trial_norm;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                if lambda * step_norm <= tol {
                    break;
                }
                return Err(Error::NewtonDiverged { residual: norm / (h * h) });
            }
        }
        if lambda * step_norm <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NewtonDiverged { residual: norm / (h * h) });
    }

    let dq = derivative(&q, h);
    let residual = ode_residual(&s, &q, h);
    if !(residual <= RESIDUAL_LIMIT) {
        return Err(Error::ResidualTooLarge { residual, limit: RESIDUAL_LIMIT });
    }
    Ok(HmTable { s_min, s_max, nodes: s, q, dq, residual, iterations })
}

/// Builds the default table on `[-12, 8]` with 4000 intervals.
pub fn build_default() -> Result<HmTable> {
    build_hm(DEFAULT_S_MIN, DEFAULT_S_MAX, DEFAULT_NODES, DEFAULT_TOL)
}

/// Fourth-order finite-difference derivative on a uniform grid.
fn derivative(q: &[f64], h: f64) -> Vec<f64> {
    const EDGE0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
    const EDGE1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
    let n = q.len();
    let dot = |w: &[f64; 5], start: usize, sign: f64| {
        (0..5)
            .map(|j| w[j] * if sign > 0.0 { q[start + j] } else { q[start - j] })
            .sum::<f64>()
            * sign
            / (12.0 * h)
    };
    (0..n)
        .map(|i| match i {
            0 => dot(&EDGE0, 0, 1.0),
            1 => dot(&EDGE1, 0, 1.0),
            _ if i == n - 1 => dot(&EDGE0, n - 1, -1.0),
            _ if i == n - 2 => dot(&EDGE1, n - 1, -1.0),
            _ => (q[i - 2] - 8.0 * q[i - 1] + 8.0 * q[i + 1] - q[i + 2]) / (12.0 * h),
        })
        .collect()
}

/// Second derivative by five-point stencils (one-sided near the ends).
fn second_derivative(q: &[f64], i: usize, h: f64) -> f64 {
    let n = q.len();
    let h2 = 12.0 * h * h;
    if i >= 2 && i + 2 < n {
        (-q[i - 2] + 16.0 * q[i - 1] - 30.0 * q[i] + 16.0 * q[i + 1] - q[i + 2]) / h2
    } else if i == 1 {
        (10.0 * q[0] - 15.0 * q[1] - 4.0 * q[2] + 14.0 * q[3] - 6.0 * q[4] + q[5]) / h2
    } else if i == 0 {
        (45.0 * q[0] - 154.0 * q[1] + 214.0 * q[2] - 156.0 * q[3] + 61.0 * q[4] - 10.0 * q[5]) / h2
    } else if i == n - 2 {
        (10.0 * q[n - 1] - 15.0 * q[n - 2] - 4.0 * q[n - 3] + 14.0 * q[n - 4] - 6.0 * q[n - 5] + q[n - 6]) / h2
    } else {
        (45.0 * q[n - 1] - 154.0 * q[n - 2] + 214.0 * q[n - 3] - 156.0 * q[n - 4] + 61.0 * q[n - 5]
            - 10.0 * q[n - 6])
            / h2
    }
}

/// Sup over interior nodes of `|q'' - s q - 2q³|` with `q''` from
/// five-point differences of the discrete solution.
fn ode_residual(s: &[f64], q: &[f64], h: f64) -> f64 {
    (1..q.len() - 1)
        .map(|i| (second_derivative(q, i, h) - rhs(s[i], q[i])).abs())
        .fold(0.0, f64::max)
}

impl HmTable {
    pub fn step(&self) -> f64 {
        (self.s_max - self.s_min) / (self.nodes.len() - 1) as f64
    }

    /// Sup-norm ODE residual at each interior node, recomputed.
    pub fn node_residuals(&self) -> Vec<f64> {
        let h = self.step();
        (1..self.q.len() - 1)
            .map(|i| (second_derivative(&self.q, i, h) - rhs(self.nodes[i], self.q[i])).abs())
            .collect()
    }

    /// Interpolated `(q, q')` anywhere in `[s_min, s_max]`, by quintic
    /// Hermite interpolation of `q, q', q'' = s q + 2 q³`.
    pub fn interp(&self, s: f64) -> Result<(f64, f64)> {
        if !(s >= self.s_min && s <= self.s_max) {
            return Err(Error::OutOfTable { s, lo: self.s_min, hi: self.s_max });
        }
        let h = self.step();
        let n = self.nodes.len() - 1;
        let i = (((s - self.s_min) / h).floor() as usize).min(n - 1);
        let (s0, s1) = (self.nodes[i], self.nodes[i + 1]);
        let (y0, y1) = (self.q[i], self.q[i + 1]);
        let (d0, d1) = (self.dq[i] * h, self.dq[i + 1] * h);
        let (a0, a1) = (rhs(s0, y0) * h * h, rhs(s1, y1) * h * h);
        let t = ((s - s0) / h).clamp(0.0, 1.0);
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t3 * t, t3 * t2);
        let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
        let h3 = 0.5 * (t3 - 2.0 * t4 + t5);
        let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        let h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        let q = h0 * y0 + h1 * d0 + h2 * a0 + h3 * a1 + h4 * d1 + h5 * y1;
        let g0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
        let g1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
        let g2 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
        let g3 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);
        let g4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
        let g5 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;
        let qp = (g0 * y0 + g1 * d0 + g2 * a0 + g3 * a1 + g4 * d1 + g5 * y1) / h;
        Ok((q, qp))
    }

    /// `q, q', p, b` at `s`, restricted to the guarded interior.
    pub fn eval(&self, s: f64) -> Result<AuxValues> {
        let (lo, hi) = (self.s_min + GUARD, self.s_max - GUARD);
        if !(s >= lo && s <= hi) {
            return Err(Error::OutOfTable { s, lo, hi });
        }
        let (q, qp) = self.interp(s)?;
        Ok(AuxValues::from_q(s, q, qp))
    }

    /// Node values as a `s,q,dq,p,b` table.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["s", "q", "dq", "p", "b"]);
        t.meta("s_min", self.s_min)
            .meta("s_max", self.s_max)
            .meta("intervals", self.nodes.len() - 1)
            .meta("residual", crate::csv::fmt_num(self.residual));
        for i in 0..self.nodes.len() {
            let a = AuxValues::from_q(self.nodes[i], self.q[i], self.dq[i]);
            t.push(vec![a.s, a.q, a.qp, a.p, a.b]);
        }
        t
    }
}
