//! Two-term asymptotic expansion of the KdV solution at the leading edge.
//!
//! With `s̃ = -(x - x⁻)/(c^{1/3} √(u-v) ε^{2/3})` and the Hastings–McLeod
//! function `q`,
//!
//! ```text
//! u(x,t,ε) ≈ u - 4 ε^{1/3} c^{-1/3} q(s̃) cos(Θ/ε + ε^{1/3} Θ₁)
//!              + (x - x⁻)/(6t + f_L'(u))
//!              - 4 ε^{2/3} c^{-2/3} (u-v)^{-1} q(s̃)² sin²(Θ/ε),
//! Θ(x,t) = 2√(u-v)(x - x⁻) + 2 ∫_v^u (f_L'(ξ) + 6t) √(ξ-v) dξ.
//! ```

use crate::csv::Table;
use crate::edge::EdgeState;
use crate::error::{Error, Result};
use crate::painleve2::HmTable;
use crate::profile::Profile;
use crate::quadrature::{integrate, DEFAULT_TOL};

/// Default half-width of the evaluation window in units of `ε^{2/3}`.
pub const DEFAULT_WINDOW: f64 = 8.0;

/// Expansion value split into its terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionTerms {
    pub x: f64,
    pub u_bg: f64,
    pub osc1: f64,
    pub taylor: f64,
    pub osc2: f64,
    pub total: f64,
    pub s_tilde: f64,
    pub theta_big: f64,
    pub theta1: f64,
    /// `Θ/ε + ε^{1/3} Θ₁`
    pub phase: f64,
}

/// `s̃(x) = -(x - x⁻)/(c^{1/3} √(u-v) ε^{2/3})`.
pub fn s_tilde(e: &EdgeState, x: f64, eps: f64) -> f64 {
    -(x - e.x_minus) / (e.c.cbrt() * (e.u - e.v).sqrt() * eps.powf(2.0 / 3.0))
}

/// `2 ∫_v^u (f_L'(ξ) + 6t) √(ξ-v) dξ`, the `x`-independent part of `Θ`.
fn phase_offset(p: &dyn Profile, e: &EdgeState) -> f64 {
    let d = e.u - e.v;
    4.0 * d.powf(1.5)
        * integrate(|s| (p.f_left_deriv(1, e.v + d * s * s) + 6.0 * e.t) * s * s, 0.0, 1.0, DEFAULT_TOL)
}

/// `Θ(x, t)`.
pub fn big_theta(p: &dyn Profile, e: &EdgeState, x: f64) -> f64 {
    2.0 * (e.u - e.v).sqrt() * (x - e.x_minus) + phase_offset(p, e)
}

/// Expansion at a fixed edge state, table and `ε`, with the constant part
/// of the phase computed once.
#[derive(Debug, Clone)]
pub struct Expansion<'a> {
    pub edge: EdgeState,
    pub eps: f64,
    hm: &'a HmTable,
    offset: f64,
}

impl<'a> Expansion<'a> {
    pub fn new(p: &dyn Profile, edge: &EdgeState, hm: &'a HmTable, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::OutOfDomain { name: "eps", value: eps, domain: "eps > 0" });
        }
        Ok(Expansion { edge: *edge, eps, hm, offset: phase_offset(p, edge) })
    }

    pub fn s_tilde(&self, x: f64) -> f64 {
        s_tilde(&self.edge, x, self.eps)
    }

    pub fn big_theta(&self, x: f64) -> f64 {
        2.0 * (self.edge.u - self.edge.v).sqrt() * (x - self.edge.x_minus) + self.offset
    }

    /// `x = x⁻ + X ε^{2/3}`.
    pub fn x_of(&self, big_x: f64) -> f64 {
        self.edge.x_minus + big_x * self.eps.powf(2.0 / 3.0)
    }

    /// `(q, q', p)` at `s̃(x)`, with `q > 0` enforced.
    fn painleve(&self, s: f64) -> Result<(f64, f64, f64)> {
        let a = self.hm.eval(s)?;
        if !(a.q > 0.0) {
            return Err(Error::QNonPositive { s, q: a.q });
        }
        Ok((a.q, a.qp, a.p))
    }

    /// `Θ₁(x, t, ε)`.
    pub fn theta1(&self, x: f64) -> Result<f64> {
        let s = self.s_tilde(x);
        let (q, qp, p) = self.painleve(s)?;
        Ok(theta1_from(&self.edge, s, q, qp, p))
    }

    /// All terms of the expansion at `x`.
    pub fn terms(&self, x: f64) -> Result<ExpansionTerms> {
        let e = &self.edge;
        let s = self.s_tilde(x);
        let (q, qp, p) = self.painleve(s)?;
        let theta1 = theta1_from(e, s, q, qp, p);
        let theta_big = self.big_theta(x);
        let phase = theta_big / self.eps + self.eps.cbrt() * theta1;
        let osc1 = -4.0 * self.eps.cbrt() / e.c.cbrt() * q * phase.cos();
        let taylor = (x - e.x_minus) / (6.0 * e.t + e.fl_prime_u);
        let sin = (theta_big / self.eps).sin();
        let osc2 = -4.0 * self.eps.powf(2.0 / 3.0) / (e.c.powf(2.0 / 3.0) * (e.u - e.v)) * q * q * sin * sin;
        Ok(ExpansionTerms {
            x,
            u_bg: e.u,
            osc1,
            taylor,
            osc2,
            total: e.u + osc1 + taylor + osc2,
            s_tilde: s,
            theta_big,
            theta1,
            phase,
        })
    }

    /// Terms on `n` equispaced points of `X` in `[x_lo, x_hi]`.
    pub fn grid(&self, x_lo: f64, x_hi: f64, n: usize) -> Result<Vec<ExpansionTerms>> {
        (0..n)
            .map(|i| {
                let big_x = if n == 1 { x_lo } else { x_lo + (x_hi - x_lo) * i as f64 / (n - 1) as f64 };
                self.terms(self.x_of(big_x))
            })
            .collect()
    }

    /// `x,X,s_tilde,total,u_bg,osc1,taylor,osc2,theta_over_eps,theta1`.
    pub fn table(&self, terms: &[ExpansionTerms]) -> Table {
        let mut t = Table::new(&[
            "x",
            "X",
            "s_tilde",
            "total",
            "u_bg",
            "osc1",
            "taylor",
            "osc2",
            "theta_over_eps",
            "theta1",
        ]);
        let scale = self.eps.powf(2.0 / 3.0);
        for r in terms {
            t.push(vec![
                r.x,
                (r.x - self.edge.x_minus) / scale,
                r.s_tilde,
                r.total,
                r.u_bg,
                r.osc1,
                r.taylor,
                r.osc2,
                r.theta_big / self.eps,
                r.theta1,
            ]);
        }
        t
    }
}

/// `Θ₁` from the edge data and Painlevé values at `s`.
pub fn theta1_from(e: &EdgeState, s: f64, q: f64, qp: f64, p: f64) -> f64 {
    let d = e.u - e.v;
    let ratio = e.theta_v3 / e.theta_v2;
    let log_q = qp / q;
    let constant = (log_q + p) * ratio / 6.0 - (5.0 * p + log_q) / (4.0 * d);
    let quadratic = s * s / 4.0 * (ratio / 3.0 - 3.0 / (2.0 * d) + 2.0 * e.c * d.sqrt() / (6.0 * e.t + e.fl_prime_u));
    (constant + quadratic) / e.c.cbrt()
}

/// `Θ₁(x, t, ε)`, one-shot.
pub fn theta1(p: &dyn Profile, e: &EdgeState, hm: &HmTable, x: f64, eps: f64) -> Result<f64> {
    Expansion::new(p, e, hm, eps)?.theta1(x)
}

/// Expansion terms at one point, one-shot.
pub fn expand(p: &dyn Profile, e: &EdgeState, hm: &HmTable, x: f64, eps: f64) -> Result<ExpansionTerms> {
    Expansion::new(p, e, hm, eps)?.terms(x)
}
