//! End-to-end checks of the edge expansion against direct simulation.

use std::path::Path;
use std::thread;

use crate::csv::Table;
use crate::edge::{EdgeSolver, EdgeState};
use crate::error::{Error, Result};
use crate::expansion::Expansion;
use crate::hopf::solve_left;
use crate::kdvsim::{resolving_n, simulate, Field, SimConfig, DEFAULT_HALF_WIDTH};
use crate::painleve2::HmTable;
use crate::profile::{catastrophe, Profile};

pub const DEFAULT_EPS: [f64; 3] = [0.08, 0.04, 0.02];
pub const DEFAULT_T: f64 = 0.3;
pub const DEFAULT_WINDOW_X: (f64, f64) = (-4.0, 4.0);

/// Sampling points per window in [`compare`].
pub const DENSE_POINTS: usize = 801;

/// Smallest grid used by [`compare`].
pub const MIN_GRID: usize = 4096;

/// Extra grid doublings tried when a run reports `UnderResolved`.
pub const MAX_REFINEMENTS: usize = 2;

/// Onset scan range `x⁻ ± ONSET_REACH ε^{2/3}`.
pub const ONSET_REACH: f64 = 20.0;

/// Onset scan step as a fraction of the edge wavelength.
const ONSET_STEPS_PER_WAVELENGTH: f64 = 40.0;

pub const FIGURE_EPS: f64 = 0.01;
pub const FIGURE_T: f64 = 0.4;
pub const FIGURE_N: usize = 32768;
pub const FIGURE_WINDOW: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub t: f64,
    pub eps_list: Vec<f64>,
    pub window_x: (f64, f64),
    pub grid_sizes: Vec<usize>,
    /// Sup-norm of simulated minus expansion over the window, per `ε`.
    pub sup_errors: Vec<f64>,
    /// Least-squares slope of `log E` against `log ε`.
    pub fitted_order: f64,
    /// Root-mean-square residual of that fit.
    pub fit_residual: f64,
    /// `|x_onset - x⁻|` per `ε`, `None` where no onset was found.
    pub onset_offsets: Vec<Option<f64>>,
}

impl ComparisonReport {
    /// `eps,N,sup_error,onset_offset` with the fit in the metadata.
    /// A missing onset is written as `NaN`.
    pub fn table(&self) -> Table {
        let mut table = Table::new(&["eps", "N", "sup_error", "onset_offset"]);
        table
            .meta("t", self.t)
            .meta("X_min", self.window_x.0)
            .meta("X_max", self.window_x.1)
            .meta("fitted_order", self.fitted_order)
            .meta("fit_residual", self.fit_residual);
        for i in 0..self.eps_list.len() {
            table.push(vec![
                self.eps_list[i],
                self.grid_sizes[i] as f64,
                self.sup_errors[i],
                self.onset_offsets[i].unwrap_or(f64::NAN),
            ]);
        }
        table
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.sup_errors.windows(2).all(|w| w[1] < w[0])
    }
}

/// Least-squares line through `(log x, log y)`: slope and RMS residual.
pub fn fit_power(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let ss: f64 = lx.iter().zip(&ly).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    (slope, (ss / n).sqrt())
}

/// Simulates to `t`, starting from the resolving grid and doubling on
/// `UnderResolved`.
pub fn simulate_resolved(p: &dyn Profile, e: &EdgeState, eps: f64, min_n: usize) -> Result<Field> {
    let mut n = resolving_n(e, eps, DEFAULT_HALF_WIDTH, min_n);
    let mut attempt = 0;
    loop {
        match simulate(p, &SimConfig::new(eps, n, e.t), &[e.t]) {
            Ok(mut fields) => return Ok(fields.remove(0)),
            Err(Error::UnderResolved { .. }) if attempt < MAX_REFINEMENTS => {
                n *= 2;
                attempt += 1;
            }
            Err(err) => return Err(err),
        }
    }
}

/// Sup-norm of `field - expansion` on `points` equispaced `X` in the window.
pub fn window_error(field: &Field, ex: &Expansion, window_x: (f64, f64), points: usize) -> Result<f64> {
    let terms = ex.grid(window_x.0, window_x.1, points)?;
    let xs: Vec<f64> = terms.iter().map(|r| r.x).collect();
    let sim = field.sample(&xs);
    Ok(sim.iter().zip(&terms).fold(0.0, |m, (s, r)| m.max((s - r.total).abs())))
}

/// Simulates each `ε` (concurrently), measures the window error and the
/// onset offset, and fits the rate.
pub fn compare(
    p: &dyn Profile,
    e: &EdgeState,
    hm: &HmTable,
    eps_list: &[f64],
    window_x: (f64, f64),
) -> Result<ComparisonReport> {
    if eps_list.len() < 2 {
        return Err(Error::InvalidConfig("at least two eps values are needed for a fit".into()));
    }
    if eps_list.iter().any(|&x| !(x > 0.0)) || eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidConfig(format!("eps list {eps_list:?} must be positive and strictly decreasing")));
    }
    if !(window_x.0 < window_x.1) {
        return Err(Error::InvalidConfig(format!("window {window_x:?} is empty")));
    }
    let runs: Vec<Result<(usize, f64, Option<f64>)>> = thread::scope(|scope| {
        let handles: Vec<_> = eps_list
            .iter()
            .map(|&eps| {
                scope.spawn(move || {
                    let ex = Expansion::new(p, e, hm, eps)?;
                    let field = simulate_resolved(p, e, eps, MIN_GRID)?;
                    let err = window_error(&field, &ex, window_x, DENSE_POINTS)?;
                    let onset = match onset_detect(&field, p, e, hm) {
                        Ok(x) => Some((x - e.x_minus).abs()),
                        Err(Error::NoOnset) => None,
                        Err(other) => return Err(other),
                    };
                    Ok((field.config.n, err, onset))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("comparison worker panicked")).collect()
    });
    let mut grid_sizes = Vec::new();
    let mut sup_errors = Vec::new();
    let mut onset_offsets = Vec::new();
    for r in runs {
        let (n, err, onset) = r?;
        if !err.is_finite() {
            return Err(Error::Instability { t: e.t });
        }
        grid_sizes.push(n);
        sup_errors.push(err);
        onset_offsets.push(onset);
    }
    let (fitted_order, fit_residual) = fit_power(eps_list, &sup_errors);
    Ok(ComparisonReport {
        t: e.t,
        eps_list: eps_list.to_vec(),
        window_x,
        grid_sizes,
        sup_errors,
        fitted_order,
        fit_residual,
        onset_offsets,
    })
}

/// Amplitude threshold `4 ε^{1/3} c^{-1/3} q(2)`.
pub fn onset_threshold(e: &EdgeState, hm: &HmTable, eps: f64) -> Result<f64> {
    Ok(4.0 * eps.cbrt() / e.c.cbrt() * hm.eval(2.0)?.q)
}

/// Smallest `x` at which the simulated field departs from the left Hopf
/// branch by more than [`onset_threshold`], scanning rightwards from
/// `x⁻ - 20 ε^{2/3}`.
pub fn onset_detect(f: &Field, p: &dyn Profile, e: &EdgeState, hm: &HmTable) -> Result<f64> {
    if f.t <= catastrophe(p)?.t_c {
        return Err(Error::NoOnset);
    }
    if (f.t - e.t).abs() > 1e-12 * e.t.max(1.0) {
        return Err(Error::InvalidConfig(format!("field at t = {} but edge at t = {}", f.t, e.t)));
    }
    let eps = f.config.eps;
    let threshold = onset_threshold(e, hm, eps)?;
    let reach = ONSET_REACH * eps.powf(2.0 / 3.0);
    let step = std::f64::consts::PI * eps / (e.u - e.v).sqrt() / ONSET_STEPS_PER_WAVELENGTH;
    let count = (2.0 * reach / step).ceil() as usize + 1;
    let xs: Vec<f64> = (0..count).map(|i| e.x_minus - reach + step * i as f64).collect();
    let sim = f.sample(&xs);
    let mut prev: Option<(f64, f64)> = None;
    for (&x, &u) in xs.iter().zip(&sim) {
        let hopf = match solve_left(p, x, f.t) {
            Ok(h) => h.u,
            Err(_) => break,
        };
        let excess = (u - hopf).abs() - threshold;
        if excess > 0.0 {
            return Ok(match prev {
                Some((x0, d0)) => x0 + (x - x0) * d0 / (d0 - excess),
                None => x,
            });
        }
        prev = Some((x, excess));
    }
    Err(Error::NoOnset)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure1Options {
    pub eps: f64,
    pub t: f64,
    pub n: usize,
    /// Overlay window half-width in `X`.
    pub window: f64,
}

impl Default for Figure1Options {
    fn default() -> Self {
        Figure1Options { eps: FIGURE_EPS, t: FIGURE_T, n: FIGURE_N, window: FIGURE_WINDOW }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure1Summary {
    pub edge: EdgeState,
    pub eps: f64,
    pub n: usize,
    pub onset: f64,
    pub onset_offset: f64,
    /// `5 ε^{2/3}`
    pub onset_bound: f64,
    /// Sup of `|u_sim - u_hopf|` on grid points left of the overlay window.
    pub left_hopf_error: f64,
    /// Mean spacing of the oscillation minima in `X ∈ [-2, 2]`.
    pub wavelength: f64,
    /// `πε/√(u-v)`
    pub wavelength_predicted: f64,
}

impl Figure1Summary {
    pub fn wavelength_error(&self) -> f64 {
        (self.wavelength / self.wavelength_predicted - 1.0).abs()
    }

    /// One-row table of the diagnostics.
    pub fn table(&self) -> Table {
        let mut t = Table::new(&[
            "x_minus",
            "onset",
            "onset_offset",
            "onset_bound",
            "left_hopf_error",
            "wavelength",
            "wavelength_predicted",
        ]);
        t.meta("eps", self.eps).meta("t", self.edge.t).meta("N", self.n);
        t.push(vec![
            self.edge.x_minus,
            self.onset,
            self.onset_offset,
            self.onset_bound,
            self.left_hopf_error,
            self.wavelength,
            self.wavelength_predicted,
        ]);
        t
    }
}

pub struct Figure1 {
    pub summary: Figure1Summary,
    pub snapshot: Table,
    pub overlay: Table,
}

impl Figure1 {
    /// Writes `snapshot.csv`, `overlay.csv` and `summary.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("snapshot.csv"), self.snapshot.render())?;
        std::fs::write(dir.join("overlay.csv"), self.overlay.render())?;
        std::fs::write(dir.join("summary.csv"), self.summary.table().render())?;
        Ok(())
    }
}

/// Local minima of `y` (parabolically refined), as positions.
fn minima(xs: &[f64], y: &[f64]) -> Vec<f64> {
    let h = xs[1] - xs[0];
    (1..y.len() - 1)
        .filter(|&i| y[i] < y[i - 1] && y[i] <= y[i + 1])
        .map(|i| {
            let denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
            let shift = if denom > 0.0 { 0.5 * (y[i - 1] - y[i + 1]) / denom } else { 0.0 };
            xs[i] + shift * h
        })
        .collect()
}

/// The large-time snapshot with expansion overlay and diagnostics.
pub fn figure1(p: &dyn Profile, hm: &HmTable, opts: &Figure1Options) -> Result<Figure1> {
    let e = EdgeSolver::new(p)?.solve(opts.t)?;
    let cfg = SimConfig::new(opts.eps, opts.n, opts.t);
    cfg.check_resolution(&e)?;
    let field = simulate(p, &cfg, &[opts.t])?.remove(0);
    let ex = Expansion::new(p, &e, hm, opts.eps)?;
    let scale = opts.eps.powf(2.0 / 3.0);

    let onset = onset_detect(&field, p, &e, hm)?;

    let left_edge = ex.x_of(-opts.window);
    let mut left_hopf_error: f64 = 0.0;
    for (i, &u) in field.values.iter().enumerate() {
        let x = field.x(i);
        if x > left_edge {
            break;
        }
        left_hopf_error = left_hopf_error.max((u - solve_left(p, x, opts.t)?.u).abs());
    }

    let wavelength_predicted = std::f64::consts::PI * opts.eps / (e.u - e.v).sqrt();
    let terms = ex.grid(-opts.window, opts.window, (2.0 * opts.window * scale / wavelength_predicted * 40.0) as usize)?;
    let xs: Vec<f64> = terms.iter().map(|r| r.x).collect();
    let sim = field.sample(&xs);

    // oscillation about the local mean u + (x - x⁻) u_x
    let (near_x, near_y): (Vec<f64>, Vec<f64>) = terms
        .iter()
        .zip(&sim)
        .filter(|(r, _)| ((r.x - e.x_minus) / scale).abs() <= 2.0)
        .map(|(r, s)| (r.x, s - r.u_bg - r.taylor))
        .unzip();
    let mins = minima(&near_x, &near_y);
    let wavelength = if mins.len() >= 2 {
        (mins[mins.len() - 1] - mins[0]) / (mins.len() - 1) as f64
    } else {
        f64::NAN
    };

    let mut overlay = Table::new(&["x", "X", "u_sim", "u_expansion", "difference"]);
    overlay
        .meta("eps", opts.eps)
        .meta("t", opts.t)
        .meta("N", opts.n)
        .meta("x_minus", e.x_minus)
        .meta("u", e.u)
        .meta("v", e.v)
        .meta("c", e.c);
    for (r, &s) in terms.iter().zip(&sim) {
        overlay.push(vec![r.x, (r.x - e.x_minus) / scale, s, r.total, s - r.total]);
    }
    let mut snapshot = field.table();
    snapshot.meta("x_minus", e.x_minus);

    Ok(Figure1 {
        summary: Figure1Summary {
            edge: e,
            eps: opts.eps,
            n: opts.n,
            onset,
            onset_offset: (onset - e.x_minus).abs(),
            onset_bound: 5.0 * scale,
            left_hopf_error,
            wavelength,
            wavelength_predicted,
        },
        snapshot,
        overlay,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_exact_power() {
        let x = [0.08, 0.04, 0.02];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(0.9)).collect();
        let (slope, residual) = fit_power(&x, &y);
        assert!((slope - 0.9).abs() < 1e-12);
        assert!(residual < 1e-12);
    }

    #[test]
    fn fit_residual_sees_curvature() {
        let x = [0.08, 0.04, 0.02];
        let (_, residual) = fit_power(&x, &[1.0, 0.5, 0.4]);
        assert!(residual > 0.01);
    }

    #[test]
    fn minima_are_refined() {
        let xs: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (2.0 * x).cos()).collect();
        let m = minima(&xs, &ys);
        assert_eq!(m.len(), 3);
        for (k, x) in m.iter().enumerate() {
            let exact = std::f64::consts::PI * (k as f64 + 0.5);
            assert!((x - exact).abs() < 1e-3, "{x} {exact}");
        }
    }
}
