//! Fourier pseudospectral solver for `u_t + 6 u u_x + ε² u_xxx = 0` on a
//! periodic interval `[-L, L)`.
//!
//! In Fourier space `û_t = i ε² k³ û - 3 i k F(u²)`. The stiff linear part is
//! integrated exactly by ETDRK4 (Cox–Matthews with the Kassam–Trefethen
//! contour evaluation of the `φ`-functions); the quadratic term is
//! dealiased by the 2/3 rule.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::csv::Table;
use crate::edge::EdgeState;
use crate::error::{Error, Result};
use crate::profile::Profile;

/// Contour points for the ETD coefficients.
const CONTOUR_POINTS: usize = 32;

/// Tail band used by the resolution check: the top 10% of retained modes.
const TAIL_BAND: f64 = 0.1;

/// Largest admissible tail energy fraction.
pub const TAIL_LIMIT: f64 = 1e-8;

/// Default domain half-width.
pub const DEFAULT_HALF_WIDTH: f64 = 30.0;

/// Minimum domain half-width for sech²-type decay.
pub const MIN_HALF_WIDTH: f64 = 30.0;

/// Grid points per wavelength `πε/√(u-v)` required at the edge.
pub const POINTS_PER_WAVELENGTH: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub eps: f64,
    /// Half-width `L` of `[-L, L)`.
    pub half_width: f64,
    /// Grid size, a power of two.
    pub n: usize,
    /// Time step; `None` picks the automatic rule.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub dealias: bool,
}

impl SimConfig {
    pub fn new(eps: f64, n: usize, t_end: f64) -> Self {
        SimConfig { eps, half_width: DEFAULT_HALF_WIDTH, n, dt: None, t_end, dealias: true }
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.eps > 0.0) {
            return bad(format!("eps = {} must be positive", self.eps));
        }
        if self.n < 16 || !self.n.is_power_of_two() {
            return bad(format!("N = {} must be a power of two >= 16", self.n));
        }
        if !(self.half_width >= MIN_HALF_WIDTH) {
            return bad(format!("L = {} must be at least {MIN_HALF_WIDTH}", self.half_width));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return bad(format!("dt = {dt} must be positive"));
            }
        }
        if !(self.t_end >= 0.0) {
            return bad(format!("t_end = {} must be non-negative", self.t_end));
        }
        Ok(())
    }

    /// `Δx <= πε/(10 √(u-v))` at the given edge.
    pub fn check_resolution(&self, e: &EdgeState) -> Result<()> {
        let limit = target_dx(e, self.eps);
        if self.dx() > limit {
            return Err(Error::InvalidConfig(format!(
                "grid spacing {} exceeds {} (10 points per edge wavelength)",
                self.dx(),
                limit
            )));
        }
        Ok(())
    }

    /// `min(0.5 Δx / (6 max|u0|), 1e-4 ε/0.01)`.
    pub fn auto_dt(&self, max_abs_u0: f64) -> f64 {
        let cfl = if max_abs_u0 > 0.0 { 0.5 * self.dx() / (6.0 * max_abs_u0) } else { f64::INFINITY };
        cfl.min(1e-4 * self.eps / 0.01)
    }
}

/// Required grid spacing at the edge.
pub fn target_dx(e: &EdgeState, eps: f64) -> f64 {
    PI * eps / (e.u - e.v).sqrt() / POINTS_PER_WAVELENGTH
}

/// Smallest power-of-two grid (at least `min_n`) meeting the edge
/// resolution requirement on `[-L, L)`.
pub fn resolving_n(e: &EdgeState, eps: f64, half_width: f64, min_n: usize) -> usize {
    let limit = target_dx(e, eps);
    let mut n = min_n.next_power_of_two().max(16);
    while 2.0 * half_width / n as f64 > limit {
        n *= 2;
    }
    n
}

/// A snapshot of the solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub config: SimConfig,
    pub t: f64,
    pub values: Vec<f64>,
}

impl Field {
    pub fn x(&self, i: usize) -> f64 {
        -self.config.half_width + self.config.dx() * i as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.x(i)).collect()
    }

    /// Fourier coefficients `û_k / N` with wavenumbers, in FFT order.
    fn spectrum(&self) -> (Vec<Complex64>, Vec<f64>) {
        let n = self.values.len();
        let mut buf: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        (buf, wavenumbers(n, self.config.half_width))
    }

    /// Trigonometric interpolant at arbitrary points (exact band-limited
    /// evaluation; the Nyquist mode is dropped).
    pub fn sample(&self, xs: &[f64]) -> Vec<f64> {
        let (coef, k) = self.spectrum();
        let x0 = -self.config.half_width;
        let n = self.values.len();
        xs.iter()
            .map(|&x| {
                let y = x - x0;
                let mut acc = coef[0].re;
                for j in 1..n / 2 {
                    let (s, c) = (k[j] * y).sin_cos();
                    acc += 2.0 * (coef[j].re * c - coef[j].im * s);
                }
                acc
            })
            .collect()
    }

    /// Spectral derivative on the grid.
    pub fn derivative(&self) -> Vec<f64> {
        let (mut coef, k) = self.spectrum();
        let n = coef.len();
        for (c, &kk) in coef.iter_mut().zip(&k) {
            *c *= Complex64::new(0.0, kk) * n as f64;
        }
        FftPlanner::new().plan_fft_inverse(n).process(&mut coef);
        coef.iter().map(|c| c.re / n as f64).collect()
    }

    /// `x,u` table with `eps, t, N, L` metadata.
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["x", "u"]);
        t.meta("eps", self.config.eps)
            .meta("t", self.t)
            .meta("N", self.config.n)
            .meta("L", self.config.half_width);
        for (i, &u) in self.values.iter().enumerate() {
            t.push(vec![self.x(i), u]);
        }
        t
    }
}

/// Wavenumbers in FFT order with the Nyquist entry set to zero.
pub fn wavenumbers(n: usize, half_width: f64) -> Vec<f64> {
    let base = PI / half_width;
    (0..n)
        .map(|j| {
            if j < n / 2 {
                base * j as f64
            } else if j == n / 2 {
                0.0
            } else {
                base * (j as f64 - n as f64)
            }
        })
        .collect()
}

/// Mass `∫u`, momentum `∫u²`, energy `∫(u³ - ε² u_x²/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    pub mass: f64,
    pub momentum: f64,
    pub hamiltonian: f64,
}

pub fn invariants_of(f: &Field) -> Invariants {
    let dx = f.config.dx();
    let eps2 = f.config.eps * f.config.eps;
    let ux = f.derivative();
    let mass = dx * f.values.iter().sum::<f64>();
    let momentum = dx * f.values.iter().map(|u| u * u).sum::<f64>();
    let hamiltonian = dx
        * f.values
            .iter()
            .zip(&ux)
            .map(|(u, d)| u * u * u - 0.5 * eps2 * d * d)
            .sum::<f64>();
    Invariants { mass, momentum, hamiltonian }
}

/// ETDRK4 coefficient arrays for one step size.
struct Coefficients {
    e: Vec<Complex64>,
    e2: Vec<Complex64>,
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
}

impl Coefficients {
    fn new(linear: &[Complex64], h: f64) -> Self {
        let roots: Vec<Complex64> = (0..CONTOUR_POINTS)
            .map(|j| Complex64::from_polar(1.0, PI * (j as f64 + 0.5) / CONTOUR_POINTS as f64 * 2.0))
            .collect();
        let m = CONTOUR_POINTS as f64;
        let n = linear.len();
        let mut c = Coefficients {
            e: Vec::with_capacity(n),
            e2: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            f1: Vec::with_capacity(n),
            f2: Vec::with_capacity(n),
            f3: Vec::with_capacity(n),
        };
        for &l in linear {
            let lh = l * h;
            c.e.push(lh.exp());
            c.e2.push((lh / 2.0).exp());
            let (mut q, mut f1, mut f2, mut f3) = (Complex64::default(), Complex64::default(), Complex64::default(), Complex64::default());
            for &r in &roots {
                let z = lh + r;
                let ez = z.exp();
                let z3 = z * z * z;
                q += ((z / 2.0).exp() - 1.0) / z;
                f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
                f2 += (2.0 + z + ez * (z - 2.0)) / z3;
                f3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
            }
            c.q.push(q * h / m);
            c.f1.push(f1 * h / m);
            c.f2.push(f2 * h / m);
            c.f3.push(f3 * h / m);
        }
        c
    }
}

/// Time stepper state shared across steps.
struct Stepper {
    n: usize,
    linear: Vec<Complex64>,
    /// `-3ik` with the dealiasing mask applied.
    nonlinear: Vec<Complex64>,
    mask: Vec<bool>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    cache: HashMap<u64, Coefficients>,
    work: Vec<Complex64>,
}

impl Stepper {
    fn new(cfg: &SimConfig) -> Self {
        let n = cfg.n;
        let k = wavenumbers(n, cfg.half_width);
        let k_max = PI / cfg.dx();
        let mask: Vec<bool> = k.iter().map(|&kk| !cfg.dealias || kk.abs() <= 2.0 / 3.0 * k_max).collect();
        let eps2 = cfg.eps * cfg.eps;
        let linear = k.iter().map(|&kk| Complex64::new(0.0, eps2 * kk * kk * kk)).collect();
        let nonlinear = k
            .iter()
            .zip(&mask)
            .map(|(&kk, &keep)| if keep { Complex64::new(0.0, -3.0 * kk) } else { Complex64::default() })
            .collect();
        let mut planner = FftPlanner::new();
        Stepper {
            n,
            linear,
            nonlinear,
            mask,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            cache: HashMap::new(),
            work: vec![Complex64::default(); n],
        }
    }

    /// `N(v̂) = -3ik F(u²)` into `out`.
    fn nonlinear_term(&mut self, v: &[Complex64], out: &mut [Complex64]) {
        let scale = 1.0 / self.n as f64;
        self.work.copy_from_slice(v);
        self.inverse.process(&mut self.work);
        for w in self.work.iter_mut() {
            let u = w.re * scale;
            *w = Complex64::new(u * u, 0.0);
        }
        self.forward.process(&mut self.work);
        for ((o, w), c) in out.iter_mut().zip(&self.work).zip(&self.nonlinear) {
            *o = c * w;
        }
    }

    fn step(&mut self, v: &mut [Complex64], h: f64) {
        let key = h.to_bits();
        if !self.cache.contains_key(&key) {
            let c = Coefficients::new(&self.linear, h);
            self.cache.insert(key, c);
        }
        let c = self.cache.remove(&key).expect("cached");
        let n = self.n;
        let mut nv = vec![Complex64::default(); n];
        let mut na = vec![Complex64::default(); n];
        let mut nb = vec![Complex64::default(); n];
        let mut nc = vec![Complex64::default(); n];
        let mut a = vec![Complex64::default(); n];
        let mut b = vec![Complex64::default(); n];
        let mut cc = vec![Complex64::default(); n];
        self.nonlinear_term(v, &mut nv);
        for i in 0..n {
            a[i] = c.e2[i] * v[i] + c.q[i] * nv[i];
        }
        self.nonlinear_term(&a, &mut na);
        for i in 0..n {
            b[i] = c.e2[i] * v[i] + c.q[i] * na[i];
        }
        self.nonlinear_term(&b, &mut nb);
        for i in 0..n {
            cc[i] = c.e2[i] * a[i] + c.q[i] * (2.0 * nb[i] - nv[i]);
        }
        self.nonlinear_term(&cc, &mut nc);
        for i in 0..n {
            v[i] = c.e[i] * v[i] + nv[i] * c.f1[i] + 2.0 * (na[i] + nb[i]) * c.f2[i] + nc[i] * c.f3[i];
        }
        self.cache.insert(key, c);
    }

    fn to_physical(&self, v: &[Complex64]) -> Vec<f64> {
        let mut w = v.to_vec();
        self.inverse.process(&mut w);
        let scale = 1.0 / self.n as f64;
        w.iter().map(|c| c.re * scale).collect()
    }

    /// Energy fraction in the top band of retained modes.
    fn tail_fraction(&self, v: &[Complex64]) -> f64 {
        let k = wavenumbers(self.n, 1.0);
        let k_keep = k
            .iter()
            .zip(&self.mask)
            .filter(|(_, &m)| m)
            .fold(0.0f64, |a, (kk, _)| a.max(kk.abs()));
        let cut = (1.0 - TAIL_BAND) * k_keep;
        let mut total = 0.0;
        let mut tail = 0.0;
        for ((c, kk), &m) in v.iter().zip(&k).zip(&self.mask) {
            let e = c.norm_sqr();
            total += e;
            if m && kk.abs() > cut {
                tail += e;
            }
        }
        if total > 0.0 {
            tail / total
        } else {
            0.0
        }
    }
}

/// Evolves `values` (sampled on the grid of `cfg`) and returns snapshots at
/// the requested times (sorted, within `[0, t_end]`).
pub fn simulate_values(cfg: &SimConfig, values: &[f64], snapshot_times: &[f64]) -> Result<Vec<Field>> {
    cfg.validate()?;
    if values.len() != cfg.n {
        return Err(Error::InvalidConfig(format!("{} initial values for N = {}", values.len(), cfg.n)));
    }
    let mut times = snapshot_times.to_vec();
    for &t in &times {
        if !(t >= 0.0 && t <= cfg.t_end) {
            return Err(Error::InvalidConfig(format!("snapshot time {t} outside [0, {}]", cfg.t_end)));
        }
    }
    times.sort_by(f64::total_cmp);
    let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let dt = cfg.dt.unwrap_or_else(|| cfg.auto_dt(max_abs));

    let mut stepper = Stepper::new(cfg);
    let mut v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    stepper.forward.process(&mut v);
    for (c, &m) in v.iter_mut().zip(&stepper.mask) {
        if !m {
            *c = Complex64::default();
        }
    }
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in &times {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / dt).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            for _ in 0..steps {
                stepper.step(&mut v, h);
            }
            if v.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::Instability { t: target });
            }
        }
        t = target;
        let fraction = stepper.tail_fraction(&v);
        if fraction > TAIL_LIMIT {
            return Err(Error::UnderResolved { t, fraction, limit: TAIL_LIMIT });
        }
        let values = stepper.to_physical(&v);
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::Instability { t });
        }
        out.push(Field { config: *cfg, t, values });
    }
    Ok(out)
}

/// Samples the profile on the grid and evolves it.
pub fn simulate(p: &dyn Profile, cfg: &SimConfig, snapshot_times: &[f64]) -> Result<Vec<Field>> {
    let values: Vec<f64> = (0..cfg.n).map(|i| p.u0(-cfg.half_width + cfg.dx() * i as f64)).collect();
    simulate_values(cfg, &values, snapshot_times)
}

/// Snapshots as one CSV with a block per time, separated by blank lines
/// (gnuplot `index` layout).
pub fn snapshots_text(fields: &[Field]) -> String {
    fields.iter().map(|f| f.table().render()).collect::<Vec<_>>().join("\n\n")
}
