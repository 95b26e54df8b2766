use std::f64::consts::PI;
use std::sync::OnceLock;

use kdv_edge::edge::{phi, tau, tau_closed_form_terms, upper_grid, verify_window, EdgeSolver};
use kdv_edge::expansion::big_theta;
use kdv_edge::hopf::{solve_left, x_slope};
use kdv_edge::profile::Sech2;
use kdv_edge::{EdgeState, Error};

static P: Sech2 = Sech2;

fn solver() -> &'static EdgeSolver<'static> {
    static S: OnceLock<EdgeSolver<'static>> = OnceLock::new();
    S.get_or_init(|| EdgeSolver::new(&P).unwrap())
}

fn state(t: f64) -> EdgeState {
    solver().solve_unchecked(t).unwrap()
}

// closed forms for u0 = -sech², f_L(λ) = -acosh((-λ)^{-1/2})
fn fl1(l: f64) -> f64 {
    1.0 / (2.0 * l * (1.0 + l).sqrt())
}

fn fl2(l: f64) -> f64 {
    -(2.0 + 3.0 * l) / (4.0 * l * l * (1.0 + l).powf(1.5))
}

/// Gauss–Legendre nodes on [0, 1] by Newton on `P_n`.
fn gauss(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    (p0, p1) = (p1, ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k);
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (0.5 * (1.0 - x), 1.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn residual2(g: &[(f64, f64)], t: f64, u: f64, v: f64) -> f64 {
    let (mut a, mut b) = (0.0, 0.0);
    for &(s, w) in g {
        let l = v + (u - v) * s * s;
        a += w * fl1(l);
        b += w * fl2(l) * (1.0 - s * s);
    }
    (6.0 * t + a).powi(2) + b * b
}

/// 400×400 grid search on the squared residual, zooming to ±3 cells.
fn grid_oracle(t: f64) -> (f64, f64) {
    let g = gauss(80);
    let u_c = -2.0 / 3.0;
    let (mut ulo, mut uhi, mut vlo, mut vhi) = (u_c + 1e-3, -1e-3, -0.999, u_c - 1e-3);
    let m = 400;
    while uhi - ulo > 1e-11 || vhi - vlo > 1e-11 {
        let (du, dv) = ((uhi - ulo) / m as f64, (vhi - vlo) / m as f64);
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..=m {
            let u = ulo + du * i as f64;
            for j in 0..=m {
                let v = vlo + dv * j as f64;
                let r = residual2(&g, t, u, v);
                if r < best.0 {
                    best = (r, u, v);
                }
            }
        }
        (ulo, uhi) = (best.1 - 3.0 * du, best.1 + 3.0 * du);
        (vlo, vhi) = (best.2 - 3.0 * dv, best.2 + 3.0 * dv);
    }
    (0.5 * (ulo + uhi), 0.5 * (vlo + vhi))
}

#[test]
fn newton_root_matches_grid_search() {
    for t in [0.3, 0.4] {
        let e = state(t);
        let (u, v) = grid_oracle(t);
        assert!((e.u - u).abs() <= 1e-8 && (e.v - v).abs() <= 1e-8, "t={t}: {e:?} vs ({u}, {v})");
        let r = e.residuals(&P).unwrap();
        assert!(r.iter().all(|x| x.abs() <= 1e-10), "{r:?}");
        assert!(e.c > 0.0);
    }
}

#[test]
fn confluence_near_catastrophe() {
    let cat = *solver().catastrophe();
    let dts = [1e-5, 1e-4, 1e-3];
    let mut logs = Vec::new();
    for dt in dts {
        let e = state(cat.t_c + dt);
        let ratio = (e.u - cat.u_c) / (cat.u_c - e.v);
        assert!((3.5..=4.5).contains(&ratio), "dt={dt}: ratio {ratio}");
        logs.push((dt.ln(), (e.u - cat.u_c).ln()));
    }
    let slope = (logs[2].1 - logs[0].1) / (logs[2].0 - logs[0].0);
    assert!((0.45..=0.55).contains(&slope), "{slope}");
}

#[test]
fn window_checks_reject_bad_times() {
    let s = solver();
    let t_c = s.catastrophe().t_c;
    assert!(matches!(s.solve(t_c - 0.01), Err(Error::BeforeCatastrophe { .. })));
    assert!(matches!(s.solve(t_c), Err(Error::BeforeCatastrophe { .. })));
    let t_max = s.t_max();
    assert!(t_max > 0.4);
    assert!(matches!(s.solve(t_max + 0.01), Err(Error::WindowExceeded { .. })));
}

#[test]
fn phi_has_degenerate_critical_point_at_v() {
    for t in [0.3, 0.4] {
        let e = state(t);
        let f = |l: f64| phi(&P, &e, l, e.x_minus).unwrap();
        // fourth-order stencils: the second-order ones carry c h²/6
        let h = 2e-3;
        let (m2, m1, z, p1, p2) = (f(e.v - 2.0 * h), f(e.v - h), f(e.v), f(e.v + h), f(e.v + 2.0 * h));
        let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
        let d2 = (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) / (12.0 * h * h);
        assert!(d1.abs() <= 1e-6 && d2.abs() <= 1e-6, "{d1:e} {d2:e}");
        let h = 2e-3;
        let d3 = (-f(e.v + 3.0 * h) + 8.0 * f(e.v + 2.0 * h) - 13.0 * f(e.v + h) + 13.0 * f(e.v - h)
            - 8.0 * f(e.v - 2.0 * h)
            + f(e.v - 3.0 * h))
            / (8.0 * h * h * h);
        assert!((d3 / e.c - 1.0).abs() <= 1e-5, "{d3} {}", e.c);
    }
}

#[test]
fn phi_matches_direct_quadrature() {
    let e = state(0.3);
    let g = gauss(200);
    for l in [-0.95, e.v, -0.4, e.u - 0.01] {
        // ∫_λ^u (f_L' + 6t) √(ξ-λ) dξ with ξ = λ + (u-λ)s²
        let d = e.u - l;
        let integral: f64 = g.iter().map(|&(s, w)| w * (fl1(l + d * s * s) + 6.0 * e.t) * s * s).sum::<f64>()
            * 2.0
            * d.powf(1.5);
        let x = e.x_minus + 0.3;
        let expected = d.sqrt() * 0.3 + integral;
        assert!((phi(&P, &e, l, x).unwrap() - expected).abs() < 1e-10);
    }
}

#[test]
fn big_theta_is_twice_phi_at_v() {
    let e = state(0.3);
    for i in 0..100 {
        let x = e.x_minus - 1.0 + 2.0 * i as f64 / 99.0;
        let a = big_theta(&P, &e, x);
        let b = 2.0 * phi(&P, &e, e.v, x).unwrap();
        assert!((a - b).abs() <= 1e-10, "x={x}: {a} {b}");
    }
}

#[test]
fn tau_against_midpoint_rule() {
    let l: f64 = -0.5;
    // f_L(λ), f_R(λ) = ∓acosh((-λ)^{-1/2})
    let b = (1.0 / (-l).sqrt()).acosh();
    let n = 1_000_000;
    let h = 2.0 * b / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        let x = -b + (i as f64 + 0.5) * h;
        let c = x.cosh();
        sum += (l + 1.0 / (c * c)).max(0.0).sqrt();
    }
    let got = tau(&P, l).unwrap();
    assert!((got - sum * h).abs() < 1e-7, "{got} {}", sum * h);
    // the whole well at λ -> 0: ∫ sech = π
    assert!((tau(&P, -1e-6).unwrap() - PI).abs() < 1e-2);
}

#[test]
fn admissibility_margins_are_positive() {
    let t_c = solver().catastrophe().t_c;
    for t in [t_c + 0.02, 0.3, 0.4] {
        let e = state(t);
        let r = verify_window(&P, &e).unwrap();
        assert!(r.all_positive(), "t={t}: {r:?}");
        assert!(r.form_discrepancy < 1e-9, "{r:?}");
    }
}

#[test]
fn closed_form_terms_are_nonpositive() {
    let e = state(0.3);
    let grid = upper_grid(&e);
    let stride = grid.len() / 100;
    for l in grid.iter().step_by(stride) {
        let terms = tau_closed_form_terms(&P, &e, *l).unwrap();
        assert!(terms.iter().all(|&x| x <= 0.0), "λ={l}: {terms:?}");
    }
}

#[test]
fn hopf_left_branch_meets_the_edge() {
    for t in [0.3, 0.4] {
        let e = state(t);
        let h = solve_left(&P, e.x_minus, t).unwrap();
        assert!((h.u - e.u).abs() < 1e-10, "{} {}", h.u, e.u);
        let slope = x_slope(&P, e.x_minus, t).unwrap();
        assert!((slope - 1.0 / (6.0 * t + e.fl_prime_u)).abs() < 1e-10);
    }
}
