use kdv_edge::hopf::solve;
use kdv_edge::kdvsim::{invariants_of, simulate, simulate_values, Field, SimConfig};
use kdv_edge::profile::{Profile, Sech2};

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn conserved_quantities() {
    let cfg = SimConfig::new(0.05, 8192, 0.4);
    let fields = simulate(&Sech2, &cfg, &[0.0, 0.1, 0.2, 0.3, 0.4]).unwrap();
    let i0 = invariants_of(&fields[0]);
    let mut drift = [0.0f64; 3];
    for f in &fields[1..] {
        let i = invariants_of(f);
        drift[0] = drift[0].max(((i.mass - i0.mass) / i0.mass).abs());
        drift[1] = drift[1].max(((i.momentum - i0.momentum) / i0.momentum).abs());
        drift[2] = drift[2].max(((i.hamiltonian - i0.hamiltonian) / i0.hamiltonian).abs());
    }
    println!("drift {drift:?}");
    assert!(drift[0] <= 1e-12);
    assert!(drift[1] <= 1e-6);
    assert!(drift[2] <= 1e-5);
}

fn run(eps: f64, n: usize, dt: f64, t: f64) -> Field {
    let cfg = SimConfig { dt: Some(dt), ..SimConfig::new(eps, n, t) };
    simulate(&Sech2, &cfg, &[t]).unwrap().remove(0)
}

#[test]
fn fourth_order_in_time() {
    let (eps, n, t) = (0.05, 2048, 0.2);
    let r = run(eps, n, 2.5e-4, t);
    let a = run(eps, n, 2e-3, t);
    let b = run(eps, n, 1e-3, t);
    let ea = sup_diff(&a.values, &r.values);
    let eb = sup_diff(&b.values, &r.values);
    println!("order ratio {} ({ea:e}, {eb:e})", ea / eb);
    assert!((12.0..=20.0).contains(&(ea / eb)));
}

#[test]
fn hopf_regime_error_is_second_order() {
    let t = 0.1;
    let mut errs = Vec::new();
    for eps in [0.05, 0.025] {
        let cfg = SimConfig::new(eps, 4096, t);
        let f = simulate(&Sech2, &cfg, &[t]).unwrap().remove(0);
        let mut worst: f64 = 0.0;
        for (i, &u) in f.values.iter().enumerate() {
            let x = f.x(i);
            let h = solve(&Sech2, x, t).unwrap().u;
            worst = worst.max((u - h).abs());
        }
        errs.push(worst);
    }
    println!("hopf errs {errs:?} ratio {}", errs[0] / errs[1]);
    assert!((3.0..=5.0).contains(&(errs[0] / errs[1])));
}

#[test]
fn translation_equivariance() {
    // L = 32, N = 4096: Δx = 1/64, so a unit shift is 64 cells
    let n = 4096;
    let base = SimConfig { half_width: 32.0, dt: Some(5e-4), ..SimConfig::new(0.1, n, 0.2) };
    let u0: Vec<f64> = (0..n).map(|i| Sech2.u0(-32.0 + i as f64 / 64.0)).collect();
    let shifted: Vec<f64> = (0..n).map(|i| Sech2.u0(-32.0 + i as f64 / 64.0 - 1.0)).collect();
    let a = simulate_values(&base, &u0, &[0.2]).unwrap().remove(0);
    let b = simulate_values(&base, &shifted, &[0.2]).unwrap().remove(0);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        worst = worst.max((b.values[(i + 64) % n] - a.values[i]).abs());
    }
    assert!(worst <= 1e-10, "{worst}");
}

#[test]
fn spectral_convergence_in_space() {
    let (eps, t, dt) = (0.05, 0.2, 1e-4);
    let coarse = run(eps, 8192, dt, t);
    let fine = run(eps, 16384, dt, t);
    let common: Vec<f64> = (0..8192).map(|i| fine.values[2 * i]).collect();
    let d = sup_diff(&coarse.values, &common);
    println!("spatial {d:e}");
    assert!(d <= 1e-9);
}

#[test]
fn boundary_stays_quiet() {
    // with the automatic step (5e-4 here) the far field carries a temporal
    // error of about 1e-8; at 1e-4 it is near 1e-12
    let cfg = SimConfig { dt: Some(1e-4), ..SimConfig::new(0.05, 8192, 0.4) };
    for f in simulate(&Sech2, &cfg, &[0.2, 0.4]).unwrap() {
        let left = f.values[0].abs();
        let right = f.sample(&[cfg.half_width])[0].abs();
        assert!(left <= 1e-8 && right <= 1e-8, "t={}: {left:e} {right:e}", f.t);
    }
}
