use std::sync::OnceLock;

use kdv_edge::edge::EdgeSolver;
use kdv_edge::harness::{compare, onset_detect, simulate_resolved, MIN_GRID};
use kdv_edge::kdvsim::{simulate, SimConfig};
use kdv_edge::painleve2::build_default;
use kdv_edge::profile::Sech2;
use kdv_edge::{EdgeState, Error, HmTable};

static P: Sech2 = Sech2;

fn setup() -> &'static (EdgeState, HmTable) {
    static S: OnceLock<(EdgeState, HmTable)> = OnceLock::new();
    S.get_or_init(|| (EdgeSolver::new(&P).unwrap().solve_unchecked(0.3).unwrap(), build_default().unwrap()))
}

#[test]
fn onset_localizes_and_scales() {
    let (e, hm) = setup();
    let offset = |eps: f64| {
        let f = simulate_resolved(&P, e, eps, MIN_GRID).unwrap();
        (onset_detect(&f, &P, e, hm).unwrap() - e.x_minus).abs()
    };
    let (a, b) = (offset(0.04), offset(0.02));
    assert!(b <= 5.0 * 0.02f64.powf(2.0 / 3.0), "{b}");
    assert!((1.4..=2.2).contains(&(a / b)), "{a} {b}");
}

#[test]
fn no_onset_before_catastrophe() {
    let (e, hm) = setup();
    let f = simulate(&P, &SimConfig::new(0.05, 4096, 0.2), &[0.2]).unwrap().remove(0);
    assert_eq!(onset_detect(&f, &P, e, hm), Err(Error::NoOnset));
}

#[test]
fn left_window_error_is_first_order() {
    let (e, hm) = setup();
    let r = compare(&P, e, hm, &[0.08, 0.04, 0.02], (-4.0, -2.0)).unwrap();
    assert!(r.strictly_decreasing(), "{r:?}");
    assert!((0.7..=1.3).contains(&r.fitted_order), "{r:?}");
    let again = compare(&P, e, hm, &[0.08, 0.04, 0.02], (-4.0, -2.0)).unwrap();
    assert_eq!(r, again);
}

#[test]
fn compare_validates_input() {
    let (e, hm) = setup();
    assert!(matches!(compare(&P, e, hm, &[0.02, 0.04], (-4.0, 4.0)), Err(Error::InvalidConfig(_))));
    assert!(matches!(compare(&P, e, hm, &[0.04], (-4.0, 4.0)), Err(Error::InvalidConfig(_))));
    assert!(matches!(compare(&P, e, hm, &[0.04, 0.02], (1.0, -1.0)), Err(Error::InvalidConfig(_))));
}
