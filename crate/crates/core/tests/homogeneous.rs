use std::f64::consts::PI;

use nfbif::gain::GainFunction;
use nfbif::homogeneous::{
    asymptotic_limits, kappa_c, raw_g_over_volume, solve_rho_bar_inf, ModelParams,
};
use proptest::prelude::*;

mod common;
use common::{oracle_solve, smooth_gain};

const W0_RING: f64 = -20.758_077_226_736_8;

fn smooth(l: f64, d: usize, w0: f64) -> ModelParams {
    ModelParams::new(l, d, 3.0, 10.0, GainFunction::standard_smooth(), w0).unwrap()
}

fn relu(l: f64, d: usize, w0: f64) -> ModelParams {
    ModelParams::new(l, d, 3.0, 10.0, GainFunction::Relu, w0).unwrap()
}

fn relu_oracle(l: f64, d: usize, w0: f64, kappa: f64) -> f64 {
    oracle_solve(l, d, w0, kappa, |u| u.max(0.0))
}

#[test]
fn kappa_c_closed_form() {
    let p = smooth(1.0, 2, W0_RING);
    let expected = 2.0 * W0_RING * W0_RING / (PI * 9.0);
    assert!((kappa_c(&p) - expected).abs() < 1e-12 * expected);
    assert!((kappa_c(&p) - 30.479_782).abs() < 1e-5);
    let q = smooth(2.0, 1, -4.0);
    assert!((kappa_c(&q) - 2.0 * 16.0 / (4.0 * PI * 9.0)).abs() < 1e-14);
}

#[test]
fn closed_form_below_kappa_c() {
    for (l, d) in [(1.0, 2), (2.0, 1), (0.5, 3)] {
        let p = smooth(l, d, -40.0);
        let kc = kappa_c(&p);
        for i in 1..=10 {
            let kappa = kc * i as f64 / 10.0;
            let st = solve_rho_bar_inf(&p, kappa).unwrap();
            let exact = (2.0 / (kappa * PI)).sqrt() / p.volume();
            assert!(st.closed_form);
            assert!((st.rho_bar_inf - exact).abs() <= 1e-12 * exact);
            assert_eq!(st.phi0, 0.0);
        }
    }
}

#[test]
fn relu_solution_matches_quadrature_oracle() {
    for kappa in [35.0, 55.0, 120.0, 800.0] {
        let st = solve_rho_bar_inf(&relu(1.0, 2, W0_RING), kappa).unwrap();
        let oracle = relu_oracle(1.0, 2, W0_RING, kappa);
        assert!((st.rho_bar_inf - oracle).abs() < 1e-9, "kappa {kappa}");
    }
}

#[test]
fn frozen_smooth_gain_states() {
    let p = smooth(1.0, 2, W0_RING);
    let st = solve_rho_bar_inf(&p, 55.0).unwrap();
    let oracle = oracle_solve(1.0, 2, W0_RING, 55.0, smooth_gain);
    assert!(
        (st.rho_bar_inf - oracle).abs() < 1e-9,
        "{} {}",
        st.rho_bar_inf,
        oracle
    );
    assert!((st.rho_bar_inf - 0.139_183_668_5).abs() < 1e-9);
    assert!((st.phi0 - 0.073_731_042).abs() < 1e-8);
    let (rho_star, _) = asymptotic_limits(&p).unwrap();
    assert!((rho_star - 0.135_785_6).abs() < 1e-6);
}

#[test]
fn relu_large_kappa_limit() {
    for (l, d, w0) in [(1.0, 2, W0_RING), (2.0, 1, -7.0)] {
        let p = relu(l, d, w0);
        let st = solve_rho_bar_inf(&p, 1e6).unwrap();
        let ld = p.volume();
        let limit = 3.0 / (ld + w0.abs());
        assert!(
            (st.rho_bar_inf * ld - limit * ld).abs() < 1e-5,
            "L {l} d {d}"
        );
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(ModelParams::new(1.0, 2, 3.0, 10.0, GainFunction::Relu, 1.0).is_err());
    assert!(ModelParams::new(0.0, 2, 3.0, 10.0, GainFunction::Relu, -1.0).is_err());
    assert!(ModelParams::new(1.0, 2, -3.0, 10.0, GainFunction::Relu, -1.0).is_err());
    assert!(solve_rho_bar_inf(&relu(1.0, 2, -1.0), -1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fixed_point_residual_vanishes(kappa in 0.1f64..5e3, w0 in -60.0f64..-2.0) {
        for p in [smooth(1.0, 2, w0), relu(1.0, 2, w0)] {
            let st = solve_rho_bar_inf(&p, kappa).unwrap();
            prop_assert!(p.fixed_point_map(st.rho_bar_inf, kappa).abs() < 1e-13);
        }
    }

    #[test]
    fn rho_at_zero_identity(kappa in 0.1f64..5e3, w0 in -60.0f64..-2.0) {
        let p = smooth(1.0, 2, w0);
        let st = solve_rho_bar_inf(&p, kappa).unwrap();
        let rhs = (st.rho_bar_inf - st.phi0 / p.volume()) * kappa;
        prop_assert!((st.rho_inf_at_zero - rhs).abs() < 1e-11);
    }

    #[test]
    fn derivative_matches_central_difference(kappa in 0.2f64..2e3, w0 in -60.0f64..-2.0) {
        let p = smooth(1.0, 2, w0);
        let kc = kappa_c(&p);
        prop_assume!((kappa / kc - 1.0).abs() > 0.02);
        let h = 1e-4 * kappa;
        let up = solve_rho_bar_inf(&p, kappa + h).unwrap().rho_bar_inf;
        let dn = solve_rho_bar_inf(&p, kappa - h).unwrap().rho_bar_inf;
        let an = solve_rho_bar_inf(&p, kappa).unwrap().d_rho_bar_d_kappa;
        prop_assert!(((up - dn) / (2.0 * h) - an).abs() <= 1e-5 * an.abs() + 1e-13);
    }

    #[test]
    fn mean_decreases_in_kappa(kappa in 0.1f64..1e3, r in 1.001f64..2.0) {
        let p = smooth(1.0, 2, W0_RING);
        let a = solve_rho_bar_inf(&p, kappa).unwrap().rho_bar_inf;
        let b = solve_rho_bar_inf(&p, kappa * r).unwrap().rho_bar_inf;
        prop_assert!(b < a);
    }

    #[test]
    fn raw_and_stable_g_agree(kappa in 31.0f64..3e3) {
        let p = smooth(1.0, 2, W0_RING);
        let st = solve_rho_bar_inf(&p, kappa).unwrap();
        prop_assert!((raw_g_over_volume(&st, &p) - st.g).abs() < 1e-10);
    }
}
