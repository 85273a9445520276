use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use zetaflow::dirichlet::{
    l_eval, prime_characters, principal_character, validate_character, LFunctionHandle,
};
use zetaflow::flow_pde::{heat_semigroup, InitialDatum};
use zetaflow::special::hermite::exp_ratio_deriv;
use zetaflow::special::{
    bound_constants, e_r, hermite_d, hermite_h, hermite_h_deriv, hurwitz_zeta, hurwitz_zeta_deriv,
    hurwitz_zeta_via, riemann_zeta, EvalConfig, EvalPath,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decomposition_reassembles(re in -6.0..6.0f64, im in -20.0..20.0f64, alpha in 0.1..=1.0f64) {
        prop_assume!((re - 1.0).abs() + im.abs() > 0.1);
        let cfg = EvalConfig::default();
        let s = c(re, im);
        let parts = 1.0 / (s - 1.0) + hermite_d(s, alpha).unwrap() + hermite_h(s, alpha, &cfg).unwrap();
        let z = hurwitz_zeta(s, alpha, &cfg).unwrap();
        prop_assert!(rel(parts, z) < 1e-8, "{parts} vs {z}");
    }

    #[test]
    fn derivative_matches_central_difference(re in -4.0..5.0f64, im in -15.0..15.0f64, alpha in 0.2..=1.0f64) {
        prop_assume!((re - 1.0).abs() + im.abs() > 0.3);
        let cfg = EvalConfig::default();
        let s = c(re, im);
        let h = 1e-4;
        let fd = (hurwitz_zeta(s + h, alpha, &cfg).unwrap() - hurwitz_zeta(s - h, alpha, &cfg).unwrap()) / (2.0 * h);
        let d = hurwitz_zeta_deriv(s, alpha, &cfg).unwrap();
        prop_assert!(rel(fd, d) < 1e-6, "{fd} vs {d}");
    }

    #[test]
    fn conjugate_symmetry(re in -8.0..10.0f64, im in 0.1..30.0f64, alpha in 0.05..=1.0f64) {
        let cfg = EvalConfig::default();
        let a = hurwitz_zeta(c(re, im), alpha, &cfg).unwrap();
        let b = hurwitz_zeta(c(re, -im), alpha, &cfg).unwrap();
        prop_assert!(rel(a.conj(), b) < 1e-12);
    }

    #[test]
    fn both_paths_agree(re in -5.0..7.0f64, im in -20.0..20.0f64, alpha in 0.1..=1.0f64) {
        prop_assume!((re - 1.0).abs() + im.abs() > 0.1);
        let cfg = EvalConfig::default();
        let s = c(re, im);
        let h = hurwitz_zeta_via(s, alpha, &cfg, EvalPath::Hermite);
        let e = hurwitz_zeta_via(s, alpha, &cfg, EvalPath::EulerMaclaurin).unwrap();
        if let Ok(h) = h {
            prop_assert!(rel(h.value, e.value) < 1e-8, "{} vs {}", h.value, e.value);
        }
    }

    #[test]
    fn h_and_its_derivative_are_dominated(x in -1.0..1.0f64, y in -1.0..1.0f64, alpha in 0.2..=1.0f64, beta in 0.5..3.0f64) {
        let cfg = EvalConfig::default();
        let s = c(x * beta, y * beta);
        let b = bound_constants(alpha, beta).unwrap();
        prop_assert!(hermite_h(s, alpha, &cfg).unwrap().norm() <= b.h1);
        prop_assert!(hermite_h_deriv(s, alpha, &cfg).unwrap().norm() <= b.h2);
    }

    #[test]
    fn exp_ratio_slope_on_square_boundary(r in 0.05..4.0f64, u in 0.0..4.0f64) {
        let side = (u.floor() as i32).min(3);
        let t = -r + 2.0 * r * u.fract();
        let z = match side {
            0 => c(t, -r),
            1 => c(r, t),
            2 => c(-t, r),
            _ => c(-r, -t),
        };
        prop_assert!(exp_ratio_deriv(z).norm() <= e_r(r).unwrap());
    }

    #[test]
    fn principal_l_has_euler_factor(re in -3.0..6.0f64, im in -20.0..20.0f64, pi in 0usize..4) {
        prop_assume!((re - 1.0).abs() + im.abs() > 0.1);
        let p = [2usize, 3, 5, 7][pi];
        let cfg = EvalConfig::default();
        let s = c(re, im);
        let l = LFunctionHandle::new(principal_character(p), cfg).unwrap();
        let want = (1.0 - (-s * (p as f64).ln()).exp()) * riemann_zeta(s, &cfg).unwrap();
        prop_assert!(rel(l_eval(&l, s).unwrap(), want) < 1e-8);
    }

    #[test]
    fn l_matches_dirichlet_series(re in 3.0..8.0f64, im in -10.0..10.0f64, j in 0usize..6) {
        let chi = prime_characters(7).unwrap().swap_remove(j);
        let s = c(re, im);
        let series: Complex64 = (1..20000i64).map(|n| chi.at(n) * (-s * (n as f64).ln()).exp()).sum();
        let l = LFunctionHandle::new(chi, EvalConfig::default()).unwrap();
        prop_assert!(rel(l_eval(&l, s).unwrap(), series) < 1e-9);
    }

    #[test]
    fn perturbed_characters_are_rejected(r in 2usize..5, eps in 1e-6..0.5f64) {
        let mut values = principal_character(5).values().to_vec();
        values[r - 1] = Complex64::from_polar(1.0, eps);
        prop_assert!(validate_character(5, values).is_err());
    }

    #[test]
    fn heat_semigroup_composes(t1 in 0.0..2.0f64, t2 in 0.0..2.0f64, seed in 0u64..1000) {
        let f = InitialDatum::DiscRandom { center: [0.3, -1.0], radius: 1.0, seed, modes: 6, fraction: 0.9, real: false }
            .build(vec![32], 2.0 * PI)
            .unwrap();
        let a = heat_semigroup(&heat_semigroup(&f, t1).unwrap(), t2).unwrap();
        let b = heat_semigroup(&f, t1 + t2).unwrap();
        prop_assert!(a.sup_difference(&b) < 1e-14);
        prop_assert!((b.mean() - f.mean()).norm() < 1e-14);
    }
}

#[test]
fn cancellation_fallback_stays_accurate() {
    let cfg = EvalConfig::default();
    let s = c(-9.5, 18.0);
    let a = hurwitz_zeta(s, 0.5, &cfg).unwrap();
    let b = hurwitz_zeta_via(s, 0.5, &cfg, EvalPath::EulerMaclaurin)
        .unwrap()
        .value;
    assert!(rel(a, b) < 1e-7);
}
