//! Frozen values from an independent 40-digit evaluation.

use num_complex::Complex64;
use zetaflow::dirichlet::{l_eval, prime_characters, LFunctionHandle};
use zetaflow::special::{
    hurwitz_zeta, hurwitz_zeta_deriv, riemann_zeta, riemann_zeta_deriv, EvalConfig,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn close(got: Complex64, want: Complex64, rel: f64) -> bool {
    (got - want).norm() <= rel * want.norm().max(1.0)
}

const ZETA: [(f64, f64, f64, f64, f64, f64); 9] = [
    (2.0, 0.0, 1.6449340668482264, 0.0, -0.9375482543158438, 0.0),
    (
        0.5,
        14.134725141734693,
        1.166748873893282e-16,
        -7.32888188372844e-16,
        0.7832965118670308,
        0.12469982974817166,
    ),
    (
        -3.5,
        2.0,
        -0.0035609799649190723,
        0.04262253731477641,
        0.04448366405935279,
        0.018438093142976054,
    ),
    (
        3.0,
        -7.0,
        1.0142003689711159,
        -0.09612539585802243,
        -0.007340812424391529,
        0.05813690743083069,
    ),
    (
        0.25,
        40.0,
        0.7344057041679518,
        -1.5656813889303969,
        0.30321399160920764,
        2.6118875624984073,
    ),
    (
        -10.5,
        4.0,
        -2.0693318028836574,
        -0.06244968423568041,
        1.212005882160422,
        2.5678878857263063,
    ),
    (
        1.5,
        100.0,
        1.310259881673752,
        -0.0672663352216532,
        -0.3614768237462756,
        0.020658697215579953,
    ),
    (
        12.0,
        3.0,
        0.9998792150494902,
        -0.00021288940914150243,
        8.449650893973977e-05,
        0.00014740717025040243,
    ),
    (
        -0.5,
        0.5,
        -0.14075746062427946,
        -0.15807638184744655,
        -0.2356381521669733,
        -0.24187860940859524,
    ),
];

const HURWITZ: [(f64, f64, f64, f64, f64, f64, f64); 6] = [
    (
        2.0,
        0.0,
        0.5,
        4.934802200544679,
        0.0,
        1.7480808796238798,
        0.0,
    ),
    (
        0.5,
        10.0,
        0.3,
        0.7612539423562911,
        -1.7863229648761985,
        2.0925131251598423,
        -0.6665919042231636,
    ),
    (
        -2.5,
        1.0,
        0.75,
        0.0012821949237018728,
        0.02043287371414329,
        0.02624074204614811,
        0.014500784250977979,
    ),
    (
        3.0,
        3.0,
        0.1,
        811.8406266432085,
        584.4806225787776,
        1867.898109238647,
        1346.4772112191413,
    ),
    (
        -1.0,
        0.0,
        0.9,
        -0.038333333333333344,
        0.0,
        -0.1216981198665003,
        0.0,
    ),
    (
        4.5,
        -2.0,
        0.05,
        685311.1988167492,
        205790.43798275373,
        2053006.4526215682,
        616492.6513090583,
    ),
];

#[test]
fn riemann_zeta_values_and_derivatives() {
    let cfg = EvalConfig::default();
    for (re, im, vr, vi, dr, di) in ZETA {
        let s = c(re, im);
        let v = riemann_zeta(s, &cfg).unwrap();
        let d = riemann_zeta_deriv(s, &cfg).unwrap();
        assert!(close(v, c(vr, vi), 1e-10), "zeta({s}) = {v}");
        assert!(close(d, c(dr, di), 1e-9), "zeta'({s}) = {d}");
    }
}

#[test]
fn hurwitz_values_and_derivatives() {
    let cfg = EvalConfig::default();
    for (re, im, a, vr, vi, dr, di) in HURWITZ {
        let s = c(re, im);
        let v = hurwitz_zeta(s, a, &cfg).unwrap();
        let d = hurwitz_zeta_deriv(s, a, &cfg).unwrap();
        assert!(close(v, c(vr, vi), 1e-10), "zeta({s}, {a}) = {v}");
        assert!(close(d, c(dr, di), 1e-9), "zeta'({s}, {a}) = {d}");
    }
}

#[test]
fn complex_character_mod_five() {
    let chi = prime_characters(5).unwrap().swap_remove(1);
    assert_eq!(chi.at(2), c(0.0, 1.0));
    let l = LFunctionHandle::new(chi, EvalConfig::default()).unwrap();
    let cases = [
        (2.0, 0.0, 0.9587161227168831, 0.1455658767850896),
        (0.5, 6.0, -0.05316904416813671, -0.21863611864075566),
        (-1.5, 2.0, -0.24600180439892336, 3.724474960898889),
        (1.0, 0.0, 0.86480626597721, 0.20415306613838516),
    ];
    for (re, im, vr, vi) in cases {
        let v = l_eval(&l, c(re, im)).unwrap();
        assert!(close(v, c(vr, vi), 1e-10), "L({re}+{im}i) = {v}");
    }
}

#[test]
fn trivial_zero_slopes() {
    let want = [
        -0.03044845705839327,
        0.007983811450268625,
        -0.005899759143515937,
        0.008316161985602248,
        -0.018929926338140373,
        0.063270583341463,
    ];
    let cfg = EvalConfig::default();
    for (k, w) in want.iter().enumerate() {
        let d = riemann_zeta_deriv(c(-2.0 * (k + 1) as f64, 0.0), &cfg).unwrap();
        assert!(
            (d.re - w).abs() < 1e-10 * w.abs().max(1.0),
            "k = {}: {d}",
            k + 1
        );
    }
}
