#![allow(clippy::excessive_precision, clippy::inconsistent_digit_grouping)]

use nfbif::scalar::{
    f_eta, f_prime, g_eta, g_prime, g_second, h_eta, ln_f_eta, ln_one_minus_g, one_minus_g,
    EtaValue,
};
use proptest::prelude::*;

fn eta(v: f64) -> EtaValue {
    EtaValue::new(v).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// (η, f, g, h, 1 − g, g', g'') from 40-digit arithmetic.
const TABLE: [[f64; 7]; 6] = [
    [
        0.0,
        0.564_189_583_547_756_3,
        0.363_380_227_632_418_66,
        0.636_619_772_367_581_3,
        0.636_619_772_367_581_3,
        0.308_317_809_905_819_9,
        0.229_541_364_108_437_7,
    ],
    [
        0.5,
        0.288_978_181_372_631_37,
        0.544_005_040_008_501_8,
        0.850_484_050_677_813_9,
        0.455_994_959_991_498_2,
        0.405_128_974_259_951_34,
        0.118_831_514_743_448_01,
    ],
    [
        1.0,
        0.112_635_621_314_328_73,
        0.749_355_190_993_612_8,
        1.363_280_430_320_716,
        0.250_644_809_006_387_2,
        0.388_944_510_550_699_6,
        -0.201_837_092_613_945_9,
    ],
    [
        2.0,
        0.005_178_859_003_484_268,
        0.979_230_922_824_907,
        4.031_126_795_182_062,
        0.020_769_077_175_093_014,
        0.073_148_831_182_692_68,
        -0.212_759_744_229_077_9,
    ],
    [
        3.5,
        1.349_857_195_884_538_2e-6,
        0.999_990_550_995_984_6,
        12.250_014_173_504_201,
        9.449_004_015_420_666e-6,
        6.344_336_473_539_984e-5,
        -4.063_082_367_787_534e-4,
    ],
    [
        6.0,
        6.543_253_098_123_162e-17,
        0.999_999_999_999_999_2,
        36.0,
        7.851_903_717_747_795e-16,
        9.291_419_399_334_89e-15,
        -1.083_562_713_049_195_7e-13,
    ],
];

#[test]
fn kernels_match_high_precision_table() {
    for row in TABLE {
        let e = eta(row[0]);
        assert!(rel(f_eta(e), row[1]) < 1e-14, "f at {}", row[0]);
        assert!(rel(g_eta(e), row[2]) < 1e-15, "g at {}", row[0]);
        assert!(rel(h_eta(e), row[3]) < 1e-14, "h at {}", row[0]);
        assert!(rel(one_minus_g(e), row[4]) < 1e-13, "1-g at {}", row[0]);
        assert!(rel(g_prime(e), row[5]) < 1e-12, "g' at {}", row[0]);
        assert!(rel(g_second(e), row[6]) < 1e-11, "g'' at {}", row[0]);
    }
}

#[test]
fn log_forms_stay_finite_deep_in_the_tail() {
    assert!(rel(ln_f_eta(eta(50.0)), -2501.265_512_123_484_6) < 1e-14);
    assert!(rel(ln_one_minus_g(eta(50.0)), -2496.660_341_937_496_5) < 1e-14);
    assert!(rel(ln_f_eta(eta(30.0)), -901.265_512_123_484_6) < 1e-14);
    assert_eq!(f_eta(eta(30.0)), 0.0);
}

#[test]
fn values_at_zero() {
    let pi = std::f64::consts::PI;
    assert!((g_eta(eta(0.0)) - (1.0 - 2.0 / pi)).abs() < 1e-15);
    assert!((h_eta(eta(0.0)) - 2.0 / pi).abs() < 1e-15);
    assert!((f_eta(eta(0.0)) - 1.0 / pi.sqrt()).abs() < 1e-15);
}

#[test]
fn negative_or_nan_eta_is_rejected() {
    assert!(EtaValue::new(-1e-3).is_err());
    assert!(EtaValue::new(f64::NAN).is_err());
}

proptest! {
    #[test]
    fn g_in_unit_interval_and_h_above_half(e in 0.0f64..60.0) {
        let g = g_eta(eta(e));
        prop_assert!(g > 0.0 && g <= 1.0);
        prop_assert!(h_eta(eta(e)) > 0.5);
        prop_assert!(ln_one_minus_g(eta(e)).is_finite());
    }

    #[test]
    fn g_is_monotone(a in 0.0f64..8.0, d in 1e-3f64..2.0) {
        prop_assert!(g_eta(eta(a + d)) >= g_eta(eta(a)));
        prop_assert!(ln_one_minus_g(eta(a + d)) < ln_one_minus_g(eta(a)));
    }

    #[test]
    fn derivatives_match_central_differences(e in 0.05f64..5.0) {
        let h = 1e-5;
        let fd_f = (f_eta(eta(e + h)) - f_eta(eta(e - h))) / (2.0 * h);
        let fd_g = (g_eta(eta(e + h)) - g_eta(eta(e - h))) / (2.0 * h);
        let fd_g2 = (g_prime(eta(e + h)) - g_prime(eta(e - h))) / (2.0 * h);
        prop_assert!((fd_f - f_prime(eta(e))).abs() < 1e-8);
        prop_assert!((fd_g - g_prime(eta(e))).abs() < 1e-8);
        prop_assert!((fd_g2 - g_second(eta(e))).abs() < 1e-8);
    }

    #[test]
    fn algebraic_identities(e in 0.0f64..20.0) {
        let f = f_eta(eta(e));
        let g = g_eta(eta(e));
        let h = h_eta(eta(e));
        prop_assert!((g - (1.0 - 2.0 * f * (f + e))).abs() < 1e-15);
        prop_assert!((h - (f + e) * (2.0 * f + e)).abs() <= 1e-13 * h);
    }
}
