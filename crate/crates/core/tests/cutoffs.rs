use drawstring_core::cutoffs::{make_cutoff, CutoffFn, CutoffKind, Smoothness};
use proptest::prelude::*;

fn all_cutoffs() -> [CutoffFn; 4] {
    [
        make_cutoff(CutoffKind::RisingZeta, Smoothness::C2PiecewiseQuadratic),
        make_cutoff(CutoffKind::FallingEta, Smoothness::C2PiecewiseQuadratic),
        make_cutoff(CutoffKind::RisingZeta, Smoothness::MollifiedSmooth),
        make_cutoff(CutoffKind::FallingEta, Smoothness::MollifiedSmooth),
    ]
}

fn near_breakpoint(f: &CutoffFn, t: f64, h: f64) -> bool {
    f.breakpoints().iter().any(|b| (t - b).abs() <= 2.0 * h)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 2000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn values_and_derivatives_stay_in_bounds(t in -0.5f64..2.0) {
        for f in all_cutoffs() {
            let v = f.value(t);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!(f.d1(t).abs() <= f.slope_bound() + 1e-12);
            prop_assert!(f.d2(t).abs() <= f.curvature_bound() + 1e-9);
            let sign = if f.kind() == CutoffKind::RisingZeta { 1.0 } else { -1.0 };
            prop_assert!(sign * f.d1(t) >= -1e-15);
        }
    }

    #[test]
    fn rising_and_falling_are_complementary(t in -0.5f64..2.0) {
        for s in [Smoothness::C2PiecewiseQuadratic, Smoothness::MollifiedSmooth] {
            let z = make_cutoff(CutoffKind::RisingZeta, s);
            let e = make_cutoff(CutoffKind::FallingEta, s);
            prop_assert!((z.value(t) + e.value(t) - 1.0).abs() <= 1e-15);
            prop_assert!((z.d1(t) + e.d1(t)).abs() <= 1e-12);
        }
    }

    #[test]
    fn derivatives_match_difference_quotients(t in 0.3f64..1.2) {
        let h = 1e-6;
        for f in all_cutoffs() {
            if near_breakpoint(&f, t, h) {
                continue;
            }
            let d1 = (f.value(t + h) - f.value(t - h)) / (2.0 * h);
            prop_assert!((d1 - f.d1(t)).abs() <= 1e-6, "d1 at {t}: {d1} vs {}", f.d1(t));
            let d2 = (f.d1(t + h) - f.d1(t - h)) / (2.0 * h);
            prop_assert!((d2 - f.d2(t)).abs() <= 1e-5, "d2 at {t}: {d2} vs {}", f.d2(t));
        }
    }
}

#[test]
fn flat_outside_the_window() {
    for f in all_cutoffs() {
        for t in [-1.0, 0.0, 0.25, 0.5, 1.0, 1.5, 10.0] {
            assert_eq!(f.d1(t), 0.0, "{t}");
            assert_eq!(f.d2(t), 0.0, "{t}");
        }
        let rising = f.kind() == CutoffKind::RisingZeta;
        assert_eq!(f.value(0.5), if rising { 0.0 } else { 1.0 });
        assert_eq!(f.value(1.0), if rising { 1.0 } else { 0.0 });
    }
}

#[test]
fn quadratic_ramp_attains_its_bounds() {
    let z = CutoffFn::rising();
    assert!((z.d1(0.75) - 4.0).abs() < 1e-12);
    assert!((z.d2(0.6) - 16.0).abs() < 1e-12);
    assert!((z.d2(0.9) + 16.0).abs() < 1e-12);
    assert!((z.value(0.75) - 0.5).abs() < 1e-15);
}
