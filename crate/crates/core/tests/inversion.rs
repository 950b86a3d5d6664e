use drawstring_core::inversion::{build_inversion_curve, phi_delta, InversionCurve};
use drawstring_core::models::ModelMetric;
use proptest::prelude::*;

fn curve(delta: f64) -> InversionCurve {
    build_inversion_curve(delta, 1e-6, 400).unwrap()
}

#[test]
fn tilde_radius_is_increasing() {
    for delta in [0.0, 0.05, 1.0] {
        let c = curve(delta);
        assert!(c.r_tilde[0] > 0.0);
        assert!(c.r_tilde.windows(2).all(|w| w[1] > w[0]), "delta={delta}");
        assert!(c.f_vals.iter().all(|f| *f > 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn inverse_recovers_the_radius(log_r in -5.9f64..0.19, delta in prop::sample::select(vec![0.0, 0.05, 1.0])) {
        let c = curve(delta);
        let r = 10f64.powf(log_r);
        let back = c.radius_at(c.r_tilde_at(r).unwrap()).unwrap();
        prop_assert!((back - r).abs() <= 1e-9 * r, "r={r} back={back}");
    }
}

/// `e^{−2u}(dr̃² + f²dθ²) + e^{2u}dt²` in the `r` chart against the
/// conformal metric, factor by factor.
#[test]
fn drawstring_form_pulls_back_to_the_conformal_metric() {
    for delta in [0.0, 0.05, 1.0] {
        let c = curve(delta);
        let model = ModelMetric::conformal_inversion(delta).unwrap();
        for i in 0..100 {
            let r = 10f64.powf(-5.5 + 5.6 * i as f64 / 99.0);
            let h = 1e-4 * r;
            let dr_tilde = (c.r_tilde_at(r + h).unwrap() - c.r_tilde_at(r - h).unwrap()) / (2.0 * h);
            let phi = phi_delta(r, delta).unwrap();
            let u = -phi.ln();
            let f = phi * r.sin();
            let rebuilt = [(-u).exp() * dr_tilde, (-u).exp() * f, u.exp()];
            let expected = model.diagonal_factors([r, 0.5, 0.0]).unwrap();
            for k in 0..3 {
                let rel = (rebuilt[k] / expected[k] - 1.0).abs();
                assert!(rel <= 1e-8, "delta={delta} r={r} factor {k}: rel {rel:e}");
            }
        }
        // The tabulated f and u agree with the formula at the grid.
        for (k, &r) in c.r_grid.iter().enumerate() {
            let phi = phi_delta(r, delta).unwrap();
            assert!((c.u_vals[k] + phi.ln()).abs() <= 1e-15 * phi.ln().abs().max(1.0));
            assert!((c.f_vals[k] / (phi * r.sin()) - 1.0).abs() <= 1e-15);
        }
    }
}
