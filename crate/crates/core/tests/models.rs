use std::f64::consts::{FRAC_PI_2, PI, TAU};

use drawstring_core::curvature::{fd_scalar, fd_scalar_richardson, prototype_scalar};
use drawstring_core::models::ModelMetric;
use drawstring_core::profile::{BoundaryFunction, DrawstringProfile, GeometryConstants, LogLogRadius};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn desk(consts: GeometryConstants, r1: f64) -> DrawstringProfile {
    let mut consts = consts;
    consts.tube_radius = consts.tube_radius.max(2.0 * r1);
    consts.estimate_radius = consts.estimate_radius.max(2.0 * r1);
    DrawstringProfile::normalized(
        consts,
        BoundaryFunction::constant(-1.0).unwrap(),
        0.01,
        r1,
        LogLogRadius::from_radius(r1 * 1e-3).unwrap(),
        0.25 * r1,
    )
    .unwrap()
}

fn models() -> Vec<(&'static str, ModelMetric, f64)> {
    let v0 = || BoundaryFunction::constant(-1.0).unwrap();
    let flat = DrawstringProfile::build(GeometryConstants::flat_torus(TAU), v0(), 0.01).unwrap();
    let sphere = DrawstringProfile::build(GeometryConstants::round_s3(), v0(), 0.01).unwrap();
    vec![
        ("flat baseline", ModelMetric::flat_baseline(), 2.0),
        ("round baseline", ModelMetric::RoundS3Baseline, FRAC_PI_2),
        ("flat drawstring", ModelMetric::flat_torus(flat, TAU).unwrap(), 2.0),
        ("round drawstring", ModelMetric::round_s3(sphere), FRAC_PI_2),
        (
            "flat desk",
            ModelMetric::flat_torus(desk(GeometryConstants::flat_torus(TAU), 0.2), TAU).unwrap(),
            2.0,
        ),
        ("round desk", ModelMetric::round_s3(desk(GeometryConstants::round_s3(), 0.2)), FRAC_PI_2),
        ("af", ModelMetric::af_cap(0.1).unwrap(), 5.0),
        ("inversion", ModelMetric::conformal_inversion(0.3).unwrap(), PI),
        ("prototype", ModelMetric::prototype(0.01, 0.1).unwrap(), 0.1),
    ]
}

#[test]
fn coefficient_matrices_are_symmetric_positive_definite() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (name, model, r_max) in models() {
        for _ in 0..10_000 {
            // Log-uniform radii reach the tiny scales of the drawstring core.
            let r = r_max * 10f64.powf(-rng.gen_range(0.0..12.0));
            let r = r.min(model.max_radius() * (1.0 - 1e-9));
            let x = [r, rng.gen_range(0.01..PI - 0.01), rng.gen_range(0.0..TAU)];
            let g = model.metric_at(x).unwrap();
            for (i, row) in g.iter().enumerate() {
                assert!(row[i] > 0.0 && row[i].is_finite(), "{name} at {x:?}: {g:?}");
                for (j, v) in row.iter().enumerate() {
                    assert_eq!(*v, g[j][i]);
                    if i != j {
                        assert_eq!(*v, 0.0);
                    }
                }
            }
            let vol = model.volume_element(x).unwrap();
            let det = g[0][0] * g[1][1] * g[2][2];
            assert!((vol * vol - det).abs() <= 1e-12 * det, "{name}");
        }
    }
}

#[test]
fn chart_boundaries_are_rejected() {
    for (name, model, _) in models() {
        assert!(model.metric_at([-1e-3, 0.5, 0.0]).is_err(), "{name}");
        let edge = model.max_radius();
        if edge.is_finite() {
            assert!(model.metric_at([edge, 0.5, 0.0]).is_err(), "{name}");
        }
    }
}

fn observed_orders(stencil: fn(&ModelMetric, [f64; 3], f64) -> drawstring_core::Result<f64>) -> Vec<f64> {
    let (c1, c2) = (0.01, 0.1);
    let model = ModelMetric::prototype(c1, c2).unwrap();
    let mut orders = Vec::new();
    for r in [0.02, 0.05] {
        let exact = prototype_scalar(r, c1, c2).unwrap();
        let x = [r, 1.0, 0.5];
        let errors: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|s| (stencil(&model, x, s * r).unwrap() - exact).abs())
            .collect();
        orders.extend(errors.windows(2).map(|w| (w[0] / w[1]).log2()));
    }
    orders
}

#[test]
fn difference_scalar_converges_at_second_order() {
    let orders = observed_orders(fd_scalar);
    assert!(orders.iter().all(|p| (1.8..=2.2).contains(p)), "{orders:?}");
}

#[test]
fn richardson_scalar_converges_at_fourth_order() {
    let orders = observed_orders(fd_scalar_richardson);
    assert!(orders.iter().all(|p| (3.5..=4.5).contains(p)), "{orders:?}");
}
