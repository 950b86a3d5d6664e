use std::f64::consts::PI;

use drawstring_core::models::ModelMetric;
use drawstring_core::profile::{BoundaryFunction, DrawstringProfile, GeometryConstants, LogLogRadius};

use crate::config::{PresetName, RunConfig};
use crate::error::{CliError, Result};

/// Outer radius of the desk-scale presets.
pub const DESK_RADIUS: f64 = 0.2;

fn base_constants(preset: PresetName, t_period: f64) -> GeometryConstants {
    match preset {
        PresetName::RoundS3 | PresetName::RoundS3Desk => GeometryConstants::round_s3(),
        _ => GeometryConstants::flat_torus(t_period),
    }
}

/// Desk-scale profile: `r2 = r1/1000`, `c1 = r1/4`, `c2` from the
/// normalisation. Large enough for finite differences and lattices to
/// resolve; the selection inequalities are not enforced.
pub fn desk_profile(mut consts: GeometryConstants, v0: f64, eps: f64, r1: f64) -> Result<DrawstringProfile> {
    consts.tube_radius = consts.tube_radius.max(2.0 * r1);
    consts.estimate_radius = consts.estimate_radius.max(2.0 * r1);
    Ok(DrawstringProfile::normalized(
        consts,
        BoundaryFunction::constant(v0)?,
        eps,
        r1,
        LogLogRadius::from_radius(r1 * 1e-3)?,
        0.25 * r1,
    )?)
}

/// The drawstring profile of a drawstring preset.
pub fn profile(cfg: &RunConfig) -> Result<DrawstringProfile> {
    let consts = base_constants(cfg.preset(), cfg.t_period);
    match cfg.preset() {
        PresetName::FlatTorus | PresetName::RoundS3 => Ok(DrawstringProfile::build(
            consts,
            BoundaryFunction::constant(cfg.v0_const)?,
            cfg.eps,
        )?),
        PresetName::FlatTorusDesk | PresetName::RoundS3Desk => {
            desk_profile(consts, cfg.v0_const, cfg.eps, DESK_RADIUS)
        }
        other => Err(CliError::Config(format!("preset {other:?} has no drawstring profile"))),
    }
}

/// Wraps a profile in the model of a drawstring preset.
pub fn drawstring_model(preset: PresetName, profile: DrawstringProfile, t_period: f64) -> Result<ModelMetric> {
    match preset {
        PresetName::RoundS3 | PresetName::RoundS3Desk => Ok(ModelMetric::round_s3(profile)),
        _ => Ok(ModelMetric::flat_torus(profile, t_period)?),
    }
}

pub fn model(cfg: &RunConfig) -> Result<ModelMetric> {
    Ok(match cfg.preset() {
        p if p.is_drawstring() => drawstring_model(p, profile(cfg)?, cfg.t_period)?,
        PresetName::FlatBaseline => ModelMetric::FlatBaseline { t_period: cfg.t_period },
        PresetName::RoundS3Baseline => ModelMetric::RoundS3Baseline,
        PresetName::Af => ModelMetric::af_cap(cfg.mass)?,
        PresetName::ConformalInversion => ModelMetric::conformal_inversion(cfg.delta)?,
        PresetName::Prototype => ModelMetric::prototype(cfg.proto_c1, cfg.proto_c2)?,
        _ => unreachable!("drawstring presets handled above"),
    })
}

/// Radial range sampled by `scan-curvature`.
pub fn scan_range(model: &ModelMetric) -> (f64, f64) {
    match model {
        ModelMetric::FlatBaseline { .. } => (1e-3, 1.0),
        ModelMetric::RoundS3Baseline => (1e-3, 1.5),
        ModelMetric::FlatTorusDrawstring { profile, .. } | ModelMetric::RoundS3Drawstring { profile } => {
            let r1 = profile.outer_radius();
            (r1 * 1e-3, (2.0 * r1).min(1.5))
        }
        ModelMetric::AfSchwarzschildCap { .. } => (0.05, 3.0),
        ModelMetric::ConformalInversionSphere { .. } => (1e-2, PI - 1e-2),
        ModelMetric::PrototypeWarped { .. } => (1e-4, 1e-1),
    }
}

/// Range of the second chart coordinate for random sampling; the polar
/// angle of the AF chart stays away from the poles.
pub fn angle_range(model: &ModelMetric) -> (f64, f64) {
    match model {
        ModelMetric::AfSchwarzschildCap { .. } => (0.3, PI - 0.3),
        _ => (0.0, 2.0 * PI),
    }
}
