//! Chart-based model metrics.
//!
//! Tube charts use coordinates `(r, θ, t)`: `r` is the distance to the
//! submanifold, `θ` the angle around it and `t` the parameter along it. The
//! asymptotically flat cap uses `(r, polar, azimuth)`. All metrics here are
//! diagonal in their charts.

use crate::cutoffs::CutoffFn;
use crate::error::{Error, Result};
use crate::inversion;
use crate::math;
use crate::profile::DrawstringProfile;

use core::f64::consts::{FRAC_PI_2, PI};

/// Symmetric 3×3 coefficient matrix.
pub type Sym3 = [[f64; 3]; 3];

/// Chart coordinates.
pub type ChartPoint = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    FlatTorusDrawstring,
    RoundS3Drawstring,
    AfSchwarzschildCap,
    ConformalInversionSphere,
    FlatBaseline,
    RoundS3Baseline,
    /// `e^{-2u}(dr² + f² dθ²) + e^{2u} dt²` with `f = r(1 − c1/ln(1/r))`,
    /// `u = −c2 ln ln(1/r)`.
    PrototypeWarped,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelMetric {
    FlatBaseline { t_period: f64 },
    RoundS3Baseline,
    FlatTorusDrawstring {
        profile: DrawstringProfile,
        t_period: f64,
    },
    RoundS3Drawstring { profile: DrawstringProfile },
    AfSchwarzschildCap { mass: f64, eta: CutoffFn },
    ConformalInversionSphere { delta: f64 },
    PrototypeWarped { c1: f64, c2: f64 },
}

/// Default circumference of the `t` circle.
pub const DEFAULT_T_PERIOD: f64 = 2.0 * PI;

impl ModelMetric {
    pub fn flat_baseline() -> Self {
        ModelMetric::FlatBaseline {
            t_period: DEFAULT_T_PERIOD,
        }
    }

    pub fn flat_torus(profile: DrawstringProfile, t_period: f64) -> Result<Self> {
        if !(t_period > 0.0) {
            return Err(Error::Parameter {
                name: "t_period",
                reason: "must be positive",
            });
        }
        Ok(ModelMetric::FlatTorusDrawstring { profile, t_period })
    }

    pub fn round_s3(profile: DrawstringProfile) -> Self {
        ModelMetric::RoundS3Drawstring { profile }
    }

    pub fn af_cap(mass: f64) -> Result<Self> {
        check_mass(mass)?;
        Ok(ModelMetric::AfSchwarzschildCap {
            mass,
            eta: CutoffFn::falling(),
        })
    }

    pub fn conformal_inversion(delta: f64) -> Result<Self> {
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::Parameter {
                name: "delta",
                reason: "must be finite and nonnegative",
            });
        }
        Ok(ModelMetric::ConformalInversionSphere { delta })
    }

    pub fn prototype(c1: f64, c2: f64) -> Result<Self> {
        if !(c1 >= 0.0) || !c2.is_finite() {
            return Err(Error::Parameter {
                name: "c1",
                reason: "prototype needs c1 ≥ 0 and finite c2",
            });
        }
        Ok(ModelMetric::PrototypeWarped { c1, c2 })
    }

    pub fn preset(&self) -> Preset {
        match self {
            ModelMetric::FlatBaseline { .. } => Preset::FlatBaseline,
            ModelMetric::RoundS3Baseline => Preset::RoundS3Baseline,
            ModelMetric::FlatTorusDrawstring { .. } => Preset::FlatTorusDrawstring,
            ModelMetric::RoundS3Drawstring { .. } => Preset::RoundS3Drawstring,
            ModelMetric::AfSchwarzschildCap { .. } => Preset::AfSchwarzschildCap,
            ModelMetric::ConformalInversionSphere { .. } => Preset::ConformalInversionSphere,
            ModelMetric::PrototypeWarped { .. } => Preset::PrototypeWarped,
        }
    }

    pub fn profile(&self) -> Option<&DrawstringProfile> {
        match self {
            ModelMetric::FlatTorusDrawstring { profile, .. }
            | ModelMetric::RoundS3Drawstring { profile } => Some(profile),
            _ => None,
        }
    }

    /// Period of the `t` coordinate (`2π` where it is an angle).
    pub fn t_period(&self) -> f64 {
        match self {
            ModelMetric::FlatBaseline { t_period }
            | ModelMetric::FlatTorusDrawstring { t_period, .. } => *t_period,
            _ => 2.0 * PI,
        }
    }

    /// The undeformed metric a drawstring preset is built on.
    pub fn baseline(&self) -> Option<ModelMetric> {
        match self {
            ModelMetric::FlatTorusDrawstring { t_period, .. } => Some(ModelMetric::FlatBaseline {
                t_period: *t_period,
            }),
            ModelMetric::RoundS3Drawstring { .. } => Some(ModelMetric::RoundS3Baseline),
            _ => None,
        }
    }

    /// Largest radius of the chart (exclusive where the chart degenerates).
    pub fn max_radius(&self) -> f64 {
        match self {
            ModelMetric::RoundS3Baseline | ModelMetric::RoundS3Drawstring { .. } => FRAC_PI_2,
            ModelMetric::ConformalInversionSphere { .. } => PI,
            ModelMetric::PrototypeWarped { .. } => 1.0,
            _ => f64::INFINITY,
        }
    }

    /// Square roots `(A, B, C)` of the diagonal coefficients.
    pub fn diagonal_factors(&self, x: ChartPoint) -> Result<[f64; 3]> {
        let [r, angle, t] = x;
        if !(r >= 0.0) {
            return Err(Error::Domain {
                coordinate: "r",
                value: r,
            });
        }
        if r >= self.max_radius() {
            return Err(Error::Domain {
                coordinate: "r",
                value: r,
            });
        }
        Ok(match self {
            ModelMetric::FlatBaseline { .. } => [1.0, r, 1.0],
            ModelMetric::RoundS3Baseline => [1.0, math::sin(r), math::cos(r)],
            ModelMetric::FlatTorusDrawstring { profile, .. } => {
                let jet = profile.jet(r);
                let u = profile.v0().at(t) * jet.w;
                let e = math::exp(u);
                [1.0 / e, jet.h() * r / e, e]
            }
            ModelMetric::RoundS3Drawstring { profile } => {
                let jet = profile.jet(r);
                let u = profile.v0().at(t) * jet.w;
                let e = math::exp(u);
                [1.0 / e, jet.h() * math::sin(r) / e, e * math::cos(r)]
            }
            ModelMetric::AfSchwarzschildCap { mass, eta } => {
                let v = vm(*mass, eta, r, 0)?;
                [1.0 / math::sqrt(v), r, r * math::sin(angle)]
            }
            ModelMetric::ConformalInversionSphere { delta } => {
                let phi = inversion::phi_delta(r, *delta)?;
                [phi * phi, phi * phi * math::sin(r), 1.0 / phi]
            }
            ModelMetric::PrototypeWarped { c1, c2 } => {
                let s = prototype_log(r, *c1)?;
                let e = math::exp(-c2 * math::ln(s));
                [1.0 / e, r * (1.0 - c1 / s) / e, e]
            }
        })
    }

    /// Coefficient matrix at `x`.
    pub fn metric_at(&self, x: ChartPoint) -> Result<Sym3> {
        let [a, b, c] = self.diagonal_factors(x)?;
        Ok([[a * a, 0.0, 0.0], [0.0, b * b, 0.0], [0.0, 0.0, c * c]])
    }

    /// `√det` of the coefficient matrix.
    pub fn volume_element(&self, x: ChartPoint) -> Result<f64> {
        let [a, b, c] = self.diagonal_factors(x)?;
        Ok(math::abs(a * b * c))
    }
}

fn check_mass(m: f64) -> Result<()> {
    if !(m > 0.0 && m < 0.25) {
        return Err(Error::Parameter {
            name: "mass",
            reason: "must lie in (0, 1/4) for V_m to stay positive",
        });
    }
    Ok(())
}

/// `ln(1/r)` for the prototype metric, rejecting the pole `ln(1/r) = c1`.
pub(crate) fn prototype_log(r: f64, c1: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain {
            coordinate: "r",
            value: r,
        });
    }
    let s = math::log_inv(r);
    if s <= c1 {
        return Err(Error::Pole {
            coordinate: "r",
            value: r,
        });
    }
    Ok(s)
}

/// `V_m = 1 − η(r) 2m r² − (1 − η(r)) 2m/r` or its derivative.
pub fn vm_eval(m: f64, r: f64, order: u8) -> Result<f64> {
    check_mass(m)?;
    vm(m, &CutoffFn::falling(), r, order)
}

pub(crate) fn vm(m: f64, eta: &CutoffFn, r: f64, order: u8) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Domain {
            coordinate: "r",
            value: r,
        });
    }
    let e0 = eta.value(r);
    let e1 = eta.d1(r);
    let outer = 1.0 - e0;
    match order {
        0 => {
            let tail = if outer == 0.0 { 0.0 } else { outer * 2.0 * m / r };
            Ok(1.0 - e0 * 2.0 * m * r * r - tail)
        }
        1 => {
            let tail = if outer == 0.0 && e1 == 0.0 {
                0.0
            } else {
                e1 * 2.0 * m / r + outer * 2.0 * m / (r * r)
            };
            Ok(-e1 * 2.0 * m * r * r - e0 * 4.0 * m * r + tail)
        }
        _ => Err(Error::InvalidOrder { what: "V_m", order }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{BoundaryFunction, GeometryConstants, LogLogRadius};

    fn desk_flat() -> ModelMetric {
        let consts = GeometryConstants::flat_torus(1.0);
        let v0 = BoundaryFunction::constant(-1.0).unwrap();
        let core = LogLogRadius::from_radius(1e-4).unwrap();
        let p = DrawstringProfile::normalized(consts, v0, 0.01, 0.05, core, 0.01).unwrap();
        ModelMetric::flat_torus(p, 1.0).unwrap()
    }

    #[test]
    fn flat_baseline_entries() {
        let g = ModelMetric::flat_baseline().metric_at([0.5, 1.0, 2.0]).unwrap();
        assert_eq!(g, [[1.0, 0.0, 0.0], [0.0, 0.25, 0.0], [0.0, 0.0, 1.0]]);
        assert_eq!(ModelMetric::flat_baseline().volume_element([0.5, 0.0, 0.0]).unwrap(), 0.5);
    }

    #[test]
    fn drawstring_agrees_with_baseline_outside() {
        let m = desk_flat();
        let base = m.baseline().unwrap();
        for &r in &[0.05, 0.06, 0.2] {
            let x = [r, 0.3, 0.1];
            assert_eq!(m.metric_at(x).unwrap(), base.metric_at(x).unwrap());
        }
    }

    #[test]
    fn volume_element_matches_determinant() {
        let m = desk_flat();
        let p = m.profile().unwrap().clone();
        for &r in &[1e-5, 1e-4, 3e-4, 2e-3, 0.01, 0.03] {
            let x = [r, 0.0, 0.0];
            let g = m.metric_at(x).unwrap();
            let det = (g[0][0] * g[1][1] * g[2][2]).sqrt();
            let closed = math::exp(-p.u(0.0, r)) * p.h(r) * r;
            let vol = m.volume_element(x).unwrap();
            assert!((vol - det).abs() <= 1e-12 * det);
            assert!((vol - closed).abs() <= 1e-12 * closed);
        }
    }

    #[test]
    fn af_values() {
        assert!((vm_eval(0.1, 0.25, 0).unwrap() - 0.9875).abs() < 1e-15);
        assert!((vm_eval(0.1, 2.0, 0).unwrap() - 0.9).abs() < 1e-15);
        assert_eq!(vm_eval(0.2, 0.0, 0).unwrap(), 1.0);
        assert!(vm_eval(0.25, 1.0, 0).is_err());
        let m = ModelMetric::af_cap(0.1).unwrap();
        let g = m.metric_at([2.0, FRAC_PI_2, 0.0]).unwrap();
        assert!((g[0][0] - 1.0 / 0.9).abs() < 1e-14);
    }

    #[test]
    fn vm_derivative_matches_difference_quotient() {
        for &r in &[0.3, 0.6, 0.7, 0.8, 0.95, 1.5] {
            let h = 1e-6;
            let fd = (vm_eval(0.2, r + h, 0).unwrap() - vm_eval(0.2, r - h, 0).unwrap()) / (2.0 * h);
            assert!((fd - vm_eval(0.2, r, 1).unwrap()).abs() < 1e-7, "r={r}");
        }
    }

    #[test]
    fn round_s3_range() {
        let m = ModelMetric::RoundS3Baseline;
        assert!(m.metric_at([FRAC_PI_2, 0.0, 0.0]).is_err());
        assert!(m.metric_at([-0.1, 0.0, 0.0]).is_err());
        let g = m.metric_at([0.4, 0.0, 0.0]).unwrap();
        assert!((g[1][1] - 0.4f64.sin().powi(2)).abs() < 1e-15);
    }
}
