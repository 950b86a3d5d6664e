//! Conformal inversion of a warped product over the round 2-sphere.
//!
//! For the supersolution `φ_δ(r) = ½ ln((1+δ)/(sin² r + δ)) + 1` the metric
//! `φ⁴ g₀ + φ⁻² dt²` is rewritten, with `dr̃ = φ dr`, as the warped product
//! `e^{-2u}(dr̃² + f² dθ²) + e^{2u} dt²` where `u = −ln φ` and `f = φ sin r`.
//! With `δ = 0` this reproduces `u ≈ −ln ln(1/r̃)` and
//! `f ≈ r̃ (1 − 1/ln(1/r̃))` as `r̃ → 0`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::curvature;
use crate::error::{Error, Result};
use crate::math;
use crate::quad;
use crate::verifier::{Location, MarginTracker, VerificationReport};

use core::f64::consts::{FRAC_PI_2, PI};

/// Below this radius `r̃(r)` for `δ = 0` uses the expansion
/// `r(ln(1/r) + 2) + r³/18`, accurate to `O(r⁵)`.
pub const SEED_RADIUS: f64 = 1e-8;

/// Tolerance for the supersolution residual signs.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// `φ_δ(r)`.
pub fn phi_delta(r: f64, delta: f64) -> Result<f64> {
    Ok(phi_jet(r, delta)?[0])
}

/// `[φ, φ', φ'']` in `r`.
pub fn phi_jet(r: f64, delta: f64) -> Result<[f64; 3]> {
    if !(delta >= 0.0) {
        return Err(Error::Parameter {
            name: "delta",
            reason: "must be nonnegative",
        });
    }
    if !(0.0..=PI).contains(&r) {
        return Err(Error::Domain {
            coordinate: "r",
            value: r,
        });
    }
    let sn = math::sin(r);
    let cs = math::cos(r);
    if delta.is_infinite() {
        return Ok([1.0, 0.0, 0.0]);
    }
    if delta == 0.0 {
        // Kept apart from the general case: sin² r underflows long before sin r.
        if sn == 0.0 {
            return Err(Error::Pole {
                coordinate: "r",
                value: r,
            });
        }
        return Ok([1.0 - math::ln(sn), -cs / sn, 1.0 / (sn * sn)]);
    }
    let q = sn * sn + delta;
    let phi = 1.0 + 0.5 * math::ln1p(cs * cs / q);
    let dq = 2.0 * sn * cs;
    let ddq = 2.0 * (cs * cs - sn * sn);
    let d1 = -0.5 * dq / q;
    let d2 = -0.5 * ddq / q + 0.5 * (dq / q) * (dq / q);
    Ok([phi, d1, d2])
}

/// Round-sphere Laplacian of the radial function `φ`: `φ'' + cot(r) φ'`.
pub fn sphere_laplacian_phi(r: f64, delta: f64) -> Result<f64> {
    let [_, d1, d2] = phi_jet(r, delta)?;
    Ok(d2 + math::cos(r) / math::sin(r) * d1)
}

/// Pointwise supersolution residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupersolutionSample {
    pub r: f64,
    /// `Δ₀φ − φ` on the unit sphere.
    pub flat_residual: f64,
    /// `Δ_{g̃} φ⁻¹ − K̃ φ⁻¹` for `g̃ = φ⁴ g₀`, by finite differences.
    pub conformal_residual: f64,
}

/// Residuals at one radius; the conformal side uses only finite
/// differences of the metric `φ⁴(dr² + sin² r dθ²)` and of `φ⁻¹`.
pub fn supersolution_sample(r: f64, delta: f64, step: f64) -> Result<SupersolutionSample> {
    let phi = phi_delta(r, delta)?;
    let flat_residual = sphere_laplacian_phi(r, delta)? - phi;

    let metric = |x: [f64; 2]| -> Result<[[f64; 2]; 2]> {
        let p = phi_delta(x[0], delta)?;
        let p4 = p * p * p * p;
        let sn = math::sin(x[0]);
        Ok([[p4, 0.0], [0.0, p4 * sn * sn]])
    };
    let gauss = 0.5 * curvature::fd_scalar_generic(&metric, [r, 0.0], step)?;

    // Δf = (1/√G) ∂_r(√G G^{rr} ∂_r f) with √G G^{rr} = sin r for g̃.
    let inv_phi = |x: f64| -> Result<f64> { Ok(1.0 / phi_delta(x, delta)?) };
    let flux = |x: f64| -> Result<f64> {
        let df = (inv_phi(x + step)? - inv_phi(x - step)?) / (2.0 * step);
        Ok(math::sin(x) * df)
    };
    let dflux = (flux(r + step)? - flux(r - step)?) / (2.0 * step);
    let laplacian = dflux / (phi * phi * phi * phi * math::sin(r));
    Ok(SupersolutionSample {
        r,
        flat_residual,
        conformal_residual: laplacian - gauss / phi,
    })
}

/// Checks `Δ₀φ ≤ φ`, its conformal counterpart, and that both residuals
/// carry the same sign at every grid radius.
pub fn supersolution_check(delta: f64, grid: &[f64]) -> Result<[VerificationReport; 3]> {
    if !(delta > 0.0) {
        return Err(Error::Parameter {
            name: "delta",
            reason: "supersolution check needs delta > 0",
        });
    }
    let spec = format!("{} radii in [{:e}, {:e}]", grid.len(), first(grid), last(grid));
    let mut flat = MarginTracker::new(RESIDUAL_TOL);
    let mut conf = MarginTracker::new(RESIDUAL_TOL);
    let mut sign = MarginTracker::new(0.0);
    for &r in grid {
        let step = 1e-4 * r.min(PI - r).min(1.0);
        let s = supersolution_sample(r, delta, step)?;
        flat.push(Location::Radius(r), -s.flat_residual);
        conf.push(Location::Radius(r), -s.conformal_residual);
        sign.push(Location::Radius(r), s.flat_residual * s.conformal_residual);
    }
    let params: Vec<(String, f64)> = alloc::vec![("delta".into(), delta)];
    Ok([
        flat.finish("supersolution.sphere", &spec, params.clone()),
        conf.finish("supersolution.conformal", &spec, params.clone()),
        sign.finish("supersolution.sign_equivalence", &spec, params),
    ])
}

/// Tabulated reparametrisation `r ↦ (r̃, f, u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionCurve {
    pub delta: f64,
    pub r_grid: Vec<f64>,
    pub r_tilde: Vec<f64>,
    pub f_vals: Vec<f64>,
    pub u_vals: Vec<f64>,
}

/// One row of the curve with the asymptotic deviations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionRow {
    pub r: f64,
    pub r_tilde: f64,
    pub f: f64,
    pub u: f64,
    /// `u + ln ln(1/r̃)`.
    pub u_deviation: f64,
    /// `(f/r̃ − 1) ln(1/r̃)`.
    pub f_deviation: f64,
}

/// Builds the curve on `n_points` radii log-spaced in `[r_min, π/2]`.
pub fn build_inversion_curve(delta: f64, r_min: f64, n_points: usize) -> Result<InversionCurve> {
    if !(delta >= 0.0) {
        return Err(Error::Parameter {
            name: "delta",
            reason: "must be nonnegative",
        });
    }
    if !(r_min > 0.0 && r_min < FRAC_PI_2) || n_points < 2 {
        return Err(Error::Parameter {
            name: "r_min",
            reason: "need 0 < r_min < π/2 and at least two points",
        });
    }
    let r_grid = math::log_space(r_min, FRAC_PI_2, n_points);
    let mut r_tilde = Vec::with_capacity(n_points);
    let mut prev_r = 0.0;
    let mut acc = 0.0;
    for &r in &r_grid {
        acc += tilde_increment(delta, prev_r, r)?;
        r_tilde.push(acc);
        prev_r = r;
    }
    let mut f_vals = Vec::with_capacity(n_points);
    let mut u_vals = Vec::with_capacity(n_points);
    for &r in &r_grid {
        let phi = phi_delta(r, delta)?;
        f_vals.push(phi * math::sin(r));
        u_vals.push(-math::ln(phi));
    }
    Ok(InversionCurve {
        delta,
        r_grid,
        r_tilde,
        f_vals,
        u_vals,
    })
}

/// `∫_a^b φ_δ`, using the small-radius expansion below [`SEED_RADIUS`]
/// when `δ = 0`.
fn tilde_increment(delta: f64, a: f64, b: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    if delta == 0.0 && a < SEED_RADIUS {
        let mid = b.min(SEED_RADIUS);
        let seed = seed_antiderivative(mid) - seed_antiderivative(a);
        return Ok(seed + tilde_increment(delta, mid, b)?);
    }
    let f = |x: f64| phi_delta(x, delta).unwrap_or(f64::NAN);
    let scale = (b - a) * phi_delta(b, delta)?;
    let v = quad::adaptive_simpson(&f, a, b, 1e-15 * scale);
    if v.is_nan() {
        return Err(Error::Pole {
            coordinate: "r",
            value: a,
        });
    }
    Ok(v)
}

/// `∫_0^r (1 − ln sin ρ) dρ ≈ r(ln(1/r) + 2) + r³/18`.
fn seed_antiderivative(r: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else {
        r * (math::log_inv(r) + 2.0) + r * r * r / 18.0
    }
}

impl InversionCurve {
    pub fn len(&self) -> usize {
        self.r_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_grid.is_empty()
    }

    /// `r̃(r)` for any `r` in the tabulated range.
    pub fn r_tilde_at(&self, r: f64) -> Result<f64> {
        let (lo, hi) = (self.r_grid[0], *self.r_grid.last().unwrap_or(&0.0));
        if !(r >= lo && r <= hi) {
            return Err(Error::Domain {
                coordinate: "r",
                value: r,
            });
        }
        let k = self.r_grid.partition_point(|x| *x <= r).saturating_sub(1);
        Ok(self.r_tilde[k] + tilde_increment(self.delta, self.r_grid[k], r)?)
    }

    /// Inverse of [`Self::r_tilde_at`] by safeguarded Newton iteration.
    pub fn radius_at(&self, r_tilde: f64) -> Result<f64> {
        let (lo_t, hi_t) = (self.r_tilde[0], *self.r_tilde.last().unwrap_or(&0.0));
        if !(r_tilde >= lo_t && r_tilde <= hi_t) {
            return Err(Error::Domain {
                coordinate: "r_tilde",
                value: r_tilde,
            });
        }
        let k = self.r_tilde.partition_point(|x| *x <= r_tilde).saturating_sub(1);
        let k1 = (k + 1).min(self.len() - 1);
        let (mut a, mut b) = (self.r_grid[k], self.r_grid[k1]);
        let mut r = a;
        for _ in 0..200 {
            let g = self.r_tilde_at(r)? - r_tilde;
            if g == 0.0 {
                break;
            }
            if g < 0.0 {
                a = r;
            } else {
                b = r;
            }
            let newton = r - g / phi_delta(r, self.delta)?;
            let next = if newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            if math::abs(next - r) <= 1e-16 * r {
                r = next;
                break;
            }
            r = next;
        }
        Ok(r)
    }

    /// Row at an arbitrary `r̃`.
    pub fn row_at(&self, r_tilde: f64) -> Result<InversionRow> {
        let r = self.radius_at(r_tilde)?;
        row(self.delta, r, r_tilde)
    }

    pub fn rows(&self) -> Result<Vec<InversionRow>> {
        self.r_grid
            .iter()
            .zip(&self.r_tilde)
            .map(|(&r, &rt)| row(self.delta, r, rt))
            .collect()
    }
}

fn row(delta: f64, r: f64, r_tilde: f64) -> Result<InversionRow> {
    let phi = phi_delta(r, delta)?;
    let f = phi * math::sin(r);
    let u = -math::ln(phi);
    let s_tilde = math::log_inv(r_tilde);
    Ok(InversionRow {
        r,
        r_tilde,
        f,
        u,
        u_deviation: u + math::ln(s_tilde),
        f_deviation: (f / r_tilde - 1.0) * s_tilde,
    })
}

/// Number of dyadic halvings inspected for the monotone trend.
pub const TREND_LEVELS: usize = 5;

/// Threshold on both deviations at the finest level.
pub const DEVIATION_LIMIT: f64 = 0.05;

/// Outcome of the small-`r̃` asymptotics check.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsReport {
    /// Rows at `r̃_min · 2^k` for `k = TREND_LEVELS, …, 0` (coarse to fine).
    pub levels: Vec<InversionRow>,
    pub finest_u_ok: bool,
    pub finest_f_ok: bool,
    pub u_trend_ok: bool,
    pub f_trend_ok: bool,
}

impl AsymptoticsReport {
    pub fn passed(&self) -> bool {
        self.finest_u_ok && self.finest_f_ok && self.u_trend_ok && self.f_trend_ok
    }
}

/// Checks `u + ln ln(1/r̃) → 0` and `(f/r̃ − 1) ln(1/r̃) → −1` at the finest
/// tabulated `r̃` and along the last dyadic levels above it.
pub fn asymptotics_check(curve: &InversionCurve) -> Result<AsymptoticsReport> {
    asymptotics_check_at(curve, 1e-6)
}

/// As [`asymptotics_check`], with the finest level at `finest` (which must
/// be tabulated and at most `1e-6`).
pub fn asymptotics_check_at(curve: &InversionCurve, finest: f64) -> Result<AsymptoticsReport> {
    if curve.delta != 0.0 {
        return Err(Error::Parameter {
            name: "delta",
            reason: "asymptotics are stated for delta = 0",
        });
    }
    if curve.is_empty() || curve.r_tilde[0] > finest || finest > 1e-6 {
        return Err(Error::Range("curve must reach r̃ ≤ 1e-6"));
    }
    let mut levels = Vec::with_capacity(TREND_LEVELS + 1);
    for k in (0..=TREND_LEVELS).rev() {
        levels.push(curve.row_at(finest * math::powi(2.0, k as i32))?);
    }
    let fine = levels[TREND_LEVELS];
    let decreasing = |g: &dyn Fn(&InversionRow) -> f64| {
        levels.windows(2).all(|w| g(&w[1]) < g(&w[0]))
    };
    Ok(AsymptoticsReport {
        finest_u_ok: math::abs(fine.u_deviation) < DEVIATION_LIMIT,
        finest_f_ok: math::abs(fine.f_deviation + 1.0) < DEVIATION_LIMIT,
        u_trend_ok: decreasing(&|row| math::abs(row.u_deviation)),
        f_trend_ok: decreasing(&|row| math::abs(row.f_deviation + 1.0)),
        levels,
    })
}

fn first(v: &[f64]) -> f64 {
    v.first().copied().unwrap_or(f64::NAN)
}

fn last(v: &[f64]) -> f64 {
    v.last().copied().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_values() {
        assert!((phi_delta(FRAC_PI_2, 0.3).unwrap() - 1.0).abs() < 1e-15);
        assert!((phi_delta(0.7, 1e300).unwrap() - 1.0).abs() < 1e-15);
        let v = phi_delta(1e-3, 0.0).unwrap();
        assert!((v - (1.0 - (1e-3f64).sin().ln())).abs() < 1e-14);
        assert!((v - (1000f64.ln() + 1.0)).abs() < 1e-6);
        assert!(phi_delta(0.0, 0.0).is_err());
    }

    #[test]
    fn phi_derivatives_match_difference_quotients() {
        for &(r, d) in &[(0.3, 0.1), (1.1, 0.01), (0.05, 1.0), (2.0, 0.5)] {
            let h = 1e-6;
            let [_, d1, d2] = phi_jet(r, d).unwrap();
            let f = |x| phi_delta(x, d).unwrap();
            let fd1 = (f(r + h) - f(r - h)) / (2.0 * h);
            let fd2 = (f(r + 1e-4) - 2.0 * f(r) + f(r - 1e-4)) / 1e-8;
            assert!((fd1 - d1).abs() < 1e-7);
            assert!((fd2 - d2).abs() < 1e-5 * (1.0 + d2.abs()));
        }
    }

    #[test]
    fn constant_limit_residuals() {
        let s = supersolution_sample(0.8, f64::INFINITY, 1e-4).unwrap();
        assert!((s.flat_residual + 1.0).abs() < 1e-12);
        assert!((s.conformal_residual + 1.0).abs() < 1e-6);
    }

    #[test]
    fn conformal_identity_factor() {
        for &d in &[0.01, 0.1, 1.0] {
            for &r in &[0.2, 0.9, 1.5, 2.5] {
                let s = supersolution_sample(r, d, 1e-4).unwrap();
                let v = phi_delta(r, d).unwrap().ln();
                let expected = (-6.0 * v).exp() * s.flat_residual;
                assert!((s.conformal_residual - expected).abs() < 1e-6, "r={r} d={d}");
            }
        }
    }

    #[test]
    fn seed_matches_quadrature_above_switch() {
        let a = 2e-8;
        let direct = quad::adaptive_simpson(&|x| phi_delta(x, 0.0).unwrap(), 1e-8, a, 1e-25);
        let seed = seed_antiderivative(a) - seed_antiderivative(1e-8);
        assert!((direct - seed).abs() < 1e-20);
    }

    #[test]
    fn curve_tilde_radius_asymptotics() {
        let c = build_inversion_curve(0.0, 1e-12, 400).unwrap();
        let rt = c.r_tilde[0];
        let r = c.r_grid[0];
        assert!((rt / (r * r.ln().abs()) - 1.0).abs() < 0.1);
        let back = c.radius_at(c.r_tilde_at(3.3e-5).unwrap()).unwrap();
        assert!((back / 3.3e-5 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn large_delta_is_nearly_round() {
        let c = build_inversion_curve(1e8, 1e-3, 50).unwrap();
        for i in 0..c.len() {
            assert!((c.r_tilde[i] - c.r_grid[i]).abs() < 1e-7);
            assert!(c.u_vals[i].abs() < 1e-8);
            assert!((c.f_vals[i] - c.r_tilde[i].sin()).abs() < 1e-7);
        }
    }
}
