//! Radial profile of a drawstring and the selection of its parameters.
//!
//! A drawstring is described by two radial functions: `h`, which dips
//! slightly below 1 inside the outer radius, and `w`, which equals 1 on a
//! tiny core around the axis and decays to 0 at a quarter of the outer
//! radius. The conformal field is `u = v0 · w` for a nonpositive boundary
//! function `v0` on the submanifold.
//!
//! For parameters that satisfy the selection inequalities the core radius is far
//! below the smallest positive `f64` (its double logarithm `ln ln(1/r)` is
//! of order `1e44` for realistic inputs). The core radius is therefore kept
//! as a [`LogLogRadius`], and the profile is evaluated through scale-free
//! [`RadialJet`]s that stay finite at radii given only by their double
//! logarithm.

use alloc::vec::Vec;

use crate::cutoffs::CutoffFn;
use crate::error::{Error, Result};
use crate::math;
use crate::quad;

/// Absolute tolerance for the normalised profile integrals.
const INTEGRAL_TOL: f64 = 1e-14;

/// Geometry-dependent constants entering the scalar-curvature estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConstants {
    /// Ambient dimension `n ≥ 3`.
    pub dim: u32,
    /// Coefficients `C1..C5` of the error terms in the curvature estimate.
    pub error_coeffs: [f64; 5],
    /// Bound `R0` on `|R_g|` near the submanifold.
    pub ambient_curvature_bound: f64,
    /// Radius `r_I` of the tubular neighbourhood.
    pub tube_radius: f64,
    /// Radius `r0 ≤ r_I` on which the curvature estimate holds.
    pub estimate_radius: f64,
    /// Volume of the submanifold.
    pub sigma_area: f64,
}

impl GeometryConstants {
    /// Flat `T² × S¹` around a circle fibre of length `t_period`.
    ///
    /// Every frame bracket vanishes for this model, so the error
    /// coefficients and the curvature bound are exactly zero.
    pub fn flat_torus(t_period: f64) -> Self {
        GeometryConstants {
            dim: 3,
            error_coeffs: [0.0; 5],
            ambient_curvature_bound: 0.0,
            tube_radius: 0.009,
            estimate_radius: 0.009,
            sigma_area: t_period,
        }
    }

    /// Unit round `S³` around a great circle.
    ///
    /// The curvature bound is the exact value 6. The error coefficients are
    /// conservative unit values: on the tube `r ≤ 0.009` the exact
    /// corrections to the model terms are bounded by `4 tan r·|u_r|` and
    /// `|h_r/h|·|6 tan r − 8/sin 2r + 4/r| ≤ 4r|h_r|`, far below unit
    /// coefficients.
    pub fn round_s3() -> Self {
        GeometryConstants {
            dim: 3,
            error_coeffs: [1.0; 5],
            ambient_curvature_bound: 6.0,
            tube_radius: 0.009,
            estimate_radius: 0.009,
            sigma_area: 2.0 * core::f64::consts::PI,
        }
    }

    /// Codimension shift `p = n − 2`, the exponent of the radial warping.
    pub fn warp_exponent(&self) -> f64 {
        self.dim as f64 - 2.0
    }

    /// Weight `(n−1)(n−2)/2` of the `u_r²` term.
    pub fn gradient_weight(&self) -> f64 {
        let n = self.dim as f64;
        0.5 * (n - 1.0) * (n - 2.0)
    }

    /// Combined coefficient `C6 = C4 (p+1) sup|v0| + C5 (1 + ‖v0‖²_{C²})`.
    pub fn boundary_coeff(&self, v0: &BoundaryFunction) -> f64 {
        let [_, _, _, c4, c5] = self.error_coeffs;
        c4 * (self.warp_exponent() + 1.0) * v0.sup_abs + c5 * (1.0 + v0.c2_norm_sq)
    }

    fn validate(&self) -> Result<()> {
        if self.dim < 3 {
            return Err(Error::Parameter {
                name: "dim",
                reason: "ambient dimension must be at least 3",
            });
        }
        if self.error_coeffs.iter().any(|c| !(*c >= 0.0)) || !(self.ambient_curvature_bound >= 0.0)
        {
            return Err(Error::Parameter {
                name: "error_coeffs",
                reason: "constants must be nonnegative",
            });
        }
        if !(self.tube_radius > 0.0) || !(self.estimate_radius > 0.0) || !(self.sigma_area > 0.0)
        {
            return Err(Error::Parameter {
                name: "tube_radius",
                reason: "radii and area must be positive",
            });
        }
        Ok(())
    }
}

/// Nonpositive function on the submanifold, sampled along its parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction {
    values: BoundaryValues,
    /// `sup |v0|`.
    pub sup_abs: f64,
    /// `‖v0‖²` in `C²`.
    pub c2_norm_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryValues {
    Constant(f64),
    /// Equally spaced samples over one period, linearly interpolated.
    Periodic { period: f64, samples: Vec<f64> },
}

impl BoundaryFunction {
    pub fn constant(value: f64) -> Result<Self> {
        if !(value <= 0.0) {
            return Err(Error::Parameter {
                name: "v0",
                reason: "boundary function must be nonpositive",
            });
        }
        Ok(BoundaryFunction {
            values: BoundaryValues::Constant(value),
            sup_abs: -value,
            c2_norm_sq: value * value,
        })
    }

    /// Periodic samples with a caller-supplied `C²` norm bound.
    pub fn periodic(period: f64, samples: Vec<f64>, c2_norm_sq: f64) -> Result<Self> {
        if samples.is_empty() || !(period > 0.0) {
            return Err(Error::Parameter {
                name: "v0",
                reason: "need a positive period and at least one sample",
            });
        }
        if samples.iter().any(|v| !(*v <= 0.0)) {
            return Err(Error::Parameter {
                name: "v0",
                reason: "boundary function must be nonpositive",
            });
        }
        let sup_abs = samples.iter().fold(0.0_f64, |m, v| m.max(-v));
        if !(c2_norm_sq >= sup_abs * sup_abs) {
            return Err(Error::Parameter {
                name: "c2_norm_sq",
                reason: "C² norm cannot be below the sup norm",
            });
        }
        Ok(BoundaryFunction {
            values: BoundaryValues::Periodic { period, samples },
            sup_abs,
            c2_norm_sq,
        })
    }

    pub fn values(&self) -> &BoundaryValues {
        &self.values
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self.values {
            BoundaryValues::Constant(v) => Some(v),
            BoundaryValues::Periodic { .. } => None,
        }
    }

    pub fn at(&self, sigma: f64) -> f64 {
        match &self.values {
            BoundaryValues::Constant(v) => *v,
            BoundaryValues::Periodic { period, samples } => {
                let n = samples.len();
                let x = sigma / period;
                let x = (x - math::floor(x)) * n as f64;
                let i = (math::floor(x) as usize).min(n - 1);
                let frac = x - i as f64;
                samples[i] * (1.0 - frac) + samples[(i + 1) % n] * frac
            }
        }
    }

    /// Most negative value.
    pub fn min_value(&self) -> f64 {
        -self.sup_abs
    }

    /// Parameters at which pointwise checks sample the boundary function.
    pub fn sample_params(&self) -> Vec<f64> {
        match &self.values {
            BoundaryValues::Constant(_) => alloc::vec![0.0],
            BoundaryValues::Periodic { period, samples } => (0..samples.len())
                .map(|i| period * i as f64 / samples.len() as f64)
                .collect(),
        }
    }
}

/// A radius `r ∈ (0, 1/e)` stored through `τ = ln ln(1/r)`.
///
/// Radii below `1e-308` underflow as `f64` but remain exact here.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogLogRadius {
    loglog: f64,
}

impl LogLogRadius {
    pub fn from_radius(r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0 / core::f64::consts::E) {
            return Err(Error::Domain {
                coordinate: "r",
                value: r,
            });
        }
        Ok(LogLogRadius {
            loglog: math::loglog_inv(r),
        })
    }

    pub fn from_loglog(loglog: f64) -> Result<Self> {
        if !(loglog > 0.0) || !loglog.is_finite() {
            return Err(Error::Domain {
                coordinate: "loglog_r",
                value: loglog,
            });
        }
        Ok(LogLogRadius { loglog })
    }

    /// `ln ln(1/r)`.
    pub fn loglog(self) -> f64 {
        self.loglog
    }

    /// `ln(1/r)`; `+∞` once it overflows.
    pub fn log_inv(self) -> f64 {
        math::exp(self.loglog)
    }

    /// `1/ln(1/r)`; never overflows.
    pub fn inv_log(self) -> f64 {
        math::exp(-self.loglog)
    }

    /// The radius itself; `0.0` once it underflows.
    pub fn radius(self) -> f64 {
        math::exp(-self.log_inv())
    }

    /// `ln ln(1/(k r))` for a factor `k ≥ 1`, robust to huge `τ`.
    pub fn scaled_loglog(self, factor: f64) -> f64 {
        self.loglog + math::ln1p(-math::ln(factor) * self.inv_log())
    }
}

/// Free parameters of a drawstring profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileParams {
    /// Outer radius `r1`; the metric is untouched beyond it.
    pub outer_radius: f64,
    /// Core radius `r2`; `w` is constant on `[0, 2 r2]`.
    pub core_radius: LogLogRadius,
    /// Depth `c1` of the dip of `h`.
    pub h_amplitude: f64,
    /// Slope `c2` of `w` in the double-logarithmic variable.
    pub w_slope: f64,
}

/// A drawstring profile: parameters, boundary function and cached integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawstringProfile {
    consts: GeometryConstants,
    v0: BoundaryFunction,
    eps: f64,
    params: ProfileParams,
    zeta: CutoffFn,
    eta: CutoffFn,
    cache: ProfileCache,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ProfileCache {
    /// `ψ(r2) − 1/ln(1/r2)`.
    psi_offset: f64,
    /// `w(r1/8) / c2`.
    outer_integral: f64,
    /// `(w(0) − w(4 r2)) / c2`.
    core_integral: f64,
    /// `ln ln(8/r1)`.
    outer_loglog: f64,
    /// `ln ln(1/(4 r2))`.
    core_loglog: f64,
}

/// Which radial function [`DrawstringProfile::eval`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialFunction {
    H,
    W,
}

/// A point of a radial grid: an ordinary radius, or a radius given only by
/// `τ = ln ln(1/r)` inside the logarithmic middle region `[4 r2, r1/8]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialPoint {
    Radius(f64),
    LogLog(f64),
}

/// Scale-free radial data at one point.
///
/// With `s = ln(1/r)` the stored derivatives are `r h_r s²`, `r² h_rr s²`
/// and `r w_r s`, which stay of order `c1` and `c2` even where `r` underflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialJet {
    /// `r`, possibly `0.0` for deep points.
    pub radius: f64,
    /// `s = ln(1/r)`, possibly `+∞`.
    pub log_inv: f64,
    /// `ln ln(1/r)`; `NaN` for `r ≥ 1/e`.
    pub loglog: f64,
    /// `1 − h`.
    pub one_minus_h: f64,
    /// `r h_r s²`.
    pub r_hr_s2: f64,
    /// `r² h_rr s²`.
    pub r2_hrr_s2: f64,
    pub w: f64,
    /// `r w_r s`.
    pub r_wr_s: f64,
}

impl RadialJet {
    pub fn h(&self) -> f64 {
        1.0 - self.one_minus_h
    }

    /// `1/s²` as a multiplier, `0` on the axis.
    fn inv_s2(&self) -> f64 {
        if self.log_inv.is_finite() && self.log_inv != 0.0 {
            1.0 / (self.log_inv * self.log_inv)
        } else {
            0.0
        }
    }

    /// `r h_r`.
    pub fn r_hr(&self) -> f64 {
        if self.r_hr_s2 == 0.0 {
            0.0
        } else {
            self.r_hr_s2 * self.inv_s2()
        }
    }

    /// `r² h_rr`.
    pub fn r2_hrr(&self) -> f64 {
        if self.r2_hrr_s2 == 0.0 {
            0.0
        } else {
            self.r2_hrr_s2 * self.inv_s2()
        }
    }

    /// `r w_r`.
    pub fn r_wr(&self) -> f64 {
        if self.r_wr_s == 0.0 {
            0.0
        } else {
            self.r_wr_s / self.log_inv
        }
    }
}

/// Picks the outer radius.
///
/// Starts strictly below `min{1/100, r0, ε, 1/(2 C1), 1/C3}` and halves until
/// `1/(√r ln(1/r)^5)` exceeds `max{4C1, 2C2 sup|v0|, 2C3, 4C6, 100(R0+1)}`
/// for every `r ≤ r1`. The corner `(a, b) = (1/2, 5)` is the worst exponent
/// pair, and over `r ≤ r1` the left side is smallest at `min(r1, e^{-10})`.
pub fn select_r1(consts: &GeometryConstants, v0: &BoundaryFunction, eps: f64) -> Result<f64> {
    consts.validate()?;
    if !(eps > 0.0) {
        return Err(Error::Parameter {
            name: "eps",
            reason: "must be positive",
        });
    }
    let cap = r1_cap(consts, eps);
    let threshold = rate_threshold(consts, v0);
    let mut r1 = 0.5 * cap;
    while rate_lhs(r1) <= threshold {
        r1 *= 0.5;
    }
    Ok(r1)
}

/// `min{1/100, r0, ε, 1/(2 C1), 1/C3}`.
pub fn r1_cap(consts: &GeometryConstants, eps: f64) -> f64 {
    let [c1, _, c3, _, _] = consts.error_coeffs;
    let mut cap = 0.01_f64.min(consts.estimate_radius).min(eps);
    if c1 > 0.0 {
        cap = cap.min(0.5 / c1);
    }
    if c3 > 0.0 {
        cap = cap.min(1.0 / c3);
    }
    cap
}

/// `max{4C1, 2C2 sup|v0|, 2C3, 4C6, 100(R0+1)}`.
pub fn rate_threshold(consts: &GeometryConstants, v0: &BoundaryFunction) -> f64 {
    let [c1, c2, c3, _, _] = consts.error_coeffs;
    (4.0 * c1)
        .max(2.0 * c2 * v0.sup_abs)
        .max(2.0 * c3)
        .max(4.0 * consts.boundary_coeff(v0))
        .max(100.0 * (consts.ambient_curvature_bound + 1.0))
}

/// Minimum over `r' ≤ r` of `1/(√r' ln(1/r')^5)`.
pub fn rate_lhs(r: f64) -> f64 {
    let r = r.min(math::exp(-10.0));
    let s = math::log_inv(r);
    1.0 / (math::sqrt(r) * math::powi(s, 5))
}

/// Picks `c1`, `c2` and the core radius for a given outer radius.
///
/// `c1` is halved from `min{r1, 1/100}/2` until the three inequalities on
/// `[r1/4, r1]` hold on a 2048-point grid, using bounds that do not depend
/// on the core radius. `c2` is the largest value allowed by the slope caps
/// (halved further if needed so that `I(r*) < 1`). The core radius then
/// solves `I(r2) = 1` by bisection in `ln ln(1/r2)`.
pub fn select_params(
    consts: &GeometryConstants,
    v0: &BoundaryFunction,
    eps: f64,
    r1: f64,
) -> Result<ProfileParams> {
    consts.validate()?;
    if !(r1 > 0.0 && r1 < math::exp(-4.0)) {
        return Err(Error::Parameter {
            name: "r1",
            reason: "outer radius must satisfy ln(1/r1) > 4",
        });
    }
    let eta = CutoffFn::falling();
    let mut c1 = 0.5 * r1.min(0.01);
    while !amplitude_admissible(consts, eps, r1, c1, &eta) {
        c1 *= 0.5;
    }

    let mut c2 = slope_cap(consts, r1, c1) / (1.0 + v0.sup_abs);
    let r_star = core_radius_cap(consts, v0, r1, c1);
    let star = LogLogRadius::from_radius(r_star)?;
    while c2 * (star.loglog() - math::loglog_inv(r1)) >= 1.0 {
        c2 *= 0.5;
    }

    let zeta = CutoffFn::rising();
    let outer = outer_integral(&eta, r1);
    let outer_loglog = math::loglog_inv(r1 / 8.0);
    let total = |tau2: f64| -> f64 {
        let core = LogLogRadius { loglog: tau2 };
        c2 * (outer + core.scaled_loglog(4.0) - outer_loglog + core_integral(&zeta, core))
    };

    let lo0 = star.loglog();
    if total(lo0) >= 1.0 {
        return Err(Error::Bracket("core radius normalisation"));
    }
    let mut lo = lo0;
    let mut step = 1.0;
    let mut hi = lo + step;
    while total(hi) < 1.0 {
        lo = hi;
        step *= 2.0;
        hi = lo0 + step;
        if !hi.is_finite() {
            return Err(Error::Bracket("core radius normalisation"));
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if total(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau2 = if math::abs(total(lo) - 1.0) <= math::abs(total(hi) - 1.0) {
        lo
    } else {
        hi
    };
    // The core radius must stay strictly below r*.
    let tau2 = if tau2 <= lo0 { hi } else { tau2 };
    Ok(ProfileParams {
        outer_radius: r1,
        core_radius: LogLogRadius { loglog: tau2 },
        h_amplitude: c1,
        w_slope: c2,
    })
}

/// `min{√(c1/α_n), c1/(2p), 1/(2(n+p)), r1/p}`.
pub fn slope_cap(consts: &GeometryConstants, r1: f64, c1: f64) -> f64 {
    let p = consts.warp_exponent();
    let n = consts.dim as f64;
    math::sqrt(c1 / consts.gradient_weight())
        .min(c1 / (2.0 * p))
        .min(1.0 / (2.0 * (n + p)))
        .min(r1 / p)
}

/// `r* = min{r1/64, (c1/C6) e^{-2(n+p) sup|v0|}, c1 e^{-2p sup|v0|}/(200(R0+1))}`.
pub fn core_radius_cap(consts: &GeometryConstants, v0: &BoundaryFunction, r1: f64, c1: f64) -> f64 {
    let p = consts.warp_exponent();
    let n = consts.dim as f64;
    let c6 = consts.boundary_coeff(v0);
    let mut cap = r1 / 64.0;
    if c6 > 0.0 {
        cap = cap.min(c1 / c6 * math::exp(-2.0 * (n + p) * v0.sup_abs));
    }
    cap.min(c1 * math::exp(-2.0 * p * v0.sup_abs) / (200.0 * (consts.ambient_curvature_bound + 1.0)))
}

/// The `c1` test of [`select_params`] on a 2048-point grid over `[r1/4, r1]`.
fn amplitude_admissible(
    consts: &GeometryConstants,
    eps: f64,
    r1: f64,
    c1: f64,
    eta: &CutoffFn,
) -> bool {
    let [k1, _, k3, _, _] = consts.error_coeffs;
    let slope = eta.slope_bound() * 0.5;
    let curv = eta.curvature_bound() * 0.5;
    (0..2048).all(|i| {
        let r = r1 / 4.0 + 0.75 * r1 * i as f64 / 2047.0;
        let s = math::log_inv(r);
        let dpsi = 1.0 / (r * s * s);
        let ddpsi = (2.0 / s - 1.0) / (r * r * s * s);
        let psi = 1.0 / s;
        let hr = c1 * (slope / r1 + dpsi);
        let hrr = c1 * (curv / (r1 * r1) + 2.0 * slope / r1 * dpsi + math::abs(ddpsi));
        let lower = -2.0 * hrr - 4.0 / r * hr;
        lower >= -eps / 3.0 && k1 * 2.0 * hr <= eps / 3.0 && k3 * c1 * psi / r <= eps / 3.0
    })
}

/// `∫_{1/2}^{1} η(y) / (y (ln(4/r1) − ln y)) dy = w(r1/8)/c2`.
fn outer_integral(eta: &CutoffFn, r1: f64) -> f64 {
    let big = math::ln(4.0 / r1);
    let f = |y: f64| eta.value(y) / (y * (big - math::ln(y)));
    quad::integrate_piecewise(&f, &[0.5, 0.75, 1.0], INTEGRAL_TOL)
}

/// `∫_{x}^{1} ζ(y) / (y (ln(1/(4 r2)) − ln y)) dy`; zero once `r2` underflows.
fn core_window_integral(zeta: &CutoffFn, core: LogLogRadius, x: f64) -> f64 {
    let s4 = math::exp(core.scaled_loglog(4.0));
    if !s4.is_finite() {
        return 0.0;
    }
    let f = |y: f64| zeta.value(y) / (y * (s4 - math::ln(y)));
    let lo = x.max(0.5);
    if lo >= 1.0 {
        return 0.0;
    }
    let knots: &[f64] = if lo < 0.75 { &[0.75, 1.0] } else { &[1.0] };
    let mut pts = alloc::vec![lo];
    pts.extend_from_slice(knots);
    quad::integrate_piecewise(&f, &pts, INTEGRAL_TOL)
}

fn core_integral(zeta: &CutoffFn, core: LogLogRadius) -> f64 {
    core_window_integral(zeta, core, 0.5)
}

impl DrawstringProfile {
    /// Profile from the selection inequalities for the given constants.
    pub fn build(consts: GeometryConstants, v0: BoundaryFunction, eps: f64) -> Result<Self> {
        let r1 = select_r1(&consts, &v0, eps)?;
        let params = select_params(&consts, &v0, eps, r1)?;
        Self::from_params(consts, v0, eps, params)
    }

    /// Profile with explicit parameters; only structural requirements are
    /// enforced (use [`crate::profile::check_condition`] for the inequalities).
    pub fn from_params(
        consts: GeometryConstants,
        v0: BoundaryFunction,
        eps: f64,
        params: ProfileParams,
    ) -> Result<Self> {
        Self::with_cutoffs(consts, v0, eps, params, CutoffFn::rising(), CutoffFn::falling())
    }

    pub fn with_cutoffs(
        consts: GeometryConstants,
        v0: BoundaryFunction,
        eps: f64,
        params: ProfileParams,
        zeta: CutoffFn,
        eta: CutoffFn,
    ) -> Result<Self> {
        consts.validate()?;
        let r1 = params.outer_radius;
        if !(r1 > 0.0 && r1 < math::exp(-1.0)) {
            return Err(Error::Parameter {
                name: "r1",
                reason: "outer radius must lie in (0, 1/e)",
            });
        }
        if !(params.core_radius.loglog() > math::loglog_inv(r1 / 64.0)) {
            return Err(Error::Parameter {
                name: "r2",
                reason: "core radius must be below r1/64",
            });
        }
        if !(params.h_amplitude >= 0.0) || !(params.w_slope >= 0.0) {
            return Err(Error::Parameter {
                name: "c1",
                reason: "amplitudes must be nonnegative",
            });
        }
        if !(eps > 0.0) {
            return Err(Error::Parameter {
                name: "eps",
                reason: "must be positive",
            });
        }
        let core = params.core_radius;
        let r2 = core.radius();
        let s2 = core.log_inv();
        let psi_core = r2 * psi_poly(&zeta, 1.0) + psi_log(&zeta, s2, 1.0);
        let cache = ProfileCache {
            psi_offset: psi_core - core.inv_log(),
            outer_integral: outer_integral(&eta, r1),
            core_integral: core_integral(&zeta, core),
            outer_loglog: math::loglog_inv(r1 / 8.0),
            core_loglog: core.scaled_loglog(4.0),
        };
        Ok(DrawstringProfile {
            consts,
            v0,
            eps,
            params,
            zeta,
            eta,
            cache,
        })
    }

    /// Profile with explicit `r1`, `r2`, `c1` and `c2` chosen so `w(0) = 1`.
    ///
    /// Used for desk-scale surrogates whose deformation is large enough to
    /// be resolved by finite differences and graph discretisations; the
    /// selection inequalities are not enforced.
    pub fn normalized(
        consts: GeometryConstants,
        v0: BoundaryFunction,
        eps: f64,
        r1: f64,
        core_radius: LogLogRadius,
        h_amplitude: f64,
    ) -> Result<Self> {
        let probe = ProfileParams {
            outer_radius: r1,
            core_radius,
            h_amplitude,
            w_slope: 1.0,
        };
        let unit = Self::from_params(consts, v0, eps, probe)?;
        let w_slope = 1.0 / unit.normalization_integral_unit();
        let mut out = unit;
        out.params.w_slope = w_slope;
        Ok(out)
    }

    /// Undeformed profile: `c1 = 0` and `v0 ≡ 0` (so `h ≡ 1`, `u ≡ 0`).
    pub fn trivial(consts: GeometryConstants, r1: f64) -> Result<Self> {
        let core = LogLogRadius::from_radius(r1 / 128.0)?;
        Self::normalized(consts, BoundaryFunction::constant(0.0)?, 1.0, r1, core, 0.0)
    }

    pub fn consts(&self) -> &GeometryConstants {
        &self.consts
    }

    pub fn v0(&self) -> &BoundaryFunction {
        &self.v0
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn params(&self) -> &ProfileParams {
        &self.params
    }

    pub fn outer_radius(&self) -> f64 {
        self.params.outer_radius
    }

    pub fn core_radius(&self) -> LogLogRadius {
        self.params.core_radius
    }

    pub fn h_amplitude(&self) -> f64 {
        self.params.h_amplitude
    }

    pub fn w_slope(&self) -> f64 {
        self.params.w_slope
    }

    pub fn zeta(&self) -> &CutoffFn {
        &self.zeta
    }

    pub fn eta(&self) -> &CutoffFn {
        &self.eta
    }

    /// `I(r2) / c2`.
    fn normalization_integral_unit(&self) -> f64 {
        self.cache.outer_integral + self.cache.core_loglog - self.cache.outer_loglog
            + self.cache.core_integral
    }

    /// `I(r2) = c2 ∫ ζ(ρ/4r2) η(4ρ/r1) dρ/(ρ ln(1/ρ))`, which equals `w(0)`.
    pub fn normalization_integral(&self) -> f64 {
        self.params.w_slope * self.normalization_integral_unit()
    }

    /// Radii where the piecewise cutoffs change regime, for those that are
    /// representable as `f64`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let r1 = self.outer_radius();
        let r2 = self.core_radius().radius();
        let mut out = Vec::new();
        for &k in self.zeta.breakpoints() {
            out.push(k * r2);
            out.push(4.0 * k * r2);
        }
        for &k in self.eta.breakpoints() {
            out.push(k * r1);
            out.push(k * r1 / 4.0);
        }
        out.retain(|r| *r > 0.0);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// `ψ(r)`.
    pub fn psi(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let core = self.core_radius();
        let r2 = core.radius();
        if r >= r2 {
            return self.cache.psi_offset + 1.0 / math::log_inv(r);
        }
        let x = r / r2;
        if x <= 0.5 {
            return 0.5 * r * x;
        }
        r2 * psi_poly(&self.zeta, x) + psi_log(&self.zeta, core.log_inv(), x)
    }

    /// `h`, `w` or their derivatives, from the defining formulas.
    pub fn eval(&self, which: RadialFunction, r: f64, order: u8) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::Domain {
                coordinate: "r",
                value: r,
            });
        }
        let jet = self.jet(r);
        match (which, order) {
            (RadialFunction::H, 0) => Ok(jet.h()),
            (RadialFunction::W, 0) => Ok(jet.w),
            (_, 1) if r == 0.0 => Ok(0.0),
            (RadialFunction::H, 1) => Ok(jet.r_hr() / r),
            (RadialFunction::W, 1) => Ok(jet.r_wr() / r),
            (RadialFunction::H, 2) if r == 0.0 => {
                let r2 = self.core_radius().radius();
                Ok(-self.h_amplitude() / r2)
            }
            (RadialFunction::H, 2) => Ok(jet.r2_hrr() / (r * r)),
            (which, order) => Err(Error::InvalidOrder {
                what: match which {
                    RadialFunction::H => "h",
                    RadialFunction::W => "w",
                },
                order,
            }),
        }
    }

    /// `u = v0(σ) · w(r)`.
    pub fn u(&self, sigma: f64, r: f64) -> f64 {
        self.v0.at(sigma) * self.w(r)
    }

    pub fn h(&self, r: f64) -> f64 {
        self.jet(r).h()
    }

    pub fn w(&self, r: f64) -> f64 {
        let r1 = self.outer_radius();
        let r = r.max(0.0);
        if r >= r1 / 4.0 {
            return 0.0;
        }
        let c2 = self.w_slope();
        if r >= r1 / 8.0 {
            let big = math::ln(4.0 / r1);
            let f = |y: f64| self.eta.value(y) / (y * (big - math::ln(y)));
            let lo = 4.0 * r / r1;
            let mut knots = alloc::vec![lo];
            if lo < 0.75 {
                knots.push(0.75);
            }
            knots.push(1.0);
            return c2 * quad::integrate_piecewise(&f, &knots, INTEGRAL_TOL);
        }
        let core = self.core_radius();
        let r2 = core.radius();
        let at_window = c2 * (self.cache.outer_integral + self.cache.core_loglog - self.cache.outer_loglog);
        if r > 0.0 && r >= 4.0 * r2 {
            return c2
                * (self.cache.outer_integral + math::loglog_inv(r) - self.cache.outer_loglog);
        }
        if r > 0.0 && r >= 2.0 * r2 {
            return at_window + c2 * core_window_integral(&self.zeta, core, r / (4.0 * r2));
        }
        at_window + c2 * self.cache.core_integral
    }

    /// Scale-free radial data at an ordinary radius.
    pub fn jet(&self, r: f64) -> RadialJet {
        let r1 = self.outer_radius();
        let c1 = self.h_amplitude();
        let c2 = self.w_slope();
        if r <= 0.0 {
            return RadialJet {
                radius: 0.0,
                log_inv: f64::INFINITY,
                loglog: f64::INFINITY,
                one_minus_h: 0.0,
                r_hr_s2: 0.0,
                r2_hrr_s2: 0.0,
                w: self.w(0.0),
                r_wr_s: 0.0,
            };
        }
        let s = math::log_inv(r);
        let loglog = if s > 1.0 { math::ln(s) } else { f64::NAN };
        if r >= r1 {
            return RadialJet {
                radius: r,
                log_inv: s,
                loglog,
                one_minus_h: 0.0,
                r_hr_s2: 0.0,
                r2_hrr_s2: 0.0,
                w: 0.0,
                r_wr_s: 0.0,
            };
        }
        let core = self.core_radius();
        let r2 = core.radius();
        let s2sq = s * s;
        let (psi, rdpsi_s2, r2ddpsi_s2) = if r >= r2 {
            (self.cache.psi_offset + 1.0 / s, 1.0, 2.0 / s - 1.0)
        } else {
            let x = r / r2;
            if x <= 0.5 {
                let q = x * r * s2sq;
                (0.5 * r * x, q, q)
            } else {
                let z0 = self.zeta.value(x);
                let z1 = self.zeta.d1(x);
                let xr = x * r * s2sq;
                (
                    r2 * psi_poly(&self.zeta, x) + psi_log(&self.zeta, core.log_inv(), x),
                    z0 + (1.0 - z0) * xr,
                    z1 * x - z0 * (1.0 - 2.0 / s) - z1 * x * xr + (1.0 - z0) * xr,
                )
            }
        };
        let x1 = r / r1;
        let (e0, e1, e2) = (self.eta.value(x1), self.eta.d1(x1), self.eta.d2(x1));
        let psi_s2 = psi * s2sq;
        let r_wr_s = -c2 * self.zeta.value(r / (4.0 * r2)) * self.eta.value(4.0 * x1);
        RadialJet {
            radius: r,
            log_inv: s,
            loglog,
            one_minus_h: c1 * e0 * psi,
            r_hr_s2: -c1 * (e1 * x1 * psi_s2 + e0 * rdpsi_s2),
            r2_hrr_s2: -c1 * (e2 * x1 * x1 * psi_s2 + 2.0 * e1 * x1 * rdpsi_s2 + e0 * r2ddpsi_s2),
            w: self.w(r),
            r_wr_s: if r_wr_s == 0.0 { 0.0 } else { r_wr_s },
        }
    }

    /// Range of `τ = ln ln(1/r)` covered by the logarithmic middle region
    /// `[4 r2, r1/8]`, where [`Self::jet_loglog`] is valid.
    pub fn middle_loglog_range(&self) -> (f64, f64) {
        (self.cache.outer_loglog, self.cache.core_loglog)
    }

    /// Scale-free radial data at `τ = ln ln(1/r)` in the middle region.
    pub fn jet_loglog(&self, tau: f64) -> Result<RadialJet> {
        let (lo, hi) = self.middle_loglog_range();
        if !(tau >= lo && tau <= hi) {
            return Err(Error::Domain {
                coordinate: "loglog_r",
                value: tau,
            });
        }
        let c1 = self.h_amplitude();
        let c2 = self.w_slope();
        let s = math::exp(tau);
        let inv_s = math::exp(-tau);
        Ok(RadialJet {
            radius: math::exp(-s),
            log_inv: s,
            loglog: tau,
            one_minus_h: c1 * (self.cache.psi_offset + inv_s),
            r_hr_s2: -c1,
            r2_hrr_s2: -c1 * (2.0 * inv_s - 1.0),
            w: c2 * (self.cache.outer_integral + tau - self.cache.outer_loglog),
            r_wr_s: -c2,
        })
    }

    pub fn jet_at(&self, point: RadialPoint) -> Result<RadialJet> {
        match point {
            RadialPoint::Radius(r) if r >= 0.0 => Ok(self.jet(r)),
            RadialPoint::Radius(r) => Err(Error::Domain {
                coordinate: "r",
                value: r,
            }),
            RadialPoint::LogLog(tau) => self.jet_loglog(tau),
        }
    }
}

/// `1/8 + ∫_{1/2}^{x} (1 − ζ(y)) y dy`, the polynomial part of `ψ(x r2)/r2`.
fn psi_poly(zeta: &CutoffFn, x: f64) -> f64 {
    let f = |y: f64| (1.0 - zeta.value(y)) * y;
    0.125 + window_integral(&f, x)
}

/// `∫_{1/2}^{x} ζ(y) / (y (s2 − ln y)²) dy`, the logarithmic part of `ψ(x r2)`.
fn psi_log(zeta: &CutoffFn, s2: f64, x: f64) -> f64 {
    if !s2.is_finite() {
        return 0.0;
    }
    let f = |y: f64| {
        let d = s2 - math::ln(y);
        zeta.value(y) / (y * d * d)
    };
    window_integral(&f, x)
}

fn window_integral<F: Fn(f64) -> f64>(f: &F, x: f64) -> f64 {
    let x = x.clamp(0.5, 1.0);
    if x <= 0.5 {
        return 0.0;
    }
    if x <= 0.75 {
        quad::adaptive_simpson(f, 0.5, x, INTEGRAL_TOL)
    } else {
        quad::integrate_piecewise(f, &[0.5, 0.75, x], INTEGRAL_TOL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk() -> DrawstringProfile {
        let consts = GeometryConstants::flat_torus(1.0);
        let v0 = BoundaryFunction::constant(-1.0).unwrap();
        let core = LogLogRadius::from_radius(1e-4).unwrap();
        DrawstringProfile::normalized(consts, v0, 0.01, 0.05, core, 0.01).unwrap()
    }

    #[test]
    fn loglog_radius_round_trip() {
        let r = LogLogRadius::from_radius(1e-5).unwrap();
        assert!((r.radius() - 1e-5).abs() < 1e-18);
        let deep = LogLogRadius::from_loglog(1e40).unwrap();
        assert_eq!(deep.radius(), 0.0);
        assert_eq!(deep.inv_log(), 0.0);
        assert!((deep.scaled_loglog(4.0) - 1e40).abs() == 0.0);
    }

    #[test]
    fn psi_is_quadratic_in_the_core() {
        let p = desk();
        let r2 = p.core_radius().radius();
        let r = r2 / 4.0;
        assert!((p.psi(r) - r * r / (2.0 * r2)).abs() < 1e-12);
        assert_eq!(p.psi(0.0), 0.0);
        assert!(p.psi(p.outer_radius()) <= 0.5);
    }

    #[test]
    fn psi_matches_direct_quadrature() {
        let p = desk();
        let r2 = p.core_radius().radius();
        let integrand = |rho: f64| {
            if rho == 0.0 {
                return 0.0;
            }
            let z = p.zeta().value(rho / r2);
            let s = -rho.ln();
            z / (rho * s * s) + (1.0 - z) * rho / r2
        };
        for &r in &[0.7 * r2, r2, 3.0 * r2, 0.01, 0.05] {
            let mut knots = vec![0.0, 0.5 * r2, 0.75 * r2, r2];
            knots.retain(|k| *k < r);
            knots.push(r);
            let direct = quad::integrate_piecewise(&integrand, &knots, 1e-15);
            assert!((p.psi(r) - direct).abs() < 1e-12, "r={r} {} {direct}", p.psi(r));
        }
    }

    #[test]
    fn h_slope_in_quadratic_region() {
        let p = desk();
        let r2 = p.core_radius().radius();
        let hr = p.eval(RadialFunction::H, r2 / 4.0, 1).unwrap();
        assert!((hr + p.h_amplitude() / 4.0).abs() < 1e-12);
        assert!(p.eval(RadialFunction::W, 0.01, 2).is_err());
    }

    #[test]
    fn w_is_one_on_axis_and_zero_outside() {
        let p = desk();
        assert!((p.w(0.0) - 1.0).abs() < 1e-12);
        assert!((p.normalization_integral() - 1.0).abs() < 1e-12);
        assert_eq!(p.w(p.outer_radius() / 4.0), 0.0);
        assert_eq!(p.h(p.outer_radius()), 1.0);
    }

    #[test]
    fn derivatives_match_difference_quotients() {
        let p = desk();
        let bps = p.breakpoints();
        for &r in &[2e-5, 6e-5, 1.5e-4, 3e-4, 7e-4, 3e-3, 8e-3, 1.5e-2, 3.3e-2, 4.5e-2] {
            let step = 1e-4 * r;
            if bps.iter().any(|b| (b - r).abs() < 4.0 * step) {
                continue;
            }
            for (which, order) in [(RadialFunction::H, 1u8), (RadialFunction::W, 1)] {
                let fd = (p.eval(which, r + step, 0).unwrap() - p.eval(which, r - step, 0).unwrap())
                    / (2.0 * step);
                let exact = p.eval(which, r, order).unwrap();
                assert!((fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()), "r={r} {which:?}");
            }
            let fd2 = (p.eval(RadialFunction::H, r + step, 1).unwrap()
                - p.eval(RadialFunction::H, r - step, 1).unwrap())
                / (2.0 * step);
            let exact2 = p.eval(RadialFunction::H, r, 2).unwrap();
            assert!((fd2 - exact2).abs() <= 1e-5 * (1.0 + exact2.abs()), "r={r}");
        }
    }

    #[test]
    fn deep_jet_agrees_with_radius_jet() {
        let p = desk();
        let (lo, hi) = p.middle_loglog_range();
        for i in 1..10 {
            let tau = lo + (hi - lo) * i as f64 / 10.0;
            let a = p.jet_loglog(tau).unwrap();
            let b = p.jet(a.radius);
            assert!((a.one_minus_h - b.one_minus_h).abs() < 1e-12);
            assert!((a.r_hr_s2 - b.r_hr_s2).abs() < 1e-12);
            assert!((a.r2_hrr_s2 - b.r2_hrr_s2).abs() < 1e-12);
            assert!((a.w - b.w).abs() < 1e-12);
            assert!((a.r_wr_s - b.r_wr_s).abs() < 1e-12);
        }
    }

    #[test]
    fn selected_profile_meets_structural_caps() {
        let consts = GeometryConstants {
            dim: 3,
            error_coeffs: [1.0; 5],
            ambient_curvature_bound: 1.0,
            tube_radius: 0.009,
            estimate_radius: 0.009,
            sigma_area: 1.0,
        };
        let v0 = BoundaryFunction::constant(-1.0).unwrap();
        let p = DrawstringProfile::build(consts.clone(), v0.clone(), 0.01).unwrap();
        let r1 = p.outer_radius();
        assert!(r1 < 0.01 && math::log_inv(r1) > 4.0);
        assert!(rate_lhs(r1) > 200.0);
        assert!(p.h_amplitude() < r1.min(0.01));
        let cap = slope_cap(&consts, r1, p.h_amplitude());
        assert!(p.w_slope() * (1.0 + v0.sup_abs) <= cap);
        assert!((p.normalization_integral() - 1.0).abs() < 1e-10);
        assert!(p.core_radius().loglog() > math::loglog_inv(r1 / 64.0));
    }

    #[test]
    fn eps_one_is_still_capped() {
        let consts = GeometryConstants {
            dim: 3,
            error_coeffs: [1.0; 5],
            ambient_curvature_bound: 1.0,
            tube_radius: 0.5,
            estimate_radius: 0.5,
            sigma_area: 1.0,
        };
        let v0 = BoundaryFunction::constant(-1.0).unwrap();
        let r1 = select_r1(&consts, &v0, 1.0).unwrap();
        assert!(r1 < 0.01);
    }

    #[test]
    fn periodic_boundary_interpolates() {
        let v = BoundaryFunction::periodic(2.0, vec![-1.0, -3.0], 9.0).unwrap();
        assert_eq!(v.at(0.0), -1.0);
        assert_eq!(v.at(1.0), -3.0);
        assert_eq!(v.at(0.5), -2.0);
        assert_eq!(v.at(2.5), -2.0);
        assert_eq!(v.sup_abs, 3.0);
        assert!(BoundaryFunction::constant(0.5).is_err());
    }
}
