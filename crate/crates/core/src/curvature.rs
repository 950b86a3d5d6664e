//! Scalar curvature by closed forms and by a finite-difference oracle,
//! extrinsic curvature of the distance tubes, and the Jacobi equation.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::models::{prototype_log, vm, ChartPoint, ModelMetric};
use crate::profile::{DrawstringProfile, RadialJet};
use crate::inversion;

/// Coefficient matrices whose condition estimate exceeds this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Default stencil step: `1e-3 r`, capped at `1e-4`.
pub fn default_step(r: f64) -> f64 {
    (1e-3 * r).min(1e-4)
}

/// Scalar curvature of an `N`-dimensional metric by central differences.
///
/// First and second derivatives of the coefficients are taken with step
/// `step` in every coordinate; Christoffel symbols, their derivatives, the
/// Ricci tensor and its trace follow algebraically. Second-order accurate.
// Tensor index notation reads best as plain index loops.
#[allow(clippy::needless_range_loop)]
pub fn fd_scalar_generic<const N: usize, F>(metric: &F, x: [f64; N], step: f64) -> Result<f64>
where
    F: Fn([f64; N]) -> Result<[[f64; N]; N]>,
{
    if !(step > 0.0) {
        return Err(Error::Parameter {
            name: "step",
            reason: "must be positive",
        });
    }
    let g = metric(x)?;
    let gi = invert(&g)?;
    let cond = frobenius(&g) * frobenius(&gi);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::Conditioning(cond));
    }
    let shifted = |moves: &[(usize, f64)]| -> Result<[[f64; N]; N]> {
        let mut y = x;
        for &(i, d) in moves {
            y[i] += d;
        }
        metric(y)
    };
    let h = step;
    let mut dg = [[[0.0; N]; N]; N];
    let mut ddg = [[[[0.0; N]; N]; N]; N];
    for m in 0..N {
        let gp = shifted(&[(m, h)])?;
        let gm = shifted(&[(m, -h)])?;
        for a in 0..N {
            for b in 0..N {
                dg[m][a][b] = (gp[a][b] - gm[a][b]) / (2.0 * h);
                ddg[m][m][a][b] = (gp[a][b] - 2.0 * g[a][b] + gm[a][b]) / (h * h);
            }
        }
        for n in (m + 1)..N {
            let gpp = shifted(&[(m, h), (n, h)])?;
            let gpm = shifted(&[(m, h), (n, -h)])?;
            let gmp = shifted(&[(m, -h), (n, h)])?;
            let gmm = shifted(&[(m, -h), (n, -h)])?;
            for a in 0..N {
                for b in 0..N {
                    let v = (gpp[a][b] - gpm[a][b] - gmp[a][b] + gmm[a][b]) / (4.0 * h * h);
                    ddg[m][n][a][b] = v;
                    ddg[n][m][a][b] = v;
                }
            }
        }
    }

    // Lowered symbols [ij, l] = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij) and their derivatives.
    let mut low = [[[0.0; N]; N]; N];
    let mut dlow = [[[[0.0; N]; N]; N]; N];
    for i in 0..N {
        for j in 0..N {
            for l in 0..N {
                low[i][j][l] = 0.5 * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                for m in 0..N {
                    dlow[m][i][j][l] =
                        0.5 * (ddg[m][i][j][l] + ddg[m][j][i][l] - ddg[m][l][i][j]);
                }
            }
        }
    }
    // ∂_m g^{kl} = −g^{ka} ∂_m g_ab g^{bl}.
    let mut dgi = [[[0.0; N]; N]; N];
    for m in 0..N {
        for k in 0..N {
            for l in 0..N {
                let mut acc = 0.0;
                for a in 0..N {
                    for b in 0..N {
                        acc -= gi[k][a] * dg[m][a][b] * gi[b][l];
                    }
                }
                dgi[m][k][l] = acc;
            }
        }
    }
    let mut gamma = [[[0.0; N]; N]; N];
    let mut dgamma = [[[[0.0; N]; N]; N]; N];
    for k in 0..N {
        for i in 0..N {
            for j in 0..N {
                let mut acc = 0.0;
                for l in 0..N {
                    acc += gi[k][l] * low[i][j][l];
                }
                gamma[k][i][j] = acc;
                for m in 0..N {
                    let mut d = 0.0;
                    for l in 0..N {
                        d += dgi[m][k][l] * low[i][j][l] + gi[k][l] * dlow[m][i][j][l];
                    }
                    dgamma[m][k][i][j] = d;
                }
            }
        }
    }
    let mut scalar = 0.0;
    for i in 0..N {
        for j in 0..N {
            if gi[i][j] == 0.0 {
                continue;
            }
            let mut ric = 0.0;
            for k in 0..N {
                ric += dgamma[k][k][i][j] - dgamma[j][k][i][k];
                for l in 0..N {
                    ric += gamma[k][k][l] * gamma[l][i][j] - gamma[k][j][l] * gamma[l][i][k];
                }
            }
            scalar += gi[i][j] * ric;
        }
    }
    Ok(scalar)
}

/// Finite-difference scalar curvature of a model metric at `x`.
pub fn fd_scalar(model: &ModelMetric, x: ChartPoint, step: f64) -> Result<f64> {
    if !(x[0] >= 2.0 * step) {
        return Err(Error::Domain {
            coordinate: "r",
            value: x[0],
        });
    }
    if x[0] + 2.0 * step >= model.max_radius() {
        return Err(Error::Domain {
            coordinate: "r",
            value: x[0],
        });
    }
    fd_scalar_generic(&|y: ChartPoint| model.metric_at(y), x, step)
}

/// Richardson combination `(4 R(step/2) − R(step))/3` of two stencil calls.
pub fn fd_scalar_richardson(model: &ModelMetric, x: ChartPoint, step: f64) -> Result<f64> {
    let coarse = fd_scalar(model, x, step)?;
    let fine = fd_scalar(model, x, 0.5 * step)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

fn invert<const N: usize>(g: &[[f64; N]; N]) -> Result<[[f64; N]; N]> {
    let mut a = *g;
    let mut inv = [[0.0; N]; N];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..N {
        let mut pivot = col;
        for row in (col + 1)..N {
            if math::abs(a[row][col]) > math::abs(a[pivot][col]) {
                pivot = row;
            }
        }
        if a[pivot][col] == 0.0 || !a[pivot][col].is_finite() {
            return Err(Error::Conditioning(f64::INFINITY));
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for k in 0..N {
            a[col][k] /= p;
            inv[col][k] /= p;
        }
        for row in 0..N {
            if row != col {
                let f = a[row][col];
                if f != 0.0 {
                    for k in 0..N {
                        a[row][k] -= f * a[col][k];
                        inv[row][k] -= f * inv[col][k];
                    }
                }
            }
        }
    }
    Ok(inv)
}

fn frobenius<const N: usize>(g: &[[f64; N]; N]) -> f64 {
    math::sqrt(g.iter().flatten().map(|v| v * v).sum())
}

/// Closed-form scalar curvature of the prototype metric,
/// `2/(r² s^{2+2c2}) [c1(c1+2)/(s − c1) + c1 − c2²]` with `s = ln(1/r)`.
pub fn prototype_scalar(r: f64, c1: f64, c2: f64) -> Result<f64> {
    let s = prototype_log(r, c1)?;
    let bracket = c1 * (c1 + 2.0) / (s - c1) + c1 - c2 * c2;
    Ok(2.0 / (r * r * math::exp((2.0 + 2.0 * c2) * math::ln(s))) * bracket)
}

/// Base geometry of a drawstring tube.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TubeBase {
    Flat,
    RoundS3,
}

impl TubeBase {
    pub fn of(model: &ModelMetric) -> Option<Self> {
        match model {
            ModelMetric::FlatBaseline { .. } | ModelMetric::FlatTorusDrawstring { .. } => {
                Some(TubeBase::Flat)
            }
            ModelMetric::RoundS3Baseline | ModelMetric::RoundS3Drawstring { .. } => {
                Some(TubeBase::RoundS3)
            }
            _ => None,
        }
    }

    /// Scalar curvature of the undeformed metric.
    pub fn scalar(self) -> f64 {
        match self {
            TubeBase::Flat => 0.0,
            TubeBase::RoundS3 => 6.0,
        }
    }

    /// Mean curvature of the distance tube, `1/r` or `cot r − tan r`.
    pub fn mean_curvature(self, r: f64) -> f64 {
        let [b, c] = self.principal(r);
        b + c
    }

    /// Principal curvatures `(∂_r ln B, ∂_r ln C)` of the undeformed tube.
    fn principal(self, r: f64) -> [f64; 2] {
        match self {
            TubeBase::Flat => [1.0 / r, 0.0],
            TubeBase::RoundS3 => [math::cos(r) / math::sin(r), -math::tan(r)],
        }
    }

    /// `∂_r` of the undeformed mean curvature.
    fn mean_curvature_slope(self, r: f64) -> f64 {
        match self {
            TubeBase::Flat => -1.0 / (r * r),
            TubeBase::RoundS3 => {
                let (s, c) = (math::sin(r), math::cos(r));
                -1.0 / (s * s) - 1.0 / (c * c)
            }
        }
    }

    /// `r/(sin r cos r)` and `tan(r)/r`, both 1 on the flat base.
    fn corrections(self, r: f64) -> (f64, f64) {
        match self {
            TubeBase::Flat => (1.0, 1.0),
            TubeBase::RoundS3 if r == 0.0 => (1.0, 1.0),
            TubeBase::RoundS3 => (r / (math::sin(r) * math::cos(r)), math::tan(r) / r),
        }
    }
}

/// Scalar curvature of a drawstring from its radial jet, for a constant
/// boundary value `v0`. Exact for the diagonal flat and round models.
///
/// On the flat base `R' = 2 e^{2u} [−h''/h − 2h'/(rh) − u'²]`; on the round
/// base `R' e^{-2u} = 6 − 2h''/h + (h'/h)(6 tan r − 4/(sin r cos r)) +
/// 4 tan r u' − 2u'²`. Both are assembled from `r`-scaled terms so that no
/// `1/r` cancellation occurs near the axis. Returns `±∞` where `r`
/// underflows and the bracket has a sign.
pub fn drawstring_scalar(base: TubeBase, jet: &RadialJet, v0: f64, core_radius: f64, c1: f64) -> f64 {
    let u = v0 * jet.w;
    let e2u = math::exp(2.0 * u);
    if jet.loglog == f64::INFINITY {
        // Axis: h = 1 − c1 r²/(2 r2) and w is constant nearby.
        let axis = if c1 == 0.0 {
            0.0
        } else if core_radius > 0.0 {
            6.0 * c1 / core_radius
        } else {
            f64::INFINITY
        };
        return e2u * (base.scalar() + axis);
    }
    let h = jet.h();
    let (k_sin, k_tan) = base.corrections(jet.radius);
    let ru_s = v0 * jet.r_wr_s;
    // s² r² × (model bracket), with the `1/r²` part separated.
    let singular_s2 = 2.0 * (-jet.r2_hrr_s2 / h - 2.0 * k_sin * jet.r_hr_s2 / h - ru_s * ru_s);
    let singular = scaled_over_r2(singular_s2, jet.radius, jet.log_inv);
    let regular = match base {
        TubeBase::Flat => 0.0,
        TubeBase::RoundS3 => {
            let inv_s2 = if jet.log_inv.is_finite() {
                1.0 / (jet.log_inv * jet.log_inv)
            } else {
                0.0
            };
            let inv_s = if jet.log_inv.is_finite() {
                1.0 / jet.log_inv
            } else {
                0.0
            };
            6.0 + 6.0 * jet.r_hr_s2 * inv_s2 / h * k_tan + 4.0 * ru_s * inv_s * k_tan
        }
    };
    e2u * (regular + singular)
}

/// `x / (r s)²`, returning `±∞` when `(r s)²` underflows and 0 for `x = 0`.
fn scaled_over_r2(x: f64, r: f64, s: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if r == 0.0 || !s.is_finite() {
        return if x > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
    }
    let rs = r * s;
    x / (rs * rs)
}

/// `r · H'` of a drawstring tube from its jet: `e^{u}(r H + r h_r/h)`.
pub fn scaled_mean_curvature(base: TubeBase, jet: &RadialJet, v0: f64) -> f64 {
    let u = v0 * jet.w;
    let r_h = match base {
        TubeBase::Flat => 1.0,
        TubeBase::RoundS3 => {
            let r = jet.radius;
            if r < 1e-8 {
                1.0 - r * r * 4.0 / 3.0
            } else {
                r * base.mean_curvature(r)
            }
        }
    };
    math::exp(u) * (r_h + jet.r_hr() / jet.h())
}

fn constant_v0(profile: &DrawstringProfile) -> Result<f64> {
    profile.v0().constant_value().ok_or(Error::Parameter {
        name: "v0",
        reason: "closed forms need a constant boundary function",
    })
}

/// Closed-form scalar curvature for every diagonal preset.
pub fn warped_scalar(model: &ModelMetric, x: ChartPoint) -> Result<f64> {
    let r = x[0];
    if !(r >= 0.0) || r >= model.max_radius() {
        return Err(Error::Domain {
            coordinate: "r",
            value: r,
        });
    }
    match model {
        ModelMetric::FlatBaseline { .. } => Ok(0.0),
        ModelMetric::RoundS3Baseline => Ok(6.0),
        ModelMetric::FlatTorusDrawstring { profile, .. } | ModelMetric::RoundS3Drawstring { profile } => {
            let base = TubeBase::of(model).ok_or(Error::Configuration("tube base"))?;
            let v0 = constant_v0(profile)?;
            Ok(drawstring_scalar(
                base,
                &profile.jet(r),
                v0,
                profile.core_radius().radius(),
                profile.h_amplitude(),
            ))
        }
        ModelMetric::AfSchwarzschildCap { mass, eta } => {
            if r == 0.0 {
                return Ok(12.0 * mass);
            }
            let v = vm(*mass, eta, r, 0)?;
            let dv = vm(*mass, eta, r, 1)?;
            Ok(2.0 * (1.0 - v - r * dv) / (r * r))
        }
        ModelMetric::ConformalInversionSphere { delta } => {
            let [phi, d1, d2] = inversion::phi_jet(r, *delta)?;
            let lap = d2 + math::cos(r) / math::sin(r) * d1;
            Ok(2.0 * (phi - lap) / math::powi(phi, 5))
        }
        ModelMetric::PrototypeWarped { c1, c2 } => {
            let s = prototype_log(r, *c1)?;
            // f = r(1 − c1/s), u = −c2 ln s.
            let f = r * (1.0 - c1 / s);
            let ddf = -c1 * (s + 2.0) / (r * s * s * s);
            let du = c2 / (r * s);
            let e2u = math::exp(-2.0 * c2 * math::ln(s));
            Ok(2.0 * e2u * (-ddf / f - du * du))
        }
    }
}

/// `(r²/2) R = 6mηr² + 2mη'(r³ − 1)`, returned as `R`.
pub fn af_scalar_identity(m: f64, r: f64) -> Result<f64> {
    crate::models::vm_eval(m, r, 0)?;
    if r == 0.0 {
        return Ok(12.0 * m);
    }
    let eta = crate::cutoffs::CutoffFn::falling();
    let bracket = 6.0 * m * eta.value(r) * r * r + 2.0 * m * eta.d1(r) * (r * r * r - 1.0);
    Ok(2.0 * bracket / (r * r))
}

/// Deformed mean curvature `H' = e^{pu}(H + h_r/h)` of the distance tube.
pub fn mean_curvature_prime(model: &ModelMetric, r: f64, sigma: f64) -> Result<f64> {
    if !(r > 0.0) || r >= model.max_radius() {
        return Err(Error::Domain {
            coordinate: "r",
            value: r,
        });
    }
    Ok(tube_extrinsics(model, r, sigma)?.mean)
}

/// Extrinsic data of the distance tube `Σ_r` in a drawstring or baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeExtrinsics {
    /// `H'`.
    pub mean: f64,
    /// `|A'|²`.
    pub second_fundamental_sq: f64,
    /// `∂H'/∂r`.
    pub mean_slope: f64,
    /// `e^{pu}`.
    pub normal_scale: f64,
}

pub fn tube_extrinsics(model: &ModelMetric, r: f64, sigma: f64) -> Result<TubeExtrinsics> {
    let base = TubeBase::of(model).ok_or(Error::Parameter {
        name: "model",
        reason: "tube extrinsics need a flat or round drawstring preset",
    })?;
    let (h, dh, ddh, du, u) = match model.profile() {
        Some(p) => {
            let h = p.h(r);
            let dh = p.eval(crate::profile::RadialFunction::H, r, 1)?;
            let ddh = p.eval(crate::profile::RadialFunction::H, r, 2)?;
            let v0 = p.v0().at(sigma);
            let dw = p.eval(crate::profile::RadialFunction::W, r, 1)?;
            (h, dh, ddh, v0 * dw, p.u(sigma, r))
        }
        None => (1.0, 0.0, 0.0, 0.0, 0.0),
    };
    let [kb, kc] = base.principal(r);
    let e = math::exp(u);
    let theta = kb + dh / h - du;
    let along = kc + du;
    let mean_base = kb + kc;
    let slope = e
        * (du * (mean_base + dh / h) + base.mean_curvature_slope(r) + ddh / h - (dh / h) * (dh / h));
    Ok(TubeExtrinsics {
        mean: e * (mean_base + dh / h),
        second_fundamental_sq: e * e * (theta * theta + along * along),
        mean_slope: slope,
        normal_scale: e,
    })
}

/// Normalised residual of `R = R_r − (H'² + |A'|² + 2 e^{pu} ∂H'/∂r)`.
///
/// The intrinsic curvature `R_r` of the tube comes from finite differences
/// of the induced metric on `(θ, t)`; the extrinsic terms are closed forms.
/// The residual is divided by `1 + |H'²| + |A'|² + |2 e^{pu} ∂H'/∂r|`.
pub fn gauss_consistency(model: &ModelMetric, r: f64, sigma: f64, step: f64) -> Result<f64> {
    let lhs = warped_scalar(model, [r, 0.0, sigma])?;
    let slice = |y: [f64; 2]| -> Result<[[f64; 2]; 2]> {
        let g = model.metric_at([r, y[0], y[1]])?;
        Ok([[g[1][1], g[1][2]], [g[2][1], g[2][2]]])
    };
    let intrinsic = fd_scalar_generic(&slice, [0.0, sigma], step)?;
    let ext = tube_extrinsics(model, r, sigma)?;
    let h2 = ext.mean * ext.mean;
    let slope_term = 2.0 * ext.normal_scale * ext.mean_slope;
    let rhs = intrinsic - (h2 + ext.second_fundamental_sq + slope_term);
    let scale = 1.0 + math::abs(h2) + ext.second_fundamental_sq + math::abs(slope_term);
    Ok(math::abs(lhs - rhs) / scale)
}

/// How a [`CurvatureSample`] value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    FiniteDifference,
    Richardson,
}

/// Scalar curvature at one point by closed form and oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSample {
    pub point: ChartPoint,
    pub scal_closed: Option<f64>,
    pub scal_oracle: f64,
    pub mean_curv: Option<f64>,
    pub methods: Vec<Method>,
}

impl CurvatureSample {
    /// `|closed − oracle| / max(|closed|, floor)`.
    pub fn relative_gap(&self, floor: f64) -> Option<f64> {
        self.scal_closed
            .map(|c| math::abs(c - self.scal_oracle) / math::abs(c).max(floor))
    }
}

pub fn sample_curvature(model: &ModelMetric, x: ChartPoint, step: f64) -> Result<CurvatureSample> {
    let oracle = fd_scalar_richardson(model, x, step)?;
    let closed = warped_scalar(model, x).ok();
    let mean = if TubeBase::of(model).is_some() {
        mean_curvature_prime(model, x[0], x[2]).ok()
    } else {
        None
    };
    let mut methods = alloc::vec![Method::FiniteDifference, Method::Richardson];
    if closed.is_some() {
        methods.insert(0, Method::ClosedForm);
    }
    Ok(CurvatureSample {
        point: x,
        scal_closed: closed,
        scal_oracle: oracle,
        mean_curv: mean,
        methods,
    })
}

/// Solution of `h'' = −K(r) h`, `h(0) = 0`, `h'(0) = 1` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiSolution {
    pub grid: Vec<f64>,
    pub h_values: Vec<f64>,
    pub hr_values: Vec<f64>,
    curvature: Vec<f64>,
}

/// Classical fourth-order Runge–Kutta on `steps` uniform steps of `[0, r_max]`.
pub fn jacobi_solve<K: Fn(f64) -> f64>(k: &K, r_max: f64, steps: usize) -> Result<JacobiSolution> {
    if steps < 16 || !(r_max > 0.0) {
        return Err(Error::Parameter {
            name: "steps",
            reason: "need at least 16 steps over a positive range",
        });
    }
    let dr = r_max / steps as f64;
    let mut grid = Vec::with_capacity(steps + 1);
    let mut hs = Vec::with_capacity(steps + 1);
    let mut hrs = Vec::with_capacity(steps + 1);
    let mut ks = Vec::with_capacity(steps + 1);
    let (mut h, mut hr) = (0.0_f64, 1.0_f64);
    for i in 0..=steps {
        let r = if i == steps { r_max } else { dr * i as f64 };
        grid.push(r);
        hs.push(h);
        hrs.push(hr);
        ks.push(k(r));
        if i == steps {
            break;
        }
        let f = |r: f64, y: (f64, f64)| (y.1, -k(r) * y.0);
        let k1 = f(r, (h, hr));
        let k2 = f(r + 0.5 * dr, (h + 0.5 * dr * k1.0, hr + 0.5 * dr * k1.1));
        let k3 = f(r + 0.5 * dr, (h + 0.5 * dr * k2.0, hr + 0.5 * dr * k2.1));
        let k4 = f(r + dr, (h + dr * k3.0, hr + dr * k3.1));
        h += dr / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        hr += dr / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    Ok(JacobiSolution {
        grid,
        h_values: hs,
        hr_values: hrs,
        curvature: ks,
    })
}

impl JacobiSolution {
    /// `h(r)` by quintic Hermite interpolation between grid nodes, using
    /// `h`, `h'` and `h'' = −K h` at both ends.
    pub fn eval(&self, r: f64) -> Result<f64> {
        let last = *self.grid.last().unwrap_or(&0.0);
        if !(r >= 0.0 && r <= last) {
            return Err(Error::Domain {
                coordinate: "r",
                value: r,
            });
        }
        let i = self.grid.partition_point(|g| *g <= r).saturating_sub(1).min(self.grid.len() - 2);
        let (a, b) = (self.grid[i], self.grid[i + 1]);
        let d = b - a;
        let t = (r - a) / d;
        let y0 = [
            self.h_values[i],
            self.hr_values[i] * d,
            -self.curvature[i] * self.h_values[i] * d * d,
        ];
        let y1 = [
            self.h_values[i + 1],
            self.hr_values[i + 1] * d,
            -self.curvature[i + 1] * self.h_values[i + 1] * d * d,
        ];
        Ok(quintic_hermite(t, y0, y1))
    }

    /// `h/r` at every node, with the limit 1 at `r = 0`.
    pub fn h_over_r(&self) -> Vec<f64> {
        self.grid
            .iter()
            .zip(&self.h_values)
            .map(|(&r, &h)| if r == 0.0 { self.hr_values[0] } else { h / r })
            .collect()
    }

    /// Least-squares intercept of `(h² − r²)/r⁴ ≈ a + b r` over nodes with
    /// `r ∈ [lo, hi]`; tends to `−K(0)/3`.
    pub fn quartic_coefficient(&self, lo: f64, hi: f64) -> Result<f64> {
        let pts: Vec<(f64, f64)> = self
            .grid
            .iter()
            .zip(&self.h_values)
            .filter(|(r, _)| **r >= lo && **r <= hi && **r > 0.0)
            .map(|(&r, &h)| (r, (h * h - r * r) / (r * r * r * r)))
            .collect();
        if pts.len() < 3 {
            return Err(Error::Range("fewer than three nodes in the fit window"));
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        Ok(my - slope * mx)
    }
}

fn quintic_hermite(t: f64, y0: [f64; 3], y1: [f64; 3]) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h5 = 0.5 * (t3 - 2.0 * t4 + t5);
    h0 * y0[0] + h1 * y0[1] + h2 * y0[2] + h3 * y1[0] + h4 * y1[1] + h5 * y1[2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{BoundaryFunction, GeometryConstants, LogLogRadius};

    #[test]
    fn flat_and_sphere_oracle() {
        let flat = ModelMetric::flat_baseline();
        let v = fd_scalar(&flat, [0.5, 1.0, 2.0], 1e-4).unwrap();
        assert!(v.abs() < 1e-5, "{v}");
        let s3 = ModelMetric::RoundS3Baseline;
        let v = fd_scalar(&s3, [0.7, 0.2, 1.0], 1e-4).unwrap();
        assert!((v - 6.0).abs() < 1e-4, "{v}");
    }

    #[test]
    fn prototype_limits() {
        assert_eq!(prototype_scalar(0.3, 0.0, 0.0).unwrap(), 0.0);
        assert!(prototype_scalar(1e-3, 0.01, 0.1).unwrap() > 0.0);
        assert!(prototype_scalar(0.5, 1.0, 0.0).is_err());
        let proto = ModelMetric::prototype(0.01, 0.1).unwrap();
        for &r in &[1e-4, 1e-3, 1e-2, 0.1] {
            let a = prototype_scalar(r, 0.01, 0.1).unwrap();
            let b = warped_scalar(&proto, [r, 0.0, 0.0]).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs(), "r={r}");
        }
    }

    #[test]
    fn af_closed_forms_agree() {
        for &m in &[0.05, 0.1, 0.2] {
            let model = ModelMetric::af_cap(m).unwrap();
            for &r in &[0.1, 0.25, 0.6, 0.8, 0.95, 2.0] {
                let a = af_scalar_identity(m, r).unwrap();
                let b = warped_scalar(&model, [r, core::f64::consts::FRAC_PI_2, 0.0]).unwrap();
                assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()), "m={m} r={r}");
            }
        }
        assert!((af_scalar_identity(0.1, 0.25).unwrap() - 1.2).abs() < 1e-12);
        assert_eq!(af_scalar_identity(0.1, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn mean_curvature_of_trivial_tube() {
        let p = DrawstringProfile::trivial(GeometryConstants::flat_torus(1.0), 0.2).unwrap();
        let m = ModelMetric::flat_torus(p, 1.0).unwrap();
        assert!((mean_curvature_prime(&m, 0.1, 0.0).unwrap() - 10.0).abs() < 1e-12);
        assert!(mean_curvature_prime(&m, 0.0, 0.0).is_err());
    }

    #[test]
    fn gauss_identity_on_baselines() {
        let flat = ModelMetric::flat_baseline();
        assert!(gauss_consistency(&flat, 0.3, 0.0, 1e-3).unwrap() < 1e-5);
        let s3 = ModelMetric::RoundS3Baseline;
        assert!(gauss_consistency(&s3, 0.4, 0.0, 1e-3).unwrap() < 1e-5);
    }

    #[test]
    fn drawstring_closed_form_matches_oracle() {
        let consts = GeometryConstants::flat_torus(1.0);
        let v0 = BoundaryFunction::constant(-1.0).unwrap();
        let core = LogLogRadius::from_radius(2e-4).unwrap();
        let p = DrawstringProfile::normalized(consts, v0, 0.01, 0.2, core, 0.05).unwrap();
        let flat = ModelMetric::flat_torus(p.clone(), 1.0).unwrap();
        let s3 = ModelMetric::round_s3(p);
        for model in [&flat, &s3] {
            for &r in &[5e-5, 1.3e-4, 6e-4, 3e-3, 0.011, 0.03, 0.07, 0.13] {
                let x = [r, 0.0, 0.0];
                let step = default_step(r);
                let a = warped_scalar(model, x).unwrap();
                let b = fd_scalar_richardson(model, x, step).unwrap();
                assert!((a - b).abs() <= 1e-3 * a.abs().max(1e-3), "r={r} {a} {b}");
            }
        }
    }

    #[test]
    fn jacobi_constant_curvature() {
        let sol = jacobi_solve(&|_| 1.0, 1.0, 1024).unwrap();
        assert!((sol.eval(0.5).unwrap() - 0.5f64.sin()).abs() < 1e-8);
        let flat = jacobi_solve(&|_| 0.0, 1.0, 1024).unwrap();
        for &r in &[0.0, 0.3, 0.77, 1.0] {
            assert!((flat.eval(r).unwrap() - r).abs() < 1e-10);
        }
        let ratio = sol.h_over_r();
        assert!((ratio[0] - 1.0).abs() < 1e-6 && (ratio[1] - 1.0).abs() < 1e-6);
        let a = sol.quartic_coefficient(0.01, 0.1).unwrap();
        assert!((a + 1.0 / 3.0).abs() < 0.05 / 3.0);
    }
}
