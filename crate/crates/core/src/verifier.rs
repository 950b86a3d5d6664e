//! Numerical checks of the drawstring estimates, reported with margins.
//!
//! Every check evaluates `LHS − RHS` of one inequality over a deterministic
//! grid and records the smallest margin together with the points where the
//! margin drops below `−tolerance`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::curvature::{self, TubeBase};
use crate::error::{Error, Result};
use crate::math;
use crate::models::{vm_eval, ModelMetric};
use crate::profile::{
    core_radius_cap, r1_cap, rate_threshold, slope_cap, BoundaryFunction, DrawstringProfile,
    GeometryConstants, RadialJet, RadialPoint,
};
use crate::quad;

use core::f64::consts::PI;

/// At most this many violations are stored per report; the total is counted.
pub const MAX_RECORDED_VIOLATIONS: usize = 64;

/// Smallest radius placed on radial grids.
pub const GRID_FLOOR: f64 = 1e-300;

/// Where a margin was evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Radius(f64),
    /// A radius below the `f64` range, given by `ln ln(1/r)`.
    LogLog(f64),
    /// Member `index` of a sequence of profiles, at a radial point.
    Member { index: usize, point: RadialPoint },
    Pair(usize, usize),
    Index(usize),
    /// A scalar statement with no grid.
    Global,
}

impl From<RadialPoint> for Location {
    fn from(p: RadialPoint) -> Self {
        match p {
            RadialPoint::Radius(r) => Location::Radius(r),
            RadialPoint::LogLog(t) => Location::LogLog(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub location: Location,
    pub margin: f64,
}

/// Result of one check.
///
/// `passed` holds exactly when no violation was found, which is when
/// `worst_margin ≥ −tolerance` (or `> 0` for strict checks).
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub check_id: String,
    pub grid_spec: String,
    pub n_points: usize,
    pub worst_margin: f64,
    pub worst_location: Option<Location>,
    pub tolerance: f64,
    pub strict: bool,
    pub violations: Vec<Violation>,
    pub violation_count: usize,
    pub passed: bool,
    pub params: Vec<(String, f64)>,
}

/// Accumulates margins into a [`VerificationReport`].
#[derive(Debug, Clone)]
pub struct MarginTracker {
    tolerance: f64,
    strict: bool,
    n_points: usize,
    worst: f64,
    worst_location: Option<Location>,
    violations: Vec<Violation>,
    violation_count: usize,
}

impl MarginTracker {
    /// Violation when `margin < −tolerance`.
    pub fn new(tolerance: f64) -> Self {
        MarginTracker {
            tolerance,
            strict: false,
            n_points: 0,
            worst: f64::INFINITY,
            worst_location: None,
            violations: Vec::new(),
            violation_count: 0,
        }
    }

    /// Violation when `margin ≤ 0`.
    pub fn strict() -> Self {
        MarginTracker {
            strict: true,
            ..Self::new(0.0)
        }
    }

    pub fn is_violation(&self, margin: f64) -> bool {
        if margin.is_nan() {
            return true;
        }
        if self.strict {
            margin <= 0.0
        } else {
            margin < -self.tolerance
        }
    }

    pub fn push(&mut self, location: Location, margin: f64) {
        self.n_points += 1;
        if margin < self.worst || (margin.is_nan() && !self.worst.is_nan()) || self.worst_location.is_none() {
            self.worst = margin;
            self.worst_location = Some(location);
        }
        if self.is_violation(margin) {
            self.violation_count += 1;
            if self.violations.len() < MAX_RECORDED_VIOLATIONS {
                self.violations.push(Violation { location, margin });
            }
        }
    }

    pub fn finish(self, check_id: &str, grid_spec: &str, params: Vec<(String, f64)>) -> VerificationReport {
        VerificationReport {
            check_id: check_id.into(),
            grid_spec: grid_spec.into(),
            n_points: self.n_points,
            worst_margin: self.worst,
            worst_location: self.worst_location,
            tolerance: self.tolerance,
            strict: self.strict,
            passed: self.violation_count == 0,
            violations: self.violations,
            violation_count: self.violation_count,
            params,
        }
    }
}

/// Deterministic set of radial evaluation points.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub points: Vec<RadialPoint>,
    pub spec: String,
}

impl RadialGrid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points with radius at most `r_max` (deep points are always kept).
    pub fn below(&self, r_max: f64) -> RadialGrid {
        RadialGrid {
            points: self
                .points
                .iter()
                .copied()
                .filter(|p| match p {
                    RadialPoint::Radius(r) => *r <= r_max,
                    RadialPoint::LogLog(_) => true,
                })
                .collect(),
            spec: format!("{}; r <= {:e}", self.spec, r_max),
        }
    }

    /// Points with radius at least `r_min`.
    pub fn above(&self, r_min: f64) -> RadialGrid {
        RadialGrid {
            points: self
                .points
                .iter()
                .copied()
                .filter(|p| matches!(p, RadialPoint::Radius(r) if *r >= r_min))
                .collect(),
            spec: format!("{}; r >= {:e}", self.spec, r_min),
        }
    }
}

/// Radial grid for a profile: the axis, `n` log-spaced radii in
/// `[r_lo, r_hi]`, every representable cutoff breakpoint with relative
/// offsets `±1e-9` and `±1e-6`, and, when the core radius lies below the
/// `f64` range, `n/5` points log-spaced in `ln ln(1/r)` across the
/// logarithmic middle region.
pub fn radial_grid(profile: &DrawstringProfile, n: usize, r_hi: f64) -> RadialGrid {
    let r2 = profile.core_radius().radius();
    let r_lo = (r2 * 1e-3).max(GRID_FLOOR).min(r_hi);
    let mut radii = math::log_space(r_lo, r_hi, n.max(2));
    for b in profile.breakpoints() {
        for k in [0.0, 1e-9, -1e-9, 1e-6, -1e-6] {
            let r = b * (1.0 + k);
            if r >= r_lo && r <= r_hi {
                radii.push(r);
            }
        }
    }
    radii.push(0.0);
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let mut points: Vec<RadialPoint> = radii.iter().map(|r| RadialPoint::Radius(*r)).collect();
    let mut spec = format!("axis + {} log radii in [{:e}, {:e}] + breakpoints", n, r_lo, r_hi);
    let (tau_out, tau_core) = profile.middle_loglog_range();
    let tau_lo = tau_out.max(math::loglog_inv(GRID_FLOOR));
    if tau_core > tau_lo && r_hi >= profile.outer_radius() / 8.0 {
        let m = (n / 5).max(2);
        for tau in math::log_space(tau_lo, tau_core, m) {
            points.push(RadialPoint::LogLog(tau));
        }
        spec = format!("{spec} + {m} loglog points in [{tau_lo:e}, {tau_core:e}]");
    }
    RadialGrid { points, spec }
}

/// `ln ln(1/r)` of a jet, `+∞` on the axis.
fn jet_loglog(jet: &RadialJet) -> f64 {
    if jet.radius == 0.0 && jet.loglog.is_finite() {
        jet.loglog
    } else if jet.radius == 0.0 {
        f64::INFINITY
    } else {
        math::loglog_inv(jet.radius)
    }
}

/// `ln r` of a jet, finite for deep points as `−e^τ` when representable.
fn jet_log_radius(jet: &RadialJet) -> f64 {
    if jet.radius > 0.0 {
        math::ln(jet.radius)
    } else {
        -jet.log_inv
    }
}

fn profile_params(profile: &DrawstringProfile) -> Vec<(String, f64)> {
    alloc::vec![
        ("eps".into(), profile.eps()),
        ("r1".into(), profile.outer_radius()),
        ("r2_loglog".into(), profile.core_radius().loglog()),
        ("c1".into(), profile.h_amplitude()),
        ("c2".into(), profile.w_slope()),
        ("v0_min".into(), profile.v0().min_value()),
    ]
}

/// Outcome of [`check_condition`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub reports: Vec<VerificationReport>,
}

impl ConditionReport {
    fn group_passed(&self, prefix: &str) -> bool {
        self.reports
            .iter()
            .filter(|r| r.check_id.starts_with(prefix))
            .all(|r| r.passed)
    }

    /// Pointwise conditions on `h`, `u` and `w`.
    pub fn condition_passed(&self) -> bool {
        self.group_passed("condition.")
    }

    /// Parameter-selection inequalities and the profile properties.
    pub fn parameters_passed(&self) -> bool {
        self.group_passed("params.") && self.group_passed("profile.")
    }

    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }

    pub fn get(&self, check_id: &str) -> Option<&VerificationReport> {
        self.reports.iter().find(|r| r.check_id == check_id)
    }
}

/// Points of the `c1` window `[r1/4, r1]` for the `h` estimates.
pub const WINDOW_POINTS: usize = 10_001;

/// Evaluates the pointwise conditions and the parameter inequalities.
///
/// Pointwise checks use [`radial_grid`] with `10⁴` log radii up to `r_I`
/// (and the middle region in `ln ln(1/r)`), for every sample of `v0`.
pub fn check_condition(profile: &DrawstringProfile) -> ConditionReport {
    check_condition_on(profile, &radial_grid(profile, 10_000, profile.consts().tube_radius.max(profile.outer_radius())))
}

pub fn check_condition_on(profile: &DrawstringProfile, grid: &RadialGrid) -> ConditionReport {
    let consts = profile.consts();
    let v0 = profile.v0();
    let eps = profile.eps();
    let r1 = profile.outer_radius();
    let c1 = profile.h_amplitude();
    let c2 = profile.w_slope();
    let n = consts.dim as f64;
    let p = consts.warp_exponent();
    let sigmas = v0.sample_params();
    let spec = grid.spec.as_str();
    let params = profile_params(profile);
    let mut reports = Vec::new();

    let jets: Vec<(Location, RadialJet)> = grid
        .points
        .iter()
        .filter_map(|pt| profile.jet_at(*pt).ok().map(|j| (Location::from(*pt), j)))
        .collect();

    let mut h_bounds = MarginTracker::new(0.0);
    let mut u_sign = MarginTracker::new(0.0);
    let mut w_bound = MarginTracker::new(0.0);
    let mut weight = MarginTracker::new(1e-12);
    let mut h_range = MarginTracker::new(1e-15);
    let mut w_range = MarginTracker::new(1e-12);
    let mut w_loglog = MarginTracker::new(1e-10);
    let mut exp_weight = MarginTracker::new(1e-12);
    for (loc, jet) in &jets {
        let h = jet.h();
        h_bounds.push(*loc, (h - 0.5).min(2.0 - h));
        w_bound.push(*loc, 1.0 - math::abs(jet.w));
        h_range.push(*loc, (h - (1.0 - r1)).min(1.0 - h));
        w_range.push(*loc, jet.w.min(1.0 - jet.w));
        let inside = jet.radius <= r1;
        let off_axis = jet.loglog != f64::INFINITY;
        if inside && off_axis {
            let tau = jet_loglog(jet);
            w_loglog.push(*loc, c2 * (tau - math::loglog_inv(r1)) - jet.w);
        }
        for &sigma in &sigmas {
            let u = v0.at(sigma) * jet.w;
            u_sign.push(*loc, -u);
            if inside && off_axis {
                // r e^{-2nu} ≤ 1, compared in logarithms.
                let log_lhs = jet_log_radius(jet) - 2.0 * n * u;
                weight.push(*loc, -math::expm1(log_lhs.min(700.0)));
                exp_weight.push(*loc, p * u + r1 * jet_loglog(jet));
            }
        }
    }
    reports.push(h_bounds.finish("condition.h_bounds", spec, params.clone()));
    reports.push(u_sign.finish("condition.u_nonpositive", spec, params.clone()));
    reports.push(w_bound.finish("condition.w_bounded", spec, params.clone()));
    reports.push(weight.finish("condition.radius_weight", spec, params.clone()));

    // Outer radius.
    let mut cap = MarginTracker::strict();
    cap.push(Location::Global, r1_cap(consts, eps) - r1);
    cap.push(Location::Global, 0.01_f64.min(consts.tube_radius).min(eps) - r1);
    reports.push(cap.finish("params.outer_radius.cap", "scalar", params.clone()));
    let mut logs = MarginTracker::strict();
    logs.push(Location::Global, math::log_inv(r1) - 4.0);
    logs.push(Location::Global, math::loglog_inv(r1));
    reports.push(logs.finish("params.outer_radius.log_bounds", "scalar", params.clone()));
    reports.push(rate_report(profile, &params));

    // Amplitudes and core radius.
    reports.push(window_report(profile, &params));
    let mut amp = MarginTracker::strict();
    amp.push(Location::Global, r1.min(0.01) - c1);
    reports.push(amp.finish("params.h_amplitude", "scalar", params.clone()));
    let cap2 = slope_cap(consts, r1, c1);
    let mut slope = MarginTracker::new(1e-12 * cap2);
    slope.push(Location::Global, cap2 - c2 * (1.0 + v0.sup_abs));
    reports.push(slope.finish("params.slope_cap", "scalar", params.clone()));
    let mut core = MarginTracker::strict();
    match crate::profile::LogLogRadius::from_radius(core_radius_cap(consts, v0, r1, c1)) {
        Ok(star) => core.push(Location::Global, profile.core_radius().loglog() - star.loglog()),
        Err(_) => core.push(Location::Global, f64::NAN),
    }
    reports.push(core.finish("params.core_radius", "loglog scalar", params.clone()));
    let mut norm = MarginTracker::new(0.0);
    norm.push(Location::Global, 1e-8 - math::abs(normalization_by_loglog(profile) - 1.0));
    reports.push(norm.finish("params.normalization", "quadrature in ln ln(1/r)", params.clone()));

    // Profile properties.
    reports.push(h_range.finish("profile.h_range", spec, params.clone()));
    reports.push(w_range.finish("profile.w_range", spec, params.clone()));
    reports.push(w_loglog.finish("profile.w_loglog", spec, params.clone()));
    let mut mono = MarginTracker::new(1e-12);
    let mut ordered: Vec<&(Location, RadialJet)> = jets.iter().collect();
    ordered.sort_by(|a, b| jet_loglog(&b.1).total_cmp(&jet_loglog(&a.1)));
    for pair in ordered.windows(2) {
        // Increasing radius, so w must not increase.
        mono.push(pair[1].0, pair[0].1.w - pair[1].1.w);
    }
    reports.push(mono.finish("profile.w_monotone", spec, params.clone()));
    let mut axis = MarginTracker::new(0.0);
    axis.push(Location::Radius(0.0), 1e-8 - math::abs(profile.w(0.0) - 1.0));
    reports.push(axis.finish("profile.w_axis", "axis", params.clone()));
    reports.push(exp_weight.finish("profile.exp_weight", spec, params));
    ConditionReport { reports }
}

/// `1/(r^a ln(1/r)^b) > max{…}` for `r ≤ r1` and the four corners of
/// `(a, b) ∈ [1/2, 2] × [1, 5]`, in logarithms.
fn rate_report(profile: &DrawstringProfile, params: &[(String, f64)]) -> VerificationReport {
    let r1 = profile.outer_radius();
    let log_t = math::ln(rate_threshold(profile.consts(), profile.v0()));
    let mut rate = MarginTracker::strict();
    let taus_hi = math::loglog_inv(GRID_FLOOR);
    let mut logs: Vec<f64> = math::log_space(GRID_FLOOR, r1, 2000)
        .into_iter()
        .map(math::log_inv)
        .collect();
    logs.extend(math::log_space(taus_hi, 700.0, 200).into_iter().map(math::exp));
    for s in logs {
        for (a, b) in [(0.5, 1.0), (0.5, 5.0), (2.0, 1.0), (2.0, 5.0)] {
            rate.push(Location::LogLog(math::ln(s)), a * s - b * math::ln(s) - log_t);
        }
    }
    rate.finish(
        "params.outer_radius.rate",
        "2000 log radii in [1e-300, r1] + 200 loglog points, 4 exponent corners",
        params.to_vec(),
    )
}

/// The three `h` estimates on `[r1/4, r1]` against `ε/3`.
fn window_report(profile: &DrawstringProfile, params: &[(String, f64)]) -> VerificationReport {
    let consts = profile.consts();
    let [k1, _, k3, _, _] = consts.error_coeffs;
    let r1 = profile.outer_radius();
    let third = profile.eps() / 3.0;
    let mut t = MarginTracker::new(1e-12 * third);
    for i in 0..WINDOW_POINTS {
        let r = r1 / 4.0 + 0.75 * r1 * i as f64 / (WINDOW_POINTS - 1) as f64;
        let jet = profile.jet(r);
        let h = jet.h();
        let hr = jet.r_hr() / r;
        let hrr = jet.r2_hrr() / (r * r);
        t.push(Location::Radius(r), -hrr / h - 2.0 * hr / (r * h) + third);
        t.push(Location::Radius(r), third - k1 * math::abs(hr));
        t.push(Location::Radius(r), third - k3 * jet.one_minus_h / r);
    }
    t.finish(
        "params.h_window",
        &format!("{WINDOW_POINTS} uniform radii in [r1/4, r1], three estimates each"),
        params.to_vec(),
    )
}

/// `I(r2)` by quadrature in `τ = ln ln(1/ρ)`, where `dρ/(ρ ln(1/ρ)) = −dτ`.
pub fn normalization_by_loglog(profile: &DrawstringProfile) -> f64 {
    let r1 = profile.outer_radius();
    let core = profile.core_radius();
    let zeta = profile.zeta();
    let eta = profile.eta();
    let tol = 1e-14;
    let outer_lo = math::loglog_inv(r1 / 4.0);
    let outer_hi = math::loglog_inv(r1 / 8.0);
    let outer = quad::adaptive_simpson(
        &|tau: f64| eta.value(4.0 * math::exp(-math::exp(tau)) / r1),
        outer_lo,
        outer_hi,
        tol,
    );
    let core_lo = core.scaled_loglog(4.0);
    let core_hi = core.scaled_loglog(2.0);
    let s4 = math::exp(core_lo);
    let window = if s4.is_finite() && core_hi > core_lo {
        quad::adaptive_simpson(
            &|tau: f64| zeta.value(math::exp(s4 - math::exp(tau))),
            core_lo,
            core_hi,
            tol,
        )
    } else {
        0.0
    };
    profile.w_slope() * (outer + (core_lo - outer_hi) + window)
}

fn constant_v0(profile: &DrawstringProfile) -> Result<f64> {
    profile.v0().constant_value().ok_or(Error::Parameter {
        name: "v0",
        reason: "closed-form curvature needs a constant boundary function",
    })
}

fn drawstring_parts(model: &ModelMetric) -> Result<(TubeBase, &DrawstringProfile)> {
    match (TubeBase::of(model), model.profile()) {
        (Some(base), Some(p)) => Ok((base, p)),
        _ => Err(Error::Parameter {
            name: "model",
            reason: "needs a drawstring preset",
        }),
    }
}

/// Deformed scalar curvature at a grid point of a drawstring preset.
pub fn scalar_at(model: &ModelMetric, point: RadialPoint) -> Result<f64> {
    let (base, profile) = drawstring_parts(model)?;
    let v0 = constant_v0(profile)?;
    let jet = profile.jet_at(point)?;
    Ok(curvature::drawstring_scalar(
        base,
        &jet,
        v0,
        profile.core_radius().radius(),
        profile.h_amplitude(),
    ))
}

/// `R_{g'} ≥ R_g − ε` on the grid, with tolerance `1e-9 (1 + |R_g|)`.
pub fn verify_scal_bound(model: &ModelMetric, eps: f64, grid: &RadialGrid) -> Result<VerificationReport> {
    verify_scal_floor(model, eps, grid, "scal_bound")
}

/// `R_{g'} ≥ R_g − slack` on the grid under the given check id.
pub fn verify_scal_floor(
    model: &ModelMetric,
    slack: f64,
    grid: &RadialGrid,
    check_id: &str,
) -> Result<VerificationReport> {
    let (base, profile) = drawstring_parts(model)?;
    let rg = base.scalar();
    let mut t = MarginTracker::new(1e-9 * (1.0 + math::abs(rg)));
    for pt in &grid.points {
        let r = scalar_at(model, *pt)?;
        t.push(Location::from(*pt), r - (rg - slack));
    }
    let mut params = profile_params(profile);
    params.push(("slack".into(), slack));
    Ok(t.finish(check_id, &grid.spec, params))
}

/// Radial distance estimate `∫₀^{r1} e^{−p u_min} dr ≤ 3 r1` and the
/// intermediate bound `∫₀^{r1} ln(1/r)^{r1} dr ≤ 2 r1 + r1²`.
pub fn verify_distance(profile: &DrawstringProfile) -> [VerificationReport; 2] {
    let r1 = profile.outer_radius();
    let p = profile.consts().warp_exponent();
    let sup = profile.v0().sup_abs;
    let tol = 1e-12 * r1;
    let lam_hi = math::ln(r1);
    let r2 = profile.core_radius().radius();
    let lam_lo = math::ln((2.0 * r2).max(GRID_FLOOR));
    let mut knots: Vec<f64> = profile
        .breakpoints()
        .into_iter()
        .filter(|b| *b > 0.0)
        .map(math::ln)
        .filter(|l| *l > lam_lo && *l < lam_hi)
        .collect();
    knots.insert(0, lam_lo);
    knots.push(lam_hi);
    let f = |lam: f64| {
        let r = math::exp(lam);
        math::exp(p * sup * profile.w(r) + lam)
    };
    let inner = math::exp(p * sup * profile.w(0.0) + lam_lo);
    let radial = quad::integrate_piecewise(&f, &knots, 1e-12 * r1) + inner;
    let mut main = MarginTracker::new(tol);
    main.push(Location::Global, 3.0 * r1 - radial);
    let mut params = profile_params(profile);
    params.push(("integral".into(), radial));
    let main = main.finish("distance.radial", "adaptive quadrature in ln r", params);

    let g = |lam: f64| math::exp(r1 * math::ln(-lam) + lam);
    let mut log_knots: Vec<f64> = [-800.0, -50.0, -10.0]
        .into_iter()
        .filter(|k| *k < lam_hi)
        .collect();
    log_knots.push(lam_hi);
    let bound = quad::integrate_piecewise(&g, &log_knots, 1e-12 * r1);
    let mut inter = MarginTracker::new(tol);
    inter.push(Location::Global, 2.0 * r1 + r1 * r1 - bound);
    let mut params = profile_params(profile);
    params.push(("integral".into(), bound));
    let inter = inter.finish("distance.log_power", "adaptive quadrature in ln r", params);
    [main, inter]
}

/// Tube volume `∫_{r ≤ r1} dV_{g'} ≤ 12π |Σ| r1²`.
///
/// The integrand is θ-independent, so the θ integral is `2π`; the `t`
/// integral is the periodic trapezoid rule over the samples of `v0`, and
/// the radial one adaptive quadrature in `ln r` of the volume element.
pub fn verify_volume(model: &ModelMetric) -> Result<VerificationReport> {
    let (_, profile) = drawstring_parts(model)?;
    let r1 = profile.outer_radius();
    let period = model.t_period();
    let sigmas = profile.v0().sample_params();
    let lam_hi = math::ln(r1);
    let lam_lo = math::ln(GRID_FLOOR);
    let mut knots: Vec<f64> = profile
        .breakpoints()
        .into_iter()
        .map(math::ln)
        .filter(|l| *l > lam_lo && *l < lam_hi)
        .collect();
    knots.insert(0, lam_lo);
    knots.push(lam_hi);
    let mut total = 0.0;
    for &t in &sigmas {
        let f = |lam: f64| {
            let r = math::exp(lam);
            model.volume_element([r, 0.0, t]).unwrap_or(f64::NAN) * r
        };
        total += quad::integrate_piecewise(&f, &knots, 1e-12 * r1 * r1);
    }
    let volume = 2.0 * PI * period * total / sigmas.len() as f64;
    let bound = 12.0 * PI * profile.consts().sigma_area * r1 * r1;
    let mut t = MarginTracker::new(1e-12 * bound);
    t.push(Location::Global, bound - volume);
    let mut params = profile_params(profile);
    params.push(("volume".into(), volume));
    params.push(("bound".into(), bound));
    params.push(("t_period".into(), period));
    Ok(t.finish(
        "volume",
        &format!("quadrature in ln r x 2pi x {} t samples", sigmas.len()),
        params,
    ))
}

/// `H' ≥ 1/(4 r ln(1/r))` on `(0, r1]`, checked as `r H' − 1/(4 ln(1/r)) ≥ 0`.
pub fn verify_mean_convexity(model: &ModelMetric, grid: &RadialGrid) -> Result<VerificationReport> {
    let (base, profile) = drawstring_parts(model)?;
    let r1 = profile.outer_radius();
    let v0 = profile.v0();
    let sigmas = v0.sample_params();
    let mut t = MarginTracker::new(1e-12);
    for pt in &grid.points {
        let jet = profile.jet_at(*pt)?;
        if jet.loglog == f64::INFINITY || jet.radius > r1 {
            continue;
        }
        let floor = if jet.log_inv.is_finite() {
            0.25 / jet.log_inv
        } else {
            0.0
        };
        for &sigma in &sigmas {
            let rh = curvature::scaled_mean_curvature(base, &jet, v0.at(sigma));
            t.push(Location::from(*pt), rh - floor);
        }
    }
    Ok(t.finish(
        "mean_convexity",
        &format!("{}; scaled by r", grid.spec),
        profile_params(profile),
    ))
}

/// Profile for the `i`-th member of the round-sphere sequence:
/// `v0 ≡ −i`, `ε = 1/(100 i)`.
pub fn llarull_profile(i: usize) -> Result<DrawstringProfile> {
    let i = i.max(1) as f64;
    DrawstringProfile::build(
        GeometryConstants::round_s3(),
        BoundaryFunction::constant(-i)?,
        1.0 / (100.0 * i),
    )
}

/// Relative eigenvalues `{e^{−2u} h, 1, h} ≥ 1 − 1/(100 i)` and
/// `R ≥ 6 − 1/i` along a sequence of round-sphere drawstrings.
pub fn verify_llarull(sequence: &[(usize, DrawstringProfile)], n: usize) -> Result<[VerificationReport; 2]> {
    let mut eig = MarginTracker::new(1e-15);
    let mut scal = MarginTracker::new(1e-9 * 7.0);
    let mut params = Vec::new();
    for (i, profile) in sequence {
        let i = *i;
        let model = ModelMetric::round_s3(profile.clone());
        let v0 = constant_v0(profile)?;
        let grid = radial_grid(profile, n, profile.consts().tube_radius);
        let floor_eig = 1.0 - 1.0 / (100.0 * i as f64);
        let floor_scal = 6.0 - 1.0 / i as f64;
        for pt in &grid.points {
            let jet = profile.jet_at(*pt)?;
            let h = jet.h();
            let u = v0 * jet.w;
            let lowest = (math::exp(-2.0 * u) * h).min(1.0).min(h);
            eig.push(Location::Member { index: i, point: *pt }, lowest - floor_eig);
            let r = scalar_at(&model, *pt)?;
            scal.push(Location::Member { index: i, point: *pt }, r - floor_scal);
        }
        params.push((format!("r1_{i}"), profile.outer_radius()));
    }
    let spec = format!("radial_grid with {n} log radii per member");
    Ok([
        eig.finish("llarull.eigenvalues", &spec, params.clone()),
        scal.finish("llarull.scalar", &spec, params),
    ])
}

/// Breakpoints of the AF cutoff, excluded from the oracle comparison.
pub const AF_BREAKPOINTS: [f64; 3] = [0.5, 0.75, 1.0];

/// Checks on the asymptotically flat cap of mass `m`:
/// the curvature identity against the oracle on `[0.05, 3]` (relative
/// `1e-3`, absolute floor `1e-5`), `R ≥ −1e-9`, and `2√V/r > 0`.
pub fn verify_af(m: f64, n: usize) -> Result<[VerificationReport; 3]> {
    vm_eval(m, 1.0, 0)?;
    let model = ModelMetric::af_cap(m)?;
    let n = n.max(2);
    let grid = math::lin_space(0.05, 3.0, n);
    let mut ident = MarginTracker::new(0.0);
    let mut nonneg = MarginTracker::new(1e-9);
    let mut mean = MarginTracker::strict();
    for &r in &grid {
        let step = curvature::default_step(r);
        let closed = curvature::af_scalar_identity(m, r)?;
        let near_break = AF_BREAKPOINTS.iter().any(|b| math::abs(r - b) <= 4.0 * step);
        if !near_break {
            let oracle = curvature::fd_scalar_richardson(&model, [r, PI / 2.0, 0.0], step)?;
            let scale = math::abs(closed).max(1e-2);
            ident.push(Location::Radius(r), 1e-3 * scale - math::abs(oracle - closed));
        }
        let warped = curvature::warped_scalar(&model, [r, PI / 2.0, 0.0])?;
        nonneg.push(Location::Radius(r), warped.min(closed));
        let v = vm_eval(m, r, 0)?;
        mean.push(Location::Radius(r), 2.0 * math::sqrt(v.max(0.0)) / r);
    }
    // The cap near its centre, where the identity reads R = 12 m.
    for r in math::log_space(1e-6, 0.05, 32) {
        let warped = curvature::warped_scalar(&model, [r, PI / 2.0, 0.0])?;
        nonneg.push(Location::Radius(r), warped);
    }
    let spec = format!("{n} uniform radii in [0.05, 3]");
    let params: Vec<(String, f64)> = alloc::vec![("m".into(), m)];
    Ok([
        ident.finish("af.identity", &spec, params.clone()),
        nonneg.finish("af.nonnegative", &spec, params.clone()),
        mean.finish("af.mean_curvature", &spec, params),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::LogLogRadius;

    fn flat_profile() -> DrawstringProfile {
        DrawstringProfile::build(
            GeometryConstants::flat_torus(1.0),
            BoundaryFunction::constant(-1.0).unwrap(),
            0.01,
        )
        .unwrap()
    }

    #[test]
    fn tracker_semantics() {
        let mut t = MarginTracker::new(0.1);
        t.push(Location::Index(0), 0.5);
        t.push(Location::Index(1), -0.05);
        let r = t.finish("x", "", Vec::new());
        assert!(r.passed && r.worst_margin == -0.05 && r.n_points == 2);
        let mut t = MarginTracker::strict();
        t.push(Location::Index(0), 0.0);
        let r = t.finish("x", "", Vec::new());
        assert!(!r.passed && r.violation_count == 1);
        let mut t = MarginTracker::new(0.0);
        t.push(Location::Index(0), f64::NAN);
        assert!(!t.finish("x", "", Vec::new()).passed);
    }

    #[test]
    fn selected_profile_satisfies_everything() {
        let p = flat_profile();
        let rep = check_condition(&p);
        for r in &rep.reports {
            assert!(r.passed, "{} {:?}", r.check_id, r.violations.first());
        }
    }

    #[test]
    fn normalization_routes_agree() {
        let p = flat_profile();
        assert!((normalization_by_loglog(&p) - p.normalization_integral()).abs() < 1e-12);
        let desk = DrawstringProfile::normalized(
            GeometryConstants::flat_torus(1.0),
            BoundaryFunction::constant(-1.0).unwrap(),
            0.01,
            0.2,
            LogLogRadius::from_radius(2e-4).unwrap(),
            0.05,
        )
        .unwrap();
        assert!((normalization_by_loglog(&desk) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn oversized_amplitude_is_reported() {
        let good = flat_profile();
        let mut params = *good.params();
        params.h_amplitude = 0.9;
        let bad = DrawstringProfile::from_params(
            good.consts().clone(),
            good.v0().clone(),
            good.eps(),
            params,
        )
        .unwrap();
        let rep = check_condition(&bad);
        assert!(!rep.passed());
        assert!(!rep.get("params.h_amplitude").unwrap().passed);
    }

    #[test]
    fn trivial_profile_meets_pointwise_conditions() {
        let p = DrawstringProfile::trivial(GeometryConstants::flat_torus(1.0), 0.005).unwrap();
        assert!(check_condition(&p).condition_passed());
        let model = ModelMetric::flat_torus(p.clone(), 1.0).unwrap();
        let grid = radial_grid(&p, 200, 0.009);
        let rep = verify_scal_floor(&model, 0.0, &grid, "scal").unwrap();
        assert_eq!(rep.worst_margin, 0.0);
        let [d, _] = verify_distance(&p);
        assert!((d.params.last().unwrap().1 - 0.005).abs() < 1e-12);
        let v = verify_volume(&model).unwrap();
        let vol = v.params.iter().find(|x| x.0 == "volume").unwrap().1;
        assert!((vol - PI * 0.005 * 0.005).abs() < 1e-12);
    }

    #[test]
    fn flat_suite_passes() {
        let p = flat_profile();
        let model = ModelMetric::flat_torus(p.clone(), 1.0).unwrap();
        let grid = radial_grid(&p, 2000, p.consts().tube_radius);
        assert!(verify_scal_bound(&model, 0.01, &grid).unwrap().passed);
        let inner = grid.below(p.outer_radius() / 4.0);
        assert!(verify_scal_floor(&model, 0.0, &inner, "inner").unwrap().passed);
        let outer = grid.above(p.outer_radius());
        assert_eq!(verify_scal_floor(&model, 0.0, &outer, "outer").unwrap().worst_margin, 0.0);
        for r in verify_distance(&p) {
            assert!(r.passed, "{r:?}");
        }
        assert!(verify_volume(&model).unwrap().passed);
        assert!(verify_mean_convexity(&model, &grid).unwrap().passed);
    }

    #[test]
    fn af_checks_pass() {
        for m in [0.05, 0.1, 0.2] {
            let reps = verify_af(m, 300).unwrap();
            for r in &reps {
                assert!(r.passed, "m={m} {} {:?}", r.check_id, r.violations.first());
            }
        }
        assert!(verify_af(0.3, 10).is_err());
    }
}
