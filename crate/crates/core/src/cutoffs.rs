//! Transition functions on the window `[1/2, 1]`.
//!
//! The rising cutoff is 0 on `[0, 1/2]` and 1 on `[1, ∞)`; the falling cutoff
//! is its complement. The default variant is the piecewise-quadratic ramp
//! whose slope is a triangle of peak 4, so it meets `0 ≤ ζ' ≤ 4` and
//! `|ζ''| ≤ 16` with equality. The mollified variant is `C^∞` and trades a
//! slack `κ` in both bounds for the extra smoothness.

use crate::error::{Error, Result};
use crate::math;
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffKind {
    RisingZeta,
    FallingEta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    C2PiecewiseQuadratic,
    MollifiedSmooth,
}

/// Slack used by [`make_cutoff`] for the mollified variant.
pub const DEFAULT_SLACK: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffFn {
    kind: CutoffKind,
    smoothness: Smoothness,
    slack: f64,
    /// Half-width of the mollifier (0 for the quadratic ramp).
    half_width: f64,
}

pub fn make_cutoff(kind: CutoffKind, smoothness: Smoothness) -> CutoffFn {
    match smoothness {
        Smoothness::C2PiecewiseQuadratic => CutoffFn {
            kind,
            smoothness,
            slack: 0.0,
            half_width: 0.0,
        },
        Smoothness::MollifiedSmooth => CutoffFn::mollified(kind, DEFAULT_SLACK),
    }
}

impl CutoffFn {
    pub fn rising() -> Self {
        make_cutoff(CutoffKind::RisingZeta, Smoothness::C2PiecewiseQuadratic)
    }

    pub fn falling() -> Self {
        make_cutoff(CutoffKind::FallingEta, Smoothness::C2PiecewiseQuadratic)
    }

    /// `C^∞` cutoff whose derivative bounds are relaxed by `slack > 0`.
    ///
    /// The quadratic ramp is squeezed onto `[1/2 + δ, 1 − δ]` and convolved
    /// with a bump of half-width `δ`, where `1 − 4δ = 4/√(16 + κ)`.
    pub fn mollified(kind: CutoffKind, slack: f64) -> Self {
        let slack = if slack > 0.0 { slack } else { DEFAULT_SLACK };
        let half_width = 0.25 * (1.0 - 4.0 / math::sqrt(16.0 + slack));
        CutoffFn {
            kind,
            smoothness: Smoothness::MollifiedSmooth,
            slack,
            half_width,
        }
    }

    pub fn kind(&self) -> CutoffKind {
        self.kind
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn slack(&self) -> f64 {
        self.slack
    }

    /// Bound on `|f'|`.
    pub fn slope_bound(&self) -> f64 {
        4.0 + self.slack
    }

    /// Bound on `|f''|`.
    pub fn curvature_bound(&self) -> f64 {
        16.0 + self.slack
    }

    /// Points of `[1/2, 1]` where the second derivative may jump.
    pub fn breakpoints(&self) -> &'static [f64] {
        match self.smoothness {
            Smoothness::C2PiecewiseQuadratic => &[0.5, 0.75, 1.0],
            Smoothness::MollifiedSmooth => &[],
        }
    }

    /// The `order`-th derivative at `t`, for `order` in `{0, 1, 2}`.
    pub fn eval(&self, t: f64, order: u8) -> Result<f64> {
        match order {
            0 => Ok(self.value(t)),
            1 => Ok(self.d1(t)),
            2 => Ok(self.d2(t)),
            _ => Err(Error::InvalidOrder {
                what: "cutoff",
                order,
            }),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let rising = self.rising_jet(t, 0);
        match self.kind {
            CutoffKind::RisingZeta => rising,
            CutoffKind::FallingEta => 1.0 - rising,
        }
    }

    pub fn d1(&self, t: f64) -> f64 {
        self.signed(self.rising_jet(t, 1))
    }

    pub fn d2(&self, t: f64) -> f64 {
        self.signed(self.rising_jet(t, 2))
    }

    fn signed(&self, v: f64) -> f64 {
        match self.kind {
            CutoffKind::RisingZeta => v,
            CutoffKind::FallingEta => -v,
        }
    }

    fn rising_jet(&self, t: f64, order: u8) -> f64 {
        if t <= 0.5 {
            return 0.0;
        }
        if t >= 1.0 {
            return if order == 0 { 1.0 } else { 0.0 };
        }
        match self.smoothness {
            Smoothness::C2PiecewiseQuadratic => ramp(t, 0.5, 0.5, order),
            Smoothness::MollifiedSmooth => self.mollified_jet(t, order),
        }
    }

    fn mollified_jet(&self, t: f64, order: u8) -> f64 {
        let d = self.half_width;
        let start = 0.5 + d;
        let width = 0.5 - 2.0 * d;
        // Convolution ∫ ramp(t − y) bump(y) dy, split where the ramp has kinks.
        let mut knots = [
            -d,
            t - start - width,
            t - start - 0.5 * width,
            t - start,
            d,
        ];
        for k in knots.iter_mut() {
            *k = k.clamp(-d, d);
        }
        knots.sort_by(f64::total_cmp);
        let integrand = |y: f64| ramp(t - y, start, width, order) * bump(y, d);
        quad::integrate_piecewise(&integrand, &knots, 1e-14) / bump_mass(d)
    }
}

/// Quadratic ramp from 0 at `start` to 1 at `start + width`, with slope a
/// triangle peaking at the midpoint.
fn ramp(t: f64, start: f64, width: f64, order: u8) -> f64 {
    let x = (t - start) / width;
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    let (v, d1, d2) = if x <= 0.5 {
        (2.0 * x * x, 4.0 * x, 4.0)
    } else {
        let y = 1.0 - x;
        (1.0 - 2.0 * y * y, 4.0 * y, -4.0)
    };
    match order {
        0 => v,
        1 => d1 / width,
        _ => d2 / (width * width),
    }
}

fn bump(y: f64, d: f64) -> f64 {
    let z = y / d;
    if z * z >= 1.0 {
        0.0
    } else {
        math::exp(-1.0 / (1.0 - z * z))
    }
}

fn bump_mass(d: f64) -> f64 {
    quad::adaptive_simpson(&|y: f64| bump(y, d), -d, d, 1e-15)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_regions_are_exact() {
        let z = CutoffFn::rising();
        let e = CutoffFn::falling();
        assert_eq!(z.value(0.5), 0.0);
        assert_eq!(z.value(1.0), 1.0);
        assert_eq!(e.value(0.25), 1.0);
        assert_eq!(e.value(2.0), 0.0);
        assert_eq!(z.eval(0.3, 1).unwrap(), 0.0);
        assert_eq!(e.eval(1.5, 0).unwrap(), 0.0);
    }

    #[test]
    fn midpoint_value_and_peak_slope() {
        let z = CutoffFn::rising();
        assert!((z.value(0.75) - 0.5).abs() < 1e-15);
        assert!((z.eval(0.75, 1).unwrap() - 4.0).abs() < 1e-12);
        assert!((z.d2(0.6) - 16.0).abs() < 1e-12);
        assert!((z.d2(0.9) + 16.0).abs() < 1e-12);
    }

    #[test]
    fn order_three_is_rejected() {
        let err = CutoffFn::rising().eval(0.7, 3).unwrap_err();
        assert!(matches!(err, Error::InvalidOrder { order: 3, .. }));
    }

    #[test]
    fn mollified_bounds_and_limits() {
        let z = CutoffFn::mollified(CutoffKind::RisingZeta, 0.5);
        assert_eq!(z.value(0.5), 0.0);
        assert_eq!(z.value(1.0), 1.0);
        assert!((z.value(0.75) - 0.5).abs() < 1e-10);
        let mut max_d1: f64 = 0.0;
        let mut max_d2: f64 = 0.0;
        for i in 0..=400 {
            let t = 0.5 + 0.5 * i as f64 / 400.0;
            max_d1 = max_d1.max(z.d1(t));
            max_d2 = max_d2.max(z.d2(t).abs());
            assert!(z.d1(t) >= -1e-12);
        }
        assert!(max_d1 <= 4.5 + 1e-9);
        assert!(max_d2 <= 16.5 + 1e-6);
        assert!(max_d1 > 4.0);
    }

    #[test]
    fn mollified_derivative_matches_difference_quotient() {
        let z = CutoffFn::mollified(CutoffKind::FallingEta, 1.0);
        let h = 1e-5;
        for &t in &[0.56, 0.63, 0.75, 0.82, 0.91] {
            let fd1 = (z.value(t + h) - z.value(t - h)) / (2.0 * h);
            let fd2 = (z.d1(t + h) - z.d1(t - h)) / (2.0 * h);
            assert!((fd1 - z.d1(t)).abs() < 1e-6, "t={t}");
            assert!((fd2 - z.d2(t)).abs() < 1e-5, "t={t}");
        }
    }
}
