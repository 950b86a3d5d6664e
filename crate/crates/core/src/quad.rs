//! Adaptive Simpson quadrature.

const MAX_DEPTH: u32 = 50;

/// Integrates `f` over `[a, b]` to an absolute tolerance `tol` by adaptive
/// Simpson refinement with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if a > b {
        return -adaptive_simpson(f, b, a, tol);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    refine(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // Below the rounding level of the panel further halving cannot help.
    let floor = 1e-15 * crate::math::abs(left + right);
    if depth == 0
        || !delta.is_finite()
        || crate::math::abs(delta) <= (15.0 * tol).max(floor)
        || m <= a
        || m >= b
    {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integrates over `[knots[0], knots[last]]`, restarting the adaptive scheme
/// on each consecutive pair of knots so kinks of `f` sit on panel boundaries.
/// The tolerance is shared evenly between panels.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(f: &F, knots: &[f64], tol: f64) -> f64 {
    if knots.len() < 2 {
        return 0.0;
    }
    let panels = (knots.len() - 1) as f64;
    knots
        .windows(2)
        .map(|w| adaptive_simpson(f, w[0], w[1], tol / panels))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math;

    #[test]
    fn polynomial_of_degree_three_is_exact() {
        let v = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-14);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sine_over_half_period() {
        let v = adaptive_simpson(&math::sin, 0.0, core::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-11);
    }

    #[test]
    fn kink_on_knot_is_handled() {
        let f = |x: f64| (x - 0.3).abs();
        let v = integrate_piecewise(&f, &[0.0, 0.3, 1.0], 1e-13);
        assert!((v - (0.045 + 0.245)).abs() < 1e-13);
    }

    #[test]
    fn reversed_bounds_negate() {
        let f = |x: f64| math::exp(x);
        let a = adaptive_simpson(&f, 0.0, 1.0, 1e-12);
        let b = adaptive_simpson(&f, 1.0, 0.0, 1e-12);
        assert!((a + b).abs() < 1e-12);
    }
}
