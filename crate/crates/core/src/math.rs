//! Thin wrappers over `libm` so numeric code reads like ordinary float math.

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn ln1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn tan(x: f64) -> f64 {
    libm::tan(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// `ln(1/r)` for `r` in (0, 1).
#[inline]
pub fn log_inv(r: f64) -> f64 {
    -libm::log(r)
}

/// `ln ln(1/r)` for `r` in (0, 1/e).
#[inline]
pub fn loglog_inv(r: f64) -> f64 {
    libm::log(-libm::log(r))
}

/// `n` points spaced evenly in `ln r` between `lo` and `hi` (inclusive).
pub fn log_space(lo: f64, hi: f64, n: usize) -> alloc::vec::Vec<f64> {
    let (a, b) = (ln(lo), ln(hi));
    match n {
        0 => alloc::vec::Vec::new(),
        1 => alloc::vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    exp(a + (b - a) * i as f64 / (n - 1) as f64)
                }
            })
            .collect(),
    }
}

/// `n` evenly spaced points between `lo` and `hi` (inclusive).
pub fn lin_space(lo: f64, hi: f64, n: usize) -> alloc::vec::Vec<f64> {
    match n {
        0 => alloc::vec::Vec::new(),
        1 => alloc::vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
