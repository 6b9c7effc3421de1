use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal distribution function, `0.5 * erfc(-x / sqrt(2))`.
///
/// The complementary error function keeps full relative accuracy in the
/// lower tail, so `1 - cdf(x)` is never formed by cancellation.
#[inline]
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}
