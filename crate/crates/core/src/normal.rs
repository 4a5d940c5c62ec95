//! Standard normal helpers shared by the oracles and closed forms.

use std::f64::consts::{PI, SQRT_2};

/// Standard normal density.
pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Density of `N(mean, std^2)` at `x`.
pub fn pdf_scaled(x: f64, mean: f64, std: f64) -> f64 {
    pdf((x - mean) / std) / std
}

/// Standard normal CDF, computed through `erfc` so both tails keep full
/// relative precision.
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Upper tail `1 - cdf(x)`.
pub fn sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}
