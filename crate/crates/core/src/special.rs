//! Standard normal helpers.

use libm::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF Φ.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// ln Φ(x), accurate in the far left tail.
pub fn log_normal_cdf(x: f64) -> f64 {
    if x > -30.0 {
        normal_cdf(x).ln()
    } else {
        -0.5 * x * x - (-x).ln() - 0.5 * (2.0 * PI).ln() + (1.0 - 1.0 / (x * x)).ln()
    }
}

/// Inverse Mills ratio φ(x)/Φ(x).
pub fn inverse_mills(x: f64) -> f64 {
    if x > -30.0 {
        normal_pdf(x) / normal_cdf(x)
    } else {
        let x2 = x * x;
        -x / (1.0 - 1.0 / x2 + 3.0 / (x2 * x2))
    }
}
