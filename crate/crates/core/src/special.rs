//! Normal distribution helpers that stay accurate in the tails.
//!
//! `Φ` is evaluated through `erfc`, which keeps relative accuracy for very
//! negative arguments. Below [`TAIL_CUTOFF`] the lower-tail ratio `Φ(x)/φ(x)`
//! comes from the Laplace continued fraction for the Mills ratio instead.

use core::f64::consts::FRAC_1_SQRT_2;

/// Arguments below this use the Mills-ratio continued fraction.
pub const TAIL_CUTOFF: f64 = -8.0;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * libm::exp(-0.5 * x * x)
}

#[inline]
pub fn log_norm_pdf(x: f64) -> f64 {
    -LN_SQRT_2PI - 0.5 * x * x
}

#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Mills ratio `R(t) = (1 - Φ(t)) / φ(t)` for `t >= -TAIL_CUTOFF`.
fn mills_ratio_upper(t: f64) -> f64 {
    // R(t) = 1/(t + 1/(t + 2/(t + 3/(t + ...)))), evaluated from the tail.
    let mut acc = t;
    for k in (1..=60).rev() {
        acc = t + k as f64 / acc;
    }
    1.0 / acc
}

/// `ln Φ(x)`.
pub fn log_norm_cdf(x: f64) -> f64 {
    if x < TAIL_CUTOFF {
        log_norm_pdf(x) + libm::log(mills_ratio_upper(-x))
    } else if x > 0.0 {
        libm::log1p(-0.5 * libm::erfc(x * FRAC_1_SQRT_2))
    } else {
        libm::log(norm_cdf(x))
    }
}

/// Inverse Mills ratio `φ(x) / Φ(x)`, the mean shift of a standard normal
/// truncated to `(-x, ∞)` relative to its untruncated mean.
pub fn inv_mills(x: f64) -> f64 {
    if x < TAIL_CUTOFF {
        1.0 / mills_ratio_upper(-x)
    } else {
        norm_pdf(x) / norm_cdf(x)
    }
}

/// Digamma function for positive arguments.
pub fn digamma(mut x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut shift = 0.0;
    while x < 12.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let coeffs = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32760.0,
        1.0 / 12.0,
    ];
    let series = inv2 * coeffs.iter().rev().fold(0.0, |acc, c| acc * inv2 + c);
    shift + libm::log(x) - 0.5 * inv - series
}

#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

pub const LN_2PI: f64 = 1.837_877_066_409_345_5;
