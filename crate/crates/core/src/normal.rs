//! Standard normal density, distribution function and its logarithm.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{invalid, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;
const CLAMP: f64 = 8.0;
// Below this, ln Φ uses the asymptotic series.
const ASYMPTOTIC_BELOW: f64 = -20.0;

#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

#[inline]
fn upper_tail_unclamped(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// `Φ(x)`; exactly 0 below -8 and exactly 1 above 8. NaN propagates.
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < -CLAMP {
        0.0
    } else if x > CLAMP {
        1.0
    } else {
        upper_tail_unclamped(-x)
    }
}

/// `ln Φ(x)`, accurate deep into the lower tail where `Φ` itself underflows.
pub fn ln_normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x >= 0.0 {
        return (-upper_tail_unclamped(x)).ln_1p();
    }
    if x > ASYMPTOTIC_BELOW {
        return upper_tail_unclamped(-x).ln();
    }
    // Φ(x) = φ(x)/|x| * (1 - 1/x² + 3/x⁴ - 15/x⁶ + 105/x⁸ - ...)
    let r = 1.0 / (x * x);
    let series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r * (1.0 - 9.0 * r * (1.0 - 11.0 * r)))));
    -0.5 * x * x - LN_SQRT_2PI - (-x).ln() + series.ln()
}

/// `Φ⁻¹(p)` by bisection on `[-8, 8]`; residual `|Φ(x) - p| <= 1e-10`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("quantile level must lie in (0, 1), got {p}")));
    }
    let (mut lo, mut hi) = (-CLAMP, CLAMP);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
