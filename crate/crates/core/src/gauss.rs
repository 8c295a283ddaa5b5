//! Unit-cube samples to standard Gaussian samples.

// The approximation coefficients and test quantiles are quoted at full published precision.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

/// Boundary guard applied before the inverse CDF.
pub const EPSILON: f64 = 1.0 / 9_007_199_254_740_992.0; // 2^-53

// Acklam's rational approximation (relative error below 1.2e-9).
const A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];
const P_LOW: f64 = 0.02425;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Standard normal CDF via the complementary error function.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

fn rational_lower(u: f64) -> f64 {
    if u < P_LOW {
        let q = (-2.0 * u.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = u - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Quantile for `u ≤ 1/2`: rational start, one Halley step on `Φ(x) − u`.
fn lower_quantile(u: f64) -> f64 {
    let x = rational_lower(u);
    let e = norm_cdf(x) - u;
    let t = e * SQRT_2PI * (0.5 * x * x).exp();
    x - t / (1.0 + 0.5 * x * t)
}

/// Inverse standard normal CDF, `√2·erf⁻¹(2u − 1)`.
///
/// The upper half is computed as `−Φ⁻¹(1 − u)`; `1 − u` is exact there, so
/// the result is exactly antisymmetric.
pub fn inv_norm_cdf(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "inverse normal CDF needs 0 < u < 1, got {u}"
        )));
    }
    Ok(if u == 0.5 {
        0.0
    } else if u < 0.5 {
        lower_quantile(u)
    } else {
        -lower_quantile(1.0 - u)
    })
}

/// Clamps each coordinate into `[2⁻⁵³, 1 − 2⁻⁵³]` and maps it through the
/// inverse normal CDF.
pub fn sanitize_and_transform(raw: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; raw.len()];
    transform_into(raw, &mut out);
    out
}

pub fn transform_into(raw: &[f64], out: &mut [f64]) {
    for (z, &u) in out.iter_mut().zip(raw) {
        // NaN also falls back to the median
        let u = if u.is_nan() { 0.5 } else { u.clamp(EPSILON, 1.0 - EPSILON) };
        *z = inv_norm_cdf(u).expect("clamped coordinate lies in (0, 1)");
    }
}
