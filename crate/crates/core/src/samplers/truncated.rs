use std::f64::consts::SQRT_2;

use statrs::function::erf::{erfc, erfc_inv};

use super::RngStream;
use crate::error::{Error, Result};
use crate::symbolic::Interval;

/// Beyond this many standard deviations the normal mass underflows.
pub const TAIL_LIMIT: f64 = 40.0;

/// Switch from complementary inverse-CDF to exponential rejection.
const INVERSE_CDF_LIMIT: f64 = 30.0;

/// Uniform draw strictly inside `interval`.
pub fn sample_uniform(rng: &mut RngStream, interval: &Interval) -> Result<f64> {
    if interval.is_empty() {
        return Err(Error::EmptySupport);
    }
    let width = interval.length();
    if width == 0.0 {
        return Ok(interval.lower);
    }
    for _ in 0..16 {
        let x = interval.lower + rng.open01() * width;
        if interval.contains(x) {
            return Ok(x);
        }
    }
    // Only reachable when the interval spans a couple of ulps.
    Ok(interval.midpoint())
}

/// `lower − ln(q)/λ`: the exponential(λ) law shifted to start at `lower`,
/// evaluated at a given uniform `q ∈ (0, 1]`.
pub fn truncated_exponential_from_uniform(q: f64, lambda: f64, lower: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("rate must be positive, got {lambda}")));
    }
    if !(lower >= 0.0) {
        return Err(Error::Domain(format!("lower bound must be nonnegative, got {lower}")));
    }
    Ok(lower - q.ln() / lambda)
}

/// Exponential(λ) conditioned to exceed `lower`.
pub fn sample_truncated_exponential(rng: &mut RngStream, lambda: f64, lower: f64) -> Result<f64> {
    truncated_exponential_from_uniform(rng.open01(), lambda, lower)
}

/// Unchecked form for the sampler hot loop.
#[inline]
pub(crate) fn shifted_exponential(rng: &mut RngStream, lambda: f64, lower: f64) -> f64 {
    lower - rng.open01().ln() / lambda
}

/// Normal(mean, variance) conditioned on `interval`.
///
/// Inverse CDF on the normalized mass, complementary functions in the tails,
/// exponential-proposal rejection far out, and uniform rejection when the
/// interval is narrow relative to the curvature of the density.
pub fn sample_truncated_normal(
    rng: &mut RngStream,
    mean: f64,
    variance: f64,
    interval: &Interval,
) -> Result<f64> {
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(Error::Domain(format!("variance must be positive, got {variance}")));
    }
    if interval.is_empty() {
        return Err(Error::EmptySupport);
    }
    let sd = variance.sqrt();
    let a = (interval.lower - mean) / sd;
    let b = (interval.upper - mean) / sd;
    let z = standard_truncated(rng, a, b)?;
    let x = (mean + sd * z).clamp(interval.lower, interval.upper);
    if interval.contains(x) {
        Ok(x)
    } else {
        // Rounded onto an open endpoint; the interval is then a few ulps wide.
        sample_uniform(rng, interval)
    }
}

fn standard_truncated(rng: &mut RngStream, a: f64, b: f64) -> Result<f64> {
    if b <= 0.0 {
        return standard_truncated(rng, -b, -a).map(|z| -z);
    }
    if a >= TAIL_LIMIT {
        return Err(Error::NumericalUnderflow);
    }
    if a >= 0.0 {
        // Whole interval in the right tail.
        if 0.5 * (b - a) * (b + a) <= 1.0 {
            return Ok(uniform_rejection(rng, a, b, a));
        }
        if a < INVERSE_CDF_LIMIT {
            let qa = upper_tail(a);
            let qb = upper_tail(b);
            let u = qb + rng.open01() * (qa - qb);
            return Ok((SQRT_2 * erfc_inv(2.0 * u)).clamp(a, b));
        }
        return Ok(exponential_rejection(rng, a, b));
    }
    // a < 0 < b
    if a * a <= 2.0 && b * b <= 2.0 {
        return Ok(uniform_rejection(rng, a, b, 0.0));
    }
    let pa = upper_tail(-a); // Φ(a)
    let qb = upper_tail(b); // 1 − Φ(b)
    let u = pa + rng.open01() * (1.0 - pa - qb);
    let z = if u < 0.5 {
        -SQRT_2 * erfc_inv(2.0 * u)
    } else {
        SQRT_2 * erfc_inv(2.0 * (1.0 - u))
    };
    Ok(z.clamp(a, b))
}

/// `1 − Φ(x)`.
#[inline]
fn upper_tail(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// Uniform proposals accepted with `exp((mode² − z²)/2)`; `mode` is the
/// point of the interval closest to zero.
fn uniform_rejection(rng: &mut RngStream, a: f64, b: f64, mode: f64) -> f64 {
    if !b.is_finite() || !a.is_finite() {
        unreachable!("uniform rejection needs a bounded interval");
    }
    loop {
        let z = a + rng.open01() * (b - a);
        if rng.open01().ln() <= 0.5 * (mode * mode - z * z) {
            return z;
        }
    }
}

/// Robert (1995) translated-exponential proposal for `z > a ≥ 0`.
fn exponential_rejection(rng: &mut RngStream, a: f64, b: f64) -> f64 {
    let rate = 0.5 * (a + (a * a + 4.0).sqrt());
    loop {
        let z = a - rng.open01().ln() / rate;
        if z < b && rng.open01().ln() <= -0.5 * (z - rate) * (z - rate) {
            return z;
        }
    }
}
