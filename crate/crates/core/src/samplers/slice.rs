//! Auxiliary-variable slice update for one orbit site.
//!
//! The Gaussian factors `exp(−λ·h)` linking a site to its neighbors are each
//! replaced by a latent `u > h` drawn from a shifted exponential. Given the
//! latents the site is uniform on an explicit union of at most two intervals.

use super::truncated::shifted_exponential;
use super::{sample_uniform, RngStream};
use crate::dynamics::g;
use crate::error::{Error, Result};
use crate::symbolic::Interval;

/// Support of a site given its latents: one interval, or two disjoint ones
/// chosen with probability `p` and `1 − p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicePieces {
    pub first: Interval,
    pub second: Option<Interval>,
    /// Probability of drawing from `first`.
    pub p: f64,
}

impl SlicePieces {
    fn from_parts(a: Interval, b: Interval) -> Result<Self> {
        match (a.is_empty(), b.is_empty()) {
            (true, true) => Err(Error::EmptySupport),
            (false, true) => Ok(Self::single(a)),
            (true, false) => Ok(Self::single(b)),
            (false, false) => {
                let (la, lb) = (a.length(), b.length());
                let p = if la + lb > 0.0 { la / (la + lb) } else { 0.5 };
                Ok(SlicePieces {
                    first: a,
                    second: Some(b),
                    p,
                })
            }
        }
    }

    pub fn single(iv: Interval) -> Self {
        SlicePieces {
            first: iv,
            second: None,
            p: 1.0,
        }
    }

    pub fn contains(&self, y: f64) -> bool {
        self.first.contains(y) || self.second.is_some_and(|s| s.contains(y))
    }

    pub fn total_length(&self) -> f64 {
        self.first.length() + self.second.map_or(0.0, |s| s.length())
    }

    pub fn sample(&self, rng: &mut RngStream) -> Result<f64> {
        match self.second {
            Some(second) if rng.open01() >= self.p => sample_uniform(rng, &second),
            _ => sample_uniform(rng, &self.first),
        }
    }
}

/// The set `{y ∈ window : (y_next − g(θ, y))² < u2}` for the quadratic map.
///
/// With `s = (y_next + √u2 − 1)/θ` and `r = (y_next − √u2 − 1)/θ` the
/// constraint reads `s < y² < r`: one symmetric interval when `s ≤ 0`,
/// otherwise the two mirror pieces `(−√r, −√s)` and `(√s, √r)`.
pub fn quadratic_slice_pieces(
    theta: f64,
    u2: f64,
    y_next: f64,
    window: &Interval,
) -> Result<SlicePieces> {
    if !(u2 > 0.0) {
        return Err(Error::Domain(format!("latent must be positive, got {u2}")));
    }
    if !(theta < 0.0) {
        return Err(Error::Domain(format!("theta must be negative, got {theta}")));
    }
    let root_u = u2.sqrt();
    let s = (y_next + root_u - 1.0) / theta;
    let r = (y_next - root_u - 1.0) / theta;
    if !(r >= 0.0) {
        return Err(Error::EmptySupport);
    }
    let root_r = r.sqrt();
    if s <= 0.0 {
        let piece = window.intersect(&Interval::open(-root_r, root_r));
        if piece.is_empty() {
            return Err(Error::EmptySupport);
        }
        return Ok(SlicePieces::single(piece));
    }
    let root_s = s.sqrt();
    SlicePieces::from_parts(
        window.intersect(&Interval::open(-root_r, -root_s)),
        window.intersect(&Interval::open(root_s, root_r)),
    )
}

/// Neighbors of the site being updated.
#[derive(Debug, Clone, Copy)]
pub struct Neighbors {
    /// `y_{i−1}`, absent for the initial condition.
    pub prev: Option<f64>,
    /// `y_{i+1}`, absent for the last site.
    pub next: Option<f64>,
}

/// Squared one-step residual `h(y_prev, y; θ) = (y − g(θ, y_prev))²`.
#[inline]
pub fn residual(theta: f64, y_prev: f64, y: f64) -> f64 {
    let d = y - g(theta, y_prev);
    d * d
}

/// Support of the site given freshly drawn latents.
pub fn site_pieces(
    rng: &mut RngStream,
    theta: f64,
    lambda: f64,
    current: f64,
    neighbors: Neighbors,
    cell: &Interval,
) -> Result<SlicePieces> {
    let mut window = *cell;
    if let Some(prev) = neighbors.prev {
        let u1 = shifted_exponential(rng, lambda, residual(theta, prev, current));
        let center = g(theta, prev);
        let half = u1.sqrt();
        window = window.intersect(&Interval::open(center - half, center + half));
    }
    match neighbors.next {
        Some(next) => {
            let u2 = shifted_exponential(rng, lambda, residual(theta, current, next));
            quadratic_slice_pieces(theta, u2, next, &window)
        }
        None if window.is_empty() => Err(Error::EmptySupport),
        None => Ok(SlicePieces::single(window)),
    }
}

/// One slice update of a site; keeps `current` when rounding leaves the
/// computed support empty or excluding the current point.
pub fn update_site(
    rng: &mut RngStream,
    theta: f64,
    lambda: f64,
    current: f64,
    neighbors: Neighbors,
    cell: &Interval,
) -> f64 {
    match site_pieces(rng, theta, lambda, current, neighbors, cell) {
        Ok(pieces) if pieces.contains(current) => {
            let y = pieces.sample(rng).unwrap_or(current);
            debug_assert!(cell.contains(y));
            y
        }
        _ => current,
    }
}
