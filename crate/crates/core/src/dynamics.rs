//! The quadratic map `g(θ, y) = 1 + θ·y²` on the invariant set `X = (-1, 1)`.
//!
//! Everything here is plain 64-bit arithmetic with no hidden state, so orbit
//! and symbol generation are reproducible bit for bit.

use crate::error::{Error, Result};

/// Parameter space `[-2, 0)`, invariant set `(-1, 1)` and the affine-in-θ
/// split `g(θ, y) = α(y) + β(y)·θ` of the quadratic map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MapModel;

impl MapModel {
    pub const THETA_MIN: f64 = -2.0;
    pub const THETA_MAX: f64 = 0.0;
    pub const X_MIN: f64 = -1.0;
    pub const X_MAX: f64 = 1.0;

    pub fn theta_in_range(theta: f64) -> bool {
        (Self::THETA_MIN..Self::THETA_MAX).contains(&theta)
    }

    pub fn in_invariant_set(y: f64) -> bool {
        y > Self::X_MIN && y < Self::X_MAX
    }

    pub fn in_closure(y: f64) -> bool {
        (Self::X_MIN..=Self::X_MAX).contains(&y)
    }

    /// Intercept term: `α(y) = 1`.
    #[inline]
    pub fn alpha(_y: f64) -> f64 {
        1.0
    }

    /// Slope term: `β(y) = y²`.
    #[inline]
    pub fn beta(y: f64) -> f64 {
        y * y
    }
}

/// Map evaluation without the range check. Hot loops call this.
#[inline(always)]
pub fn g(theta: f64, y: f64) -> f64 {
    MapModel::alpha(y) + MapModel::beta(y) * theta
}

/// `1 + θ·y²`, rejecting θ outside `[-2, 0)`.
pub fn evaluate(theta: f64, y: f64) -> Result<f64> {
    if !MapModel::theta_in_range(theta) {
        return Err(Error::ThetaOutOfRange { value: theta });
    }
    Ok(g(theta, y))
}

/// A forward trajectory `y*₁ … y*ₖ` of the map from `y0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub theta: f64,
    pub y0: f64,
    pub values: Vec<f64>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `y0` followed by the trajectory, i.e. indices `0..=k`.
    pub fn with_initial(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.values.len() + 1);
        out.push(self.y0);
        out.extend_from_slice(&self.values);
        out
    }
}

/// Iterates the map `k` times from `y0`.
///
/// Fails with [`Error::Escape`] at the first point outside `[-1, 1]`.
pub fn iterate(theta: f64, y0: f64, k: usize) -> Result<Orbit> {
    if !MapModel::theta_in_range(theta) {
        return Err(Error::ThetaOutOfRange { value: theta });
    }
    if !MapModel::in_closure(y0) {
        return Err(Error::Escape {
            index: 0,
            value: y0,
        });
    }
    let mut values = Vec::with_capacity(k);
    let mut y = y0;
    for index in 1..=k {
        y = g(theta, y);
        if !MapModel::in_closure(y) {
            return Err(Error::Escape { index, value: y });
        }
        values.push(y);
    }
    Ok(Orbit { theta, y0, values })
}

/// Symbol of a point: 0 on `(-1, 0)`, 1 on `[0, 1)`.
#[inline]
pub fn symbol_of(y: f64) -> u8 {
    u8::from(y >= 0.0)
}

/// Censored symbols `b₁ … bₙ` of the orbit from `(theta, y0)`.
pub fn simulate_symbolic(theta: f64, y0: f64, n: usize) -> Result<Vec<u8>> {
    Ok(iterate(theta, y0, n)?
        .values
        .into_iter()
        .map(symbol_of)
        .collect())
}

/// Which of the two preimages `±√((y' − 1)/θ)` to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Negative,
    Positive,
}

impl Branch {
    /// Branch containing `y`; zero belongs to the positive branch.
    pub fn of(y: f64) -> Self {
        if y < 0.0 {
            Branch::Negative
        } else {
            Branch::Positive
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Branch::Negative => -1.0,
            Branch::Positive => 1.0,
        }
    }
}

/// Signed inverse `branch·√((y_next − 1)/θ)`.
///
/// A negative radicand means `y_next` has no real preimage at this θ; the
/// error carries index 0 and callers re-label it with their own position.
pub fn inverse_branch(theta: f64, y_next: f64, branch: Branch) -> Result<f64> {
    let radicand = (y_next - 1.0) / theta;
    if !(radicand >= 0.0) {
        return Err(Error::InversionDomain { index: 0, radicand });
    }
    Ok(branch.sign() * radicand.sqrt())
}
