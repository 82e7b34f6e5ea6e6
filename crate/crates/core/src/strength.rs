//! Estimating strengths of candidate orbits and backward refinement.
//!
//! The strength of a candidate point `ȳᵢ` is the length of the longest run
//! of forward iterates `g(θ, ȳᵢ), g²(θ, ȳᵢ), …` that land in the observed
//! cells `D_{i+1}, D_{i+2}, …`. Summing over `i < n` gives the cumulative
//! strength (CES), the objective maximized over θ.

use std::fmt::Write as _;

use crate::dynamics::{g, inverse_branch, Branch};
use crate::error::{Error, Result};
use crate::symbolic::{CellSet, SymbolicData};

/// A candidate orbit `ȳ₀ … ȳₙ` (or a refined `ỹ₀ … ỹ_κ`).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CandidateVector(pub Vec<f64>);

impl CandidateVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for CandidateVector {
    fn from(v: Vec<f64>) -> Self {
        CandidateVector(v)
    }
}

/// Per-index strengths and their sum over `i < n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrengthProfile {
    pub per_index: Vec<u64>,
    pub ces: u64,
}

impl StrengthProfile {
    /// `index,strength` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,strength\n");
        for (i, s) in self.per_index.iter().enumerate() {
            writeln!(out, "{i},{s}").unwrap();
        }
        out
    }

    /// Number of indices with strength strictly above `threshold`.
    pub fn count_above(&self, threshold: u64) -> usize {
        self.per_index.iter().filter(|&&s| s > threshold).count()
    }
}

/// Strength of the candidate point `y` at position `index`.
pub fn point_strength(theta: f64, y: f64, index: usize, data: &SymbolicData) -> u64 {
    let n = data.n();
    let mut z = y;
    let mut k = 0;
    while index + k < n {
        z = g(theta, z);
        if !data.matches(index + k + 1, z) {
            break;
        }
        k += 1;
    }
    k as u64
}

/// Strength profile of a full candidate of length `n + 1`.
pub fn cumulative_strength(
    theta: f64,
    candidate: &CandidateVector,
    data: &SymbolicData,
) -> Result<StrengthProfile> {
    check_length(candidate.values(), data)?;
    let per_index: Vec<u64> = candidate
        .values()
        .iter()
        .enumerate()
        .map(|(i, &y)| point_strength(theta, y, i, data))
        .collect();
    let ces = per_index.iter().sum();
    Ok(StrengthProfile { per_index, ces })
}

/// CES alone, without materializing the profile.
pub(crate) fn ces(theta: f64, values: &[f64], data: &SymbolicData) -> u64 {
    values[..data.n()]
        .iter()
        .enumerate()
        .map(|(i, &y)| point_strength(theta, y, i, data))
        .sum()
}

fn check_length(values: &[f64], data: &SymbolicData) -> Result<()> {
    if values.len() != data.n() + 1 {
        return Err(Error::Config(format!(
            "candidate has {} entries, data needs {}",
            values.len(),
            data.n() + 1
        )));
    }
    Ok(())
}

/// Largest index whose strength exceeds `threshold`.
pub fn select_anchor(profile: &StrengthProfile, threshold: u64) -> Result<usize> {
    profile
        .per_index
        .iter()
        .rposition(|&s| s > threshold)
        .ok_or(Error::AnchorNotFound { threshold })
}

/// Rebuilds `ỹ₀ … ỹ_κ` backwards from the anchor `ȳ_κ` with the signed
/// inverse map, taking each branch from the sign of `ȳ`.
///
/// The result is an orbit of `g(θ*, ·)` up to rounding. A point without a
/// real preimage fails with [`Error::InversionDomain`] at that index.
pub fn backward_refine(
    theta_star: f64,
    candidate: &CandidateVector,
    kappa: usize,
) -> Result<CandidateVector> {
    let ybar = candidate.values();
    if kappa >= ybar.len() {
        return Err(Error::Config(format!(
            "anchor {kappa} beyond candidate of length {}",
            ybar.len()
        )));
    }
    if !ybar[kappa].is_finite() {
        return Err(Error::Domain(format!("anchor value {} is not finite", ybar[kappa])));
    }
    let mut refined = vec![0.0; kappa + 1];
    refined[kappa] = ybar[kappa];
    for i in (0..kappa).rev() {
        refined[i] = inverse_branch(theta_star, refined[i + 1], Branch::of(ybar[i])).map_err(
            |e| match e {
                Error::InversionDomain { radicand, .. } => {
                    Error::InversionDomain { index: i, radicand }
                }
                other => other,
            },
        )?;
    }
    Ok(CandidateVector(refined))
}
