//! Strength computed straight from its definition, and random instances.

use proptest::prelude::*;

use symest::dynamics::{g, iterate, simulate_symbolic};
use symest::strength::{cumulative_strength, point_strength, CandidateVector};
use symest::symbolic::cells_from_bits;

fn in_cell(bit: u8, z: f64) -> bool {
    if bit == 0 {
        -1.0 < z && z < 0.0
    } else {
        (0.0..1.0).contains(&z)
    }
}

/// k-th iterate recomputed from scratch.
fn iterate_from(theta: f64, y: f64, k: usize) -> f64 {
    (0..k).fold(y, |z, _| g(theta, z))
}

/// Largest k such that iterates 1..=k of `y` land in cells i+1..=i+k,
/// found by checking every prefix length independently.
pub fn brute_strength(theta: f64, y: f64, i: usize, bits: &[u8]) -> u64 {
    let n = bits.len();
    let mut best = 0;
    for k in 1..=(n - i) {
        let ok = (1..=k).all(|j| in_cell(bits[i + j - 1], iterate_from(theta, y, j)));
        if ok {
            best = k;
        }
    }
    best as u64
}

/// θ, bits and a candidate of length n + 1, with n ≤ 50. Half the
/// instances use simulated bits and a candidate close to the true orbit.
pub fn instance() -> impl Strategy<Value = (f64, Vec<u8>, Vec<f64>)> {
    (1usize..=50, -2.0f64..-0.01, any::<bool>(), -0.99f64..0.99).prop_flat_map(
        |(n, theta, simulated, y0)| {
            let bits = if simulated {
                simulate_symbolic(theta, y0, n).map(Just).ok()
            } else {
                None
            };
            let bits: BoxedStrategy<Vec<u8>> = match bits {
                Some(b) => b.boxed(),
                None => proptest::collection::vec(0u8..=1, n).boxed(),
            };
            let near_orbit = iterate(theta, y0, n).ok().map(|o| o.with_initial());
            let candidate: BoxedStrategy<Vec<f64>> = match near_orbit {
                Some(orbit) if simulated => proptest::collection::vec(-1e-6f64..1e-6, n + 1)
                    .prop_map(move |noise| {
                        orbit.iter().zip(noise).map(|(y, e)| (y + e).clamp(-0.999, 0.999)).collect()
                    })
                    .boxed(),
                _ => proptest::collection::vec(-0.999f64..0.999, n + 1).boxed(),
            };
            (Just(theta), bits, candidate)
        },
    )
}

/// Per-index strengths and the CES agree exactly with the definition.
pub fn matches_definition(theta: f64, bits: &[u8], candidate: &[f64]) -> Result<(), TestCaseError> {
    let data = cells_from_bits(bits).unwrap();
    let profile = cumulative_strength(theta, &CandidateVector(candidate.to_vec()), &data).unwrap();
    let mut total = 0;
    for (i, &y) in candidate.iter().enumerate() {
        let expected = brute_strength(theta, y, i, bits);
        prop_assert_eq!(point_strength(theta, y, i, &data), expected);
        prop_assert_eq!(profile.per_index[i], expected);
        if i < bits.len() {
            total += expected;
        }
    }
    prop_assert_eq!(profile.ces, total);
    prop_assert_eq!(profile.per_index[bits.len()], 0);
    Ok(())
}
