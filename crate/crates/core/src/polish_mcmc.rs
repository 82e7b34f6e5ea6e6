//! Polishing sampler: θ joins the state, σ is tiny and the cells are narrowed
//! around the refined candidate.
//!
//! Given the orbit, θ enters the likelihood through `Σ (y_j − 1 − θ·y_{j−1}²)²`,
//! a quadratic in θ, so its full conditional is a normal truncated to the
//! interval left by the grid stage. The orbit sites are then updated exactly
//! as in the strength chain, against the refined cells.

use std::fmt::Write as _;

use crate::dynamics::MapModel;
use crate::error::{Error, Result};
use crate::samplers::{sample_truncated_normal, RngStream};
use crate::strength::CandidateVector;
use crate::strength_mcmc::sweep_orbit;
use crate::symbolic::{CellSet, Interval, RefinedCells};

/// Settings of the polishing chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolishConfig {
    pub sigma: f64,
    /// Half-width of the refined cells.
    pub epsilon: f64,
    pub sweeps: u64,
    /// Sweeps excluded from the ergodic means.
    pub burn_in: u64,
    /// Record the running means every this many sweeps; 0 disables tracing.
    pub trace_stride: u64,
    /// Support of θ.
    pub truncation: Interval,
}

impl Default for PolishConfig {
    fn default() -> Self {
        PolishConfig {
            sigma: 1e-8,
            epsilon: 5e-5,
            sweeps: 100_000,
            burn_in: 10_000,
            trace_stride: 100,
            truncation: Interval::new(MapModel::THETA_MIN, MapModel::THETA_MAX, true, false),
        }
    }
}

impl PolishConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::Config(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.truncation.is_empty() {
            return Err(Error::Config("theta truncation interval is empty".into()));
        }
        if self.sweeps > 0 && self.burn_in >= self.sweeps {
            return Err(Error::Config(format!(
                "burn-in {} must be below the sweep count {}",
                self.burn_in, self.sweeps
            )));
        }
        Ok(())
    }
}

/// Mean and variance of the untruncated θ conditional given the orbit `y`.
///
/// `μ = Σ (y_j − α(y_{j−1}))·β(y_{j−1}) / Σ β(y_{j−1})²` and
/// `var = σ² / Σ β(y_{j−1})²`.
pub fn theta_conditional_params(y: &[f64], sigma: f64) -> Result<(f64, f64)> {
    if y.len() < 2 {
        return Err(Error::Domain("the theta conditional needs at least one step".into()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for w in y.windows(2) {
        let (prev, next) = (w[0], w[1]);
        let b = MapModel::beta(prev);
        num += (next - MapModel::alpha(prev)) * b;
        den += b * b;
    }
    if !(den > 0.0) {
        return Err(Error::DegenerateConditional);
    }
    Ok((num / den, sigma * sigma / den))
}

/// State of the polishing chain.
#[derive(Debug, Clone)]
pub struct PolishState {
    pub theta: f64,
    pub y: Vec<f64>,
    pub sweep: u64,
    pub rng: RngStream,
}

/// One draw of θ given the orbit `y`.
pub fn sample_theta(
    rng: &mut RngStream,
    y: &[f64],
    sigma: f64,
    truncation: &Interval,
) -> Result<f64> {
    let (mu, var) = theta_conditional_params(y, sigma)?;
    sample_truncated_normal(rng, mu, var, truncation)
}

/// Draws θ from its truncated conditional, then updates every site.
pub fn polish_sweep(
    state: &mut PolishState,
    config: &PolishConfig,
    cells: &RefinedCells,
) -> Result<()> {
    state.theta = sample_theta(&mut state.rng, &state.y, config.sigma, &config.truncation)?;
    sweep_orbit(&mut state.y, state.theta, config.sigma, cells, &mut state.rng);
    state.sweep += 1;
    Ok(())
}

/// Running means recorded during polishing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolishTraceRow {
    pub sweep: u64,
    pub theta_mean: f64,
    pub y0_mean: f64,
}

/// Ergodic means of θ and `y₀` after burn-in.
#[derive(Debug, Clone)]
pub struct PolishEstimate {
    pub theta_hat: f64,
    pub y0_hat: f64,
    pub trace: Vec<PolishTraceRow>,
    /// State after the last sweep.
    pub final_state: PolishState,
}

impl PolishEstimate {
    /// `sweep,theta_mean,y0_mean` rows.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("sweep,theta_mean,y0_mean\n");
        for row in &self.trace {
            writeln!(out, "{},{:?},{:?}", row.sweep, row.theta_mean, row.y0_mean).unwrap();
        }
        out
    }
}

/// Runs the polishing chain from `(theta_init, candidate_init)`.
///
/// The means are taken over sweeps `burn_in + 1 … sweeps`; the trace holds
/// those running means at every `trace_stride`-th sweep. With zero sweeps the
/// estimate is the initialization.
pub fn run_polish(
    theta_init: f64,
    candidate_init: &CandidateVector,
    cells: &RefinedCells,
    config: &PolishConfig,
    rng: RngStream,
) -> Result<PolishEstimate> {
    config.validate()?;
    let y = candidate_init.values();
    if y.len() != cells.n() + 1 {
        return Err(Error::Config(format!(
            "candidate has {} values for {} refined cells",
            y.len(),
            cells.n() + 1
        )));
    }
    let violations = cells.violations(y);
    if !violations.is_empty() {
        return Err(Error::Infeasible {
            indices: violations,
        });
    }
    if !config.truncation.contains(theta_init) {
        return Err(Error::Domain(format!(
            "initial theta {theta_init} outside the truncation ({}, {})",
            config.truncation.lower, config.truncation.upper
        )));
    }

    let mut state = PolishState {
        theta: theta_init,
        y: y.to_vec(),
        sweep: 0,
        rng,
    };
    let (mut theta_sum, mut y0_sum, mut kept) = (0.0, 0.0, 0u64);
    let mut trace = Vec::new();
    while state.sweep < config.sweeps {
        polish_sweep(&mut state, config, cells)?;
        if state.sweep <= config.burn_in {
            continue;
        }
        theta_sum += state.theta;
        y0_sum += state.y[0];
        kept += 1;
        if config.trace_stride > 0 && state.sweep.is_multiple_of(config.trace_stride) {
            trace.push(PolishTraceRow {
                sweep: state.sweep,
                theta_mean: theta_sum / kept as f64,
                y0_mean: y0_sum / kept as f64,
            });
        }
    }
    let (theta_hat, y0_hat) = if kept == 0 {
        (theta_init, y[0])
    } else {
        (theta_sum / kept as f64, y0_sum / kept as f64)
    };
    Ok(PolishEstimate {
        theta_hat,
        y0_hat,
        trace,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{iterate, simulate_symbolic};
    use crate::symbolic::{cells_from_bits, refine_cells};

    #[test]
    fn single_pair_inverts_exactly() {
        let (mu, var) = theta_conditional_params(&[0.8, -0.0944], 1e-3).unwrap();
        assert!((mu - -1.71).abs() < 1e-15, "{mu}");
        assert!((var - 1e-6 / 0.4096).abs() < 1e-20);
    }

    #[test]
    fn degenerate_and_short_inputs() {
        assert!(matches!(
            theta_conditional_params(&[0.0, 0.0, 1.0], 1e-3),
            Err(Error::DegenerateConditional)
        ));
        assert!(theta_conditional_params(&[0.5], 1e-3).is_err());
    }

    #[test]
    fn exact_orbit_gives_its_parameter() {
        let orbit = iterate(-1.65, 0.3, 40).unwrap().with_initial();
        let (mu, _) = theta_conditional_params(&orbit, 1e-8).unwrap();
        assert!((mu + 1.65).abs() < 1e-14);
    }

    #[test]
    fn least_squares_oracle() {
        // The residual sum of squares is an exact parabola in θ; its vertex
        // from three evaluations is the least-squares fit.
        let mut orbit = iterate(-1.71, 0.8, 9).unwrap().with_initial();
        for (i, y) in orbit.iter_mut().enumerate() {
            *y += 1e-7 * ((i * 7 % 5) as f64 - 2.0);
        }
        let sse = |t: f64| -> f64 {
            orbit
                .windows(2)
                .map(|w| (w[1] - 1.0 - t * w[0] * w[0]).powi(2))
                .sum()
        };
        let (a, b, c) = (-1.0, -1.5, -2.0);
        let (fa, fb, fc) = (sse(a), sse(b), sse(c));
        let vertex = b - 0.5 * ((b - a).powi(2) * (fb - fc) - (b - c).powi(2) * (fb - fa))
            / ((b - a) * (fb - fc) - (b - c) * (fb - fa));
        let (mu, _) = theta_conditional_params(&orbit, 1e-8).unwrap();
        assert!(((mu - vertex) / vertex).abs() <= 1e-12, "{mu} vs {vertex}");
    }

    fn toy_setup(n: usize) -> (CandidateVector, RefinedCells, PolishConfig) {
        let theta = -1.71;
        let orbit = iterate(theta, 0.8, n).unwrap().with_initial();
        let data = cells_from_bits(&simulate_symbolic(theta, 0.8, n).unwrap()).unwrap();
        let cells = refine_cells(&orbit, 5e-5, &data).unwrap();
        let config = PolishConfig {
            sweeps: 400,
            burn_in: 40,
            trace_stride: 10,
            truncation: Interval::open(-1.712, -1.708),
            ..PolishConfig::default()
        };
        (CandidateVector(orbit), cells, config)
    }

    #[test]
    fn sweeps_stay_feasible() {
        let (candidate, cells, config) = toy_setup(30);
        let mut state = PolishState {
            theta: -1.71,
            y: candidate.0.clone(),
            sweep: 0,
            rng: RngStream::new(12),
        };
        for _ in 0..500 {
            polish_sweep(&mut state, &config, &cells).unwrap();
            assert!(config.truncation.contains(state.theta));
            assert!(cells.violations(&state.y).is_empty());
        }
    }

    #[test]
    fn zero_sweeps_echo_initialization() {
        let (candidate, cells, mut config) = toy_setup(10);
        config.sweeps = 0;
        config.burn_in = 0;
        let est = run_polish(-1.7101, &candidate, &cells, &config, RngStream::new(1)).unwrap();
        assert_eq!(est.theta_hat, -1.7101);
        assert_eq!(est.y0_hat, candidate.0[0]);
        assert!(est.trace.is_empty());
    }

    #[test]
    fn infeasible_start_lists_indices() {
        let (mut candidate, cells, config) = toy_setup(10);
        candidate.0[3] += 1e-3;
        candidate.0[7] -= 1e-3;
        match run_polish(-1.71, &candidate, &cells, &config, RngStream::new(1)) {
            Err(Error::Infeasible { indices }) => assert_eq!(indices, vec![3, 7]),
            other => panic!("unexpected {other:?}"),
        }
        let (candidate, cells, config) = toy_setup(10);
        assert!(run_polish(-1.6, &candidate, &cells, &config, RngStream::new(1)).is_err());
    }

    #[test]
    fn estimate_inside_support_and_reproducible() {
        let (candidate, cells, config) = toy_setup(20);
        let a = run_polish(-1.71, &candidate, &cells, &config, RngStream::new(5)).unwrap();
        let b = run_polish(-1.71, &candidate, &cells, &config, RngStream::new(5)).unwrap();
        assert_eq!(a.trace_csv(), b.trace_csv());
        assert!(config.truncation.contains(a.theta_hat));
        assert!(cells.cell(0).contains(a.y0_hat));
        assert_eq!(a.trace.len(), 36);
        assert!(a.trace_csv().starts_with("sweep,theta_mean,y0_mean\n50,"));
    }
}
