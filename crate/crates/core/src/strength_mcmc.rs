//! Gibbs sampler over the hidden orbit at a fixed θ.
//!
//! Each sweep visits `y₀, y₁, …, yₙ` in order. Interior sites and `y₀` use
//! the auxiliary-variable slice update; `yₙ` is drawn from its cell-truncated
//! normal conditional directly. The running average of the sweeps is the
//! candidate orbit whose CES is tracked after burn-in.
//!
//! `g(θ, y) = g(θ, −y)`, so the posterior of `y₀` is symmetric and its mean
//! is 0 whatever the data. The chain keeps `y₀` on the nonnegative half,
//! which samples the folded law of `|y₀|` exactly.

use std::fmt::Write as _;

use crate::dynamics::g;
use crate::error::{Error, Result};
use crate::samplers::{sample_truncated_normal, sample_uniform, update_site, Neighbors, RngStream};
use crate::strength::{ces, CandidateVector};
use crate::symbolic::{CellSet, SymbolicData};

/// Settings of the strength-maximizing chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsConfig {
    /// Noise scale σ of the stochastic orbit model.
    pub sigma: f64,
    /// Sweeps before CES tracking starts (`N_b`).
    pub burn_in: u64,
    /// Total sweeps (`N_G`).
    pub total_sweeps: u64,
    /// Evaluate the CES every this many post-burn-in sweeps, and always at
    /// the last one.
    pub ces_stride: u64,
    /// Record a trace row every this many sweeps; 0 disables tracing.
    pub trace_stride: u64,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        GibbsConfig {
            sigma: 1e-3,
            burn_in: 40_000,
            total_sweeps: 200_000,
            ces_stride: 1,
            trace_stride: 0,
        }
    }
}

impl GibbsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::Config(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.burn_in >= self.total_sweeps {
            return Err(Error::Config(format!(
                "burn-in {} must be below total sweeps {}",
                self.burn_in, self.total_sweeps
            )));
        }
        if self.ces_stride == 0 {
            return Err(Error::Config("ces stride must be at least 1".into()));
        }
        Ok(())
    }

    /// `λ = 1/(2σ²)`.
    pub fn lambda(&self) -> f64 {
        lambda_of(self.sigma)
    }
}

pub(crate) fn lambda_of(sigma: f64) -> f64 {
    1.0 / (2.0 * sigma * sigma)
}

/// Current orbit state of one chain.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub y: Vec<f64>,
    pub sweep: u64,
    pub running_sum: Vec<f64>,
    pub rng: RngStream,
}

impl ChainState {
    /// Running average `ȳ_(j)` after `j = sweep` sweeps.
    pub fn running_mean(&self) -> Vec<f64> {
        let j = self.sweep.max(1) as f64;
        self.running_sum.iter().map(|s| s / j).collect()
    }

    fn accumulate(&mut self) {
        for (s, &y) in self.running_sum.iter_mut().zip(&self.y) {
            *s += y;
        }
    }
}

/// Draws every site uniformly in its cell (`y₀` folded to `[0, 1)`).
pub fn init_chain(data: &SymbolicData, mut rng: RngStream) -> ChainState {
    let mut y: Vec<f64> = (0..=data.n())
        .map(|i| sample_uniform(&mut rng, &data.cell(i)).expect("base cells are nonempty"))
        .collect();
    y[0] = y[0].abs();
    ChainState {
        y,
        sweep: 0,
        running_sum: vec![0.0; data.n() + 1],
        rng,
    }
}

/// Updates every site once against `cells`.
pub(crate) fn sweep_orbit<C: CellSet>(
    y: &mut [f64],
    theta: f64,
    sigma: f64,
    cells: &C,
    rng: &mut RngStream,
) {
    let n = y.len() - 1;
    let lambda = lambda_of(sigma);
    for i in 0..n {
        let neighbors = Neighbors {
            prev: (i > 0).then(|| y[i - 1]),
            next: Some(y[i + 1]),
        };
        y[i] = update_site(rng, theta, lambda, y[i], neighbors, &cells.cell(i));
    }
    if n == 0 {
        return;
    }
    let last = cells.cell(n);
    if let Ok(v) = sample_truncated_normal(rng, g(theta, y[n - 1]), sigma * sigma, &last) {
        y[n] = v;
    }
}

/// One Gibbs pass at fixed θ; advances the sweep counter and running sum.
pub fn gibbs_sweep(state: &mut ChainState, theta: f64, config: &GibbsConfig, data: &SymbolicData) {
    sweep_orbit(&mut state.y, theta, config.sigma, data, &mut state.rng);
    state.y[0] = state.y[0].abs();
    state.sweep += 1;
    state.accumulate();
}

/// One row of the optional chain trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub sweep: u64,
    /// CES of the running average, when it was evaluated at this sweep.
    pub ces: Option<u64>,
    pub y0_running: f64,
}

/// Outcome of a strength chain at one θ.
#[derive(Debug, Clone)]
pub struct StrengthRun {
    pub theta: f64,
    pub best_ces: u64,
    /// Running-average candidate at the sweep achieving `best_ces`.
    pub best_candidate: CandidateVector,
    pub best_y0: f64,
    pub best_sweep: u64,
    pub trace: Vec<TraceRow>,
}

impl StrengthRun {
    /// `sweep,ces,y0_running` rows; `ces` is blank where not evaluated.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("sweep,ces,y0_running\n");
        for row in &self.trace {
            let ces = row.ces.map(|c| c.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{:?}", row.sweep, ces, row.y0_running).unwrap();
        }
        out
    }
}

/// Runs `total_sweeps` sweeps at θ and returns the running-average candidate
/// with the highest CES seen after burn-in.
pub fn run_strength_chain(
    theta: f64,
    data: &SymbolicData,
    config: &GibbsConfig,
    rng: RngStream,
) -> Result<StrengthRun> {
    config.validate()?;
    let mut state = init_chain(data, rng);
    let mut best: Option<(u64, u64, Vec<f64>)> = None;
    let mut trace = Vec::new();
    let mut mean = vec![0.0; data.n() + 1];

    while state.sweep < config.total_sweeps {
        gibbs_sweep(&mut state, theta, config, data);
        let j = state.sweep;
        let check = j > config.burn_in
            && ((j - config.burn_in).is_multiple_of(config.ces_stride) || j == config.total_sweeps);
        let record = config.trace_stride > 0 && j.is_multiple_of(config.trace_stride);
        if !check && !record {
            continue;
        }
        let inv = 1.0 / j as f64;
        for (m, s) in mean.iter_mut().zip(&state.running_sum) {
            *m = s * inv;
        }
        let mut evaluated = None;
        if check {
            let value = ces(theta, &mean, data);
            evaluated = Some(value);
            if best.as_ref().is_none_or(|(b, _, _)| value > *b) {
                best = Some((value, j, mean.clone()));
            }
        }
        if record {
            trace.push(TraceRow {
                sweep: j,
                ces: evaluated,
                y0_running: mean[0],
            });
        }
    }

    let (best_ces, best_sweep, candidate) = best.expect("burn-in below total sweeps");
    Ok(StrengthRun {
        theta,
        best_ces,
        best_y0: candidate[0],
        best_candidate: CandidateVector(candidate),
        best_sweep,
        trace,
    })
}
