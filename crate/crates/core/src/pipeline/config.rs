use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dynamics::MapModel;
use crate::error::{Error, Result};
use crate::grid_search::GridSpec;
use crate::polish_mcmc::PolishConfig;
use crate::strength_mcmc::GibbsConfig;
use crate::symbolic::Interval;

/// Everything a run needs. Defaults reproduce the reference experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub true_theta: f64,
    pub true_y0: f64,
    /// Length of the simulated symbol sequence.
    pub n: usize,
    /// Prefix length used by the grid stage.
    pub m: usize,
    pub grid: GridSpec,
    pub levels: usize,
    pub gibbs: GibbsConfig,
    pub polish: PolishConfig,
    /// Orbit indices `0..=polish_sites` enter the polishing chain; 0 means
    /// up to the anchor.
    pub polish_sites: usize,
    pub anchor_threshold: u64,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Grid worker threads; 0 picks the machine default.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            true_theta: -1.71,
            true_y0: 0.8,
            n: 1000,
            m: 600,
            grid: GridSpec::initial(),
            levels: 3,
            gibbs: GibbsConfig::default(),
            polish: PolishConfig::default(),
            polish_sites: 0,
            anchor_threshold: 20,
            seed: 1,
            output_dir: PathBuf::from("out"),
            workers: 0,
        }
    }
}

fn value<T: FromStr>(key: &str, raw: &str, line: usize) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad value {raw:?} for {key}")))
}

/// Non-empty, non-comment lines of a `key = value` file as
/// `(line number, key, value)`.
pub(crate) fn key_values(text: &str) -> Result<Vec<(usize, &str, &str)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, raw) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", i + 1)))?;
        out.push((i + 1, key.trim(), raw.trim()));
    }
    Ok(out)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !MapModel::theta_in_range(self.true_theta) {
            return Err(Error::ThetaOutOfRange {
                value: self.true_theta,
            });
        }
        if !MapModel::in_invariant_set(self.true_y0) {
            return Err(Error::Config(format!(
                "initial condition {} outside (-1, 1)",
                self.true_y0
            )));
        }
        if self.n == 0 || self.m == 0 || self.m > self.n {
            return Err(Error::Config(format!(
                "need 1 <= m <= n, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        if self.levels == 0 {
            return Err(Error::Config("levels must be at least 1".into()));
        }
        if self.polish_sites > self.n {
            return Err(Error::Config(format!(
                "polish_sites {} exceeds n = {}",
                self.polish_sites, self.n
            )));
        }
        self.grid.validate()?;
        self.gibbs.validate()?;
        self.polish.validate()
    }

    /// Applies `key = value` lines on top of `self`. Unknown keys are errors.
    pub fn apply(&mut self, text: &str) -> Result<()> {
        for (line, key, raw) in key_values(text)? {
            match key {
                "true_theta" => self.true_theta = value(key, raw, line)?,
                "true_y0" => self.true_y0 = value(key, raw, line)?,
                "n" => self.n = value(key, raw, line)?,
                "m" => self.m = value(key, raw, line)?,
                "grid.start" => self.grid.start = value(key, raw, line)?,
                "grid.step" => self.grid.step = value(key, raw, line)?,
                "grid.points" => self.grid.points = value(key, raw, line)?,
                "levels" => self.levels = value(key, raw, line)?,
                "gibbs.sigma" => self.gibbs.sigma = value(key, raw, line)?,
                "gibbs.burn_in" => self.gibbs.burn_in = value(key, raw, line)?,
                "gibbs.sweeps" => self.gibbs.total_sweeps = value(key, raw, line)?,
                "gibbs.ces_stride" => self.gibbs.ces_stride = value(key, raw, line)?,
                "gibbs.trace_stride" => self.gibbs.trace_stride = value(key, raw, line)?,
                "polish.sigma" => self.polish.sigma = value(key, raw, line)?,
                "polish.epsilon" => self.polish.epsilon = value(key, raw, line)?,
                "polish.sweeps" => self.polish.sweeps = value(key, raw, line)?,
                "polish.burn_in" => self.polish.burn_in = value(key, raw, line)?,
                "polish.trace_stride" => self.polish.trace_stride = value(key, raw, line)?,
                "polish.theta_lower" => {
                    let lower = value(key, raw, line)?;
                    let t = self.polish.truncation;
                    self.polish.truncation = Interval::new(lower, t.upper, t.closed_lower, t.closed_upper);
                }
                "polish.theta_upper" => {
                    let upper = value(key, raw, line)?;
                    let t = self.polish.truncation;
                    self.polish.truncation = Interval::new(t.lower, upper, t.closed_lower, t.closed_upper);
                }
                "polish.sites" => self.polish_sites = value(key, raw, line)?,
                "anchor_threshold" => self.anchor_threshold = value(key, raw, line)?,
                "seed" => self.seed = value(key, raw, line)?,
                "output_dir" => self.output_dir = PathBuf::from(raw),
                "workers" => self.workers = value(key, raw, line)?,
                _ => return Err(Error::Parse(format!("line {line}: unknown key {key:?}"))),
            }
        }
        Ok(())
    }

    /// Defaults overridden by `text`, validated.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = RunConfig::default();
        config.apply(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// One `key = value` line per field; floats keep every bit.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| writeln!(out, "{k} = {v}").unwrap();
        put("true_theta", format!("{:?}", self.true_theta));
        put("true_y0", format!("{:?}", self.true_y0));
        put("n", self.n.to_string());
        put("m", self.m.to_string());
        put("grid.start", format!("{:?}", self.grid.start));
        put("grid.step", format!("{:?}", self.grid.step));
        put("grid.points", self.grid.points.to_string());
        put("levels", self.levels.to_string());
        put("gibbs.sigma", format!("{:?}", self.gibbs.sigma));
        put("gibbs.burn_in", self.gibbs.burn_in.to_string());
        put("gibbs.sweeps", self.gibbs.total_sweeps.to_string());
        put("gibbs.ces_stride", self.gibbs.ces_stride.to_string());
        put("gibbs.trace_stride", self.gibbs.trace_stride.to_string());
        put("polish.sigma", format!("{:?}", self.polish.sigma));
        put("polish.epsilon", format!("{:?}", self.polish.epsilon));
        put("polish.sweeps", self.polish.sweeps.to_string());
        put("polish.burn_in", self.polish.burn_in.to_string());
        put("polish.trace_stride", self.polish.trace_stride.to_string());
        put("polish.theta_lower", format!("{:?}", self.polish.truncation.lower));
        put("polish.theta_upper", format!("{:?}", self.polish.truncation.upper));
        put("polish.sites", self.polish_sites.to_string());
        put("anchor_threshold", self.anchor_threshold.to_string());
        put("seed", self.seed.to_string());
        put("output_dir", self.output_dir.display().to_string());
        put("workers", self.workers.to_string());
        out
    }
}
