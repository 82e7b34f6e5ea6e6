//! End-to-end runs: simulate symbols, zoom over θ, refine the candidate,
//! polish, and write every intermediate result to the output directory.
//!
//! Files written under `output_dir`:
//!
//! | file | contents |
//! |---|---|
//! | `bits.txt` | the symbol sequence as one line of `0`/`1` |
//! | `cells.csv` | `index,lower,upper` of each observed cell |
//! | `grid_level{ℓ}.csv` | `theta,ces` for grid level ℓ |
//! | `strengths.csv` | `index,strength` at the grid maximizer |
//! | `candidate.csv` | `index,ybar,ytilde` (ytilde blank past the anchor) |
//! | `estimate.txt` | grid-stage summary as `key = value` |
//! | `polish_trace.csv` | `sweep,theta_mean,y0_mean` |
//! | `polish.txt` | polishing summary as `key = value` |
//! | `report.txt` | human-readable report of the run |
//!
//! Every CSV is a pure function of the configuration and seed.

mod config;

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

pub use config::RunConfig;

use config::key_values;

use crate::dynamics::{iterate, simulate_symbolic};
use crate::error::{Error, Result};
use crate::grid_search::{run_zooming_with, ZoomResult};
use crate::polish_mcmc::{run_polish, PolishConfig, PolishEstimate};
use crate::samplers::{RngStream, POLISH_STREAM, PROFILE_STREAM};
use crate::strength::{backward_refine, cumulative_strength, select_anchor, CandidateVector, StrengthProfile};
use crate::strength_mcmc::run_strength_chain;
use crate::symbolic::{cells_from_bits, refine_cells, CellSet, Interval, SymbolicData};

pub const BITS_FILE: &str = "bits.txt";
pub const CELLS_FILE: &str = "cells.csv";
pub const STRENGTHS_FILE: &str = "strengths.csv";
pub const CANDIDATE_FILE: &str = "candidate.csv";
pub const ESTIMATE_FILE: &str = "estimate.txt";
pub const POLISH_TRACE_FILE: &str = "polish_trace.csv";
pub const POLISH_FILE: &str = "polish.txt";
pub const REPORT_FILE: &str = "report.txt";

/// `grid_level{level}.csv`.
pub fn grid_file(level: usize) -> String {
    format!("grid_level{level}.csv")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

fn read_file(dir: &Path, name: &str) -> Result<String> {
    let path = dir.join(name);
    std::fs::read_to_string(&path).map_err(|e| Error::io(path, e))
}

fn field<T: std::str::FromStr>(pairs: &[(usize, &str, &str)], key: &str, file: &str) -> Result<T> {
    let (line, _, raw) = pairs
        .iter()
        .find(|(_, k, _)| *k == key)
        .ok_or_else(|| Error::Parse(format!("{file}: missing {key}")))?;
    raw.parse()
        .map_err(|_| Error::Parse(format!("{file} line {line}: bad value {raw:?} for {key}")))
}

/// Writes the symbols of the configured orbit.
pub fn cmd_simulate(config: &RunConfig) -> Result<SymbolicData> {
    let run = || -> Result<SymbolicData> {
        config.validate()?;
        let bits = simulate_symbolic(config.true_theta, config.true_y0, config.n)?;
        let data = cells_from_bits(&bits)?;
        write_file(&config.output_dir, BITS_FILE, &data.to_bit_line())?;
        write_file(&config.output_dir, CELLS_FILE, &data.cells_csv())?;
        Ok(data)
    };
    run().map_err(|e| e.in_stage("simulate"))
}

/// Reads `bits.txt` from the output directory.
pub fn load_bits(dir: &Path) -> Result<SymbolicData> {
    SymbolicData::from_bit_line(&read_file(dir, BITS_FILE)?)
}

/// Grid-stage result that the polishing stage consumes.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub theta_star: f64,
    pub truncation: Interval,
    /// Anchor index κ.
    pub anchor: usize,
    /// CES of `ybar` at `theta_star` on the full data.
    pub ces: u64,
    /// Candidate `ȳ₀ … ȳₙ` at `theta_star`.
    pub ybar: CandidateVector,
    /// Refined `ỹ₀ … ỹ_κ`.
    pub ytilde: CandidateVector,
    pub seconds: f64,
}

impl Estimate {
    /// `index,ybar,ytilde` rows.
    pub fn candidate_csv(&self) -> String {
        let mut out = String::from("index,ybar,ytilde\n");
        for (i, y) in self.ybar.values().iter().enumerate() {
            match self.ytilde.values().get(i) {
                Some(t) => writeln!(out, "{i},{y:?},{t:?}").unwrap(),
                None => writeln!(out, "{i},{y:?},").unwrap(),
            }
        }
        out
    }

    fn summary_text(&self) -> String {
        format!(
            "theta_star = {:?}\ntruncation_lower = {:?}\ntruncation_upper = {:?}\nanchor = {}\nces = {}\nseconds = {:.3}\n",
            self.theta_star, self.truncation.lower, self.truncation.upper, self.anchor, self.ces, self.seconds
        )
    }

    /// Reads `estimate.txt` and `candidate.csv` back.
    pub fn load(dir: &Path) -> Result<Estimate> {
        let text = read_file(dir, ESTIMATE_FILE)?;
        let pairs = key_values(&text)?;
        let lower: f64 = field(&pairs, "truncation_lower", ESTIMATE_FILE)?;
        let upper: f64 = field(&pairs, "truncation_upper", ESTIMATE_FILE)?;
        let anchor: usize = field(&pairs, "anchor", ESTIMATE_FILE)?;
        let (ybar, ytilde) = parse_candidate_csv(&read_file(dir, CANDIDATE_FILE)?)?;
        if ytilde.len() != anchor + 1 {
            return Err(Error::Parse(format!(
                "{CANDIDATE_FILE}: {} refined values for anchor {anchor}",
                ytilde.len()
            )));
        }
        Ok(Estimate {
            theta_star: field(&pairs, "theta_star", ESTIMATE_FILE)?,
            truncation: Interval::open(lower, upper),
            anchor,
            ces: field(&pairs, "ces", ESTIMATE_FILE)?,
            ybar: CandidateVector(ybar),
            ytilde: CandidateVector(ytilde),
            seconds: field(&pairs, "seconds", ESTIMATE_FILE)?,
        })
    }
}

fn parse_candidate_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lines = text.lines();
    if lines.next() != Some("index,ybar,ytilde") {
        return Err(Error::Parse(format!("{CANDIDATE_FILE}: unexpected header")));
    }
    let bad = |row: usize| Error::Parse(format!("{CANDIDATE_FILE}: malformed row {row}"));
    let (mut ybar, mut ytilde) = (Vec::new(), Vec::new());
    for (row, line) in lines.enumerate() {
        let mut parts = line.split(',');
        let (Some(index), Some(y), Some(t), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad(row));
        };
        if index.parse::<usize>().ok() != Some(row) {
            return Err(bad(row));
        }
        ybar.push(y.parse().map_err(|_| bad(row))?);
        if !t.is_empty() {
            if ytilde.len() != row {
                return Err(bad(row));
            }
            ytilde.push(t.parse().map_err(|_| bad(row))?);
        }
    }
    Ok((ybar, ytilde))
}

/// Everything the grid stage produced.
#[derive(Debug, Clone)]
pub struct EstimateRun {
    pub zoom: ZoomResult,
    pub profile: StrengthProfile,
    pub estimate: Estimate,
}

/// Zooms over θ on the first `m` symbols, then scores, anchors and refines
/// a candidate on all `n` symbols at the maximizer.
/// Candidate, strengths, anchor and refined candidate at the zoom's θ*,
/// over all `n` symbols. Writes nothing; `seconds` is left at zero.
pub fn refine_estimate(
    config: &RunConfig,
    data: &SymbolicData,
    zoom: &ZoomResult,
) -> Result<(StrengthProfile, Estimate)> {
    let ybar = if config.m == data.n() {
        zoom.candidate.clone()
    } else {
        let rng = RngStream::with_stream(config.seed, PROFILE_STREAM);
        run_strength_chain(zoom.theta_star, data, &config.gibbs, rng)?.best_candidate
    };
    let profile = cumulative_strength(zoom.theta_star, &ybar, data)?;
    let anchor = select_anchor(&profile, config.anchor_threshold)?;
    let ytilde = backward_refine(zoom.theta_star, &ybar, anchor)?;
    let estimate = Estimate {
        theta_star: zoom.theta_star,
        truncation: zoom.truncation,
        anchor,
        ces: profile.ces,
        ybar,
        ytilde,
        seconds: 0.0,
    };
    Ok((profile, estimate))
}

pub fn cmd_estimate(config: &RunConfig, data: &SymbolicData) -> Result<EstimateRun> {
    let run = || -> Result<EstimateRun> {
        config.validate()?;
        let start = Instant::now();
        let dir = &config.output_dir;
        let prefix = data.prefix(config.m)?;
        let zoom = run_zooming_with(
            &config.grid,
            config.levels,
            &prefix,
            &config.gibbs,
            config.seed,
            config.workers,
            |table| write_file(dir, &grid_file(table.level), &table.to_csv()),
        )?;
        let (profile, mut estimate) = refine_estimate(config, data, &zoom)?;
        write_file(dir, STRENGTHS_FILE, &profile.to_csv())?;
        estimate.seconds = start.elapsed().as_secs_f64();
        write_file(dir, CANDIDATE_FILE, &estimate.candidate_csv())?;
        write_file(dir, ESTIMATE_FILE, &estimate.summary_text())?;
        Ok(EstimateRun {
            zoom,
            profile,
            estimate,
        })
    };
    run().map_err(|e| e.in_stage("estimate"))
}

/// Polishing outcome with the number of orbit steps it used.
#[derive(Debug, Clone)]
pub struct PolishRun {
    pub sites: usize,
    pub estimate: PolishEstimate,
    pub seconds: f64,
}

impl PolishRun {
    fn summary_text(&self) -> String {
        format!(
            "theta_hat = {:?}\ny0_hat = {:?}\nsites = {}\nseconds = {:.3}\n",
            self.estimate.theta_hat, self.estimate.y0_hat, self.sites, self.seconds
        )
    }
}

/// Polishing chain started at `(θ*, ỹ₀ … ỹ_s)` on cells refined around ỹ,
/// with θ confined to the grid-stage truncation interval.
pub fn cmd_polish(config: &RunConfig, data: &SymbolicData, estimate: &Estimate) -> Result<PolishRun> {
    let run = || -> Result<PolishRun> {
        config.validate()?;
        let start = Instant::now();
        let sites = if config.polish_sites == 0 {
            estimate.anchor
        } else {
            config.polish_sites
        };
        if sites == 0 {
            return Err(Error::Config(
                "anchor at index 0 leaves no orbit step to polish; lower anchor_threshold".into(),
            ));
        }
        if sites > estimate.anchor {
            return Err(Error::Config(format!(
                "polish_sites {sites} beyond the anchor {}",
                estimate.anchor
            )));
        }
        let center = &estimate.ytilde.values()[..=sites];
        let cells = refine_cells(center, config.polish.epsilon, data)?;
        let polish_config = PolishConfig {
            truncation: estimate.truncation,
            ..config.polish
        };
        let rng = RngStream::with_stream(config.seed, POLISH_STREAM);
        let result = run_polish(
            estimate.theta_star,
            &CandidateVector(center.to_vec()),
            &cells,
            &polish_config,
            rng,
        )?;
        let polished = PolishRun {
            sites,
            estimate: result,
            seconds: start.elapsed().as_secs_f64(),
        };
        write_file(&config.output_dir, POLISH_TRACE_FILE, &polished.estimate.trace_csv())?;
        write_file(&config.output_dir, POLISH_FILE, &polished.summary_text())?;
        Ok(polished)
    };
    run().map_err(|e| e.in_stage("polish"))
}

/// Renders `report.txt` from the files in the output directory.
pub fn cmd_report(config: &RunConfig) -> Result<String> {
    let run = || -> Result<String> {
        let dir = &config.output_dir;
        let mut out = String::new();
        writeln!(out, "true theta      {:?}", config.true_theta).unwrap();
        writeln!(out, "true y0         {:?}", config.true_y0).unwrap();
        if let Ok(data) = load_bits(dir) {
            writeln!(out, "observations    {}", data.n()).unwrap();
        }
        for level in 1..=config.levels {
            let Ok(text) = read_file(dir, &grid_file(level)) else {
                break;
            };
            let best = text
                .lines()
                .skip(1)
                .filter_map(|l| l.split_once(','))
                .filter_map(|(t, c)| Some((t.parse::<f64>().ok()?, c.parse::<u64>().ok()?)))
                .fold(None, |best: Option<(f64, u64)>, row| match best {
                    Some(b) if b.1 >= row.1 => Some(b),
                    _ => Some(row),
                });
            if let Some((theta, ces)) = best {
                writeln!(out, "grid level {level}    argmax theta {theta:.6}, ces {ces}").unwrap();
            }
        }
        let truth = iterate(config.true_theta, config.true_y0, 4).ok().map(|o| o.with_initial());
        if let Ok(est) = Estimate::load(dir) {
            writeln!(out, "theta*          {:?}", est.theta_star).unwrap();
            writeln!(out, "theta* error    {:.3e}", (est.theta_star - config.true_theta).abs()).unwrap();
            writeln!(
                out,
                "truncation      ({:?}, {:?})",
                est.truncation.lower, est.truncation.upper
            )
            .unwrap();
            writeln!(out, "ces at theta*   {}", est.ces).unwrap();
            writeln!(out, "anchor          {}", est.anchor).unwrap();
            writeln!(out, "index  ybar          ytilde        |ybar-y|    |ytilde-y|").unwrap();
            for i in 0..5.min(est.ytilde.len()) {
                let (yb, yt) = (est.ybar.0[i], est.ytilde.0[i]);
                match &truth {
                    Some(y) => writeln!(
                        out,
                        "{i:<6} {yb:<13.8} {yt:<13.8} {:<11.2e} {:.2e}",
                        (yb - y[i]).abs(),
                        (yt - y[i]).abs()
                    ),
                    None => writeln!(out, "{i:<6} {yb:<13.8} {yt:<13.8}"),
                }
                .unwrap();
            }
            writeln!(out, "estimate time   {:.1} s", est.seconds).unwrap();
        }
        if let Ok(text) = read_file(dir, POLISH_FILE) {
            let pairs = key_values(&text)?;
            let theta: f64 = field(&pairs, "theta_hat", POLISH_FILE)?;
            let y0: f64 = field(&pairs, "y0_hat", POLISH_FILE)?;
            let sites: usize = field(&pairs, "sites", POLISH_FILE)?;
            let seconds: f64 = field(&pairs, "seconds", POLISH_FILE)?;
            writeln!(out, "polish sites    {sites}").unwrap();
            writeln!(out, "theta hat       {theta:.10}").unwrap();
            writeln!(out, "theta error     {:.3e}", (theta - config.true_theta).abs()).unwrap();
            writeln!(out, "y0 hat          {y0:.10}").unwrap();
            writeln!(out, "y0 error        {:.3e}", (y0 - config.true_y0).abs()).unwrap();
            writeln!(out, "polish time     {seconds:.1} s").unwrap();
        }
        write_file(dir, REPORT_FILE, &out)?;
        Ok(out)
    };
    run().map_err(|e| e.in_stage("report"))
}

/// Outcome of a complete run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub data: SymbolicData,
    pub estimate: EstimateRun,
    pub polish: PolishRun,
    pub text: String,
}

/// Simulate, estimate, polish and report in one go.
pub fn cmd_full(config: &RunConfig) -> Result<RunReport> {
    let data = cmd_simulate(config)?;
    let estimate = cmd_estimate(config, &data)?;
    let polish = cmd_polish(config, &data, &estimate.estimate)?;
    let text = cmd_report(config)?;
    Ok(RunReport {
        data,
        estimate,
        polish,
        text,
    })
}
