//! Zooming maximization of the CES over successive θ grids.
//!
//! Each level runs one strength chain per grid point, picks the point with
//! the largest CES, and replaces the grid by one spanning that point's two
//! neighbors. After the last level the neighbors of the maximizer bound the
//! truncation interval handed to the polishing stage.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::dynamics::MapModel;
use crate::error::{Error, Result};
use crate::samplers::RngStream;
use crate::strength::CandidateVector;
use crate::strength_mcmc::{run_strength_chain, GibbsConfig};
use crate::symbolic::{Interval, SymbolicData};

/// An arithmetic grid `θ_s = start + s·step`, `s = 0 … points−1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    /// Negative for descending grids.
    pub step: f64,
    pub points: usize,
}

impl GridSpec {
    pub const DEFAULT_POINTS: usize = 12;

    /// Validated grid.
    pub fn new(start: f64, step: f64, points: usize) -> Result<Self> {
        let grid = GridSpec {
            start,
            step,
            points,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// The first-level grid `−1.5, −1.545, …, −1.995`.
    pub fn initial() -> Self {
        GridSpec {
            start: -1.5,
            step: -0.045,
            points: Self::DEFAULT_POINTS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 3 {
            return Err(Error::Config(format!(
                "a grid needs at least 3 points, got {}",
                self.points
            )));
        }
        if !(self.step != 0.0) || !self.step.is_finite() {
            return Err(Error::Config(format!("grid step must be nonzero, got {}", self.step)));
        }
        let last = self.theta(self.points - 1);
        if !MapModel::theta_in_range(self.start) || !MapModel::theta_in_range(last) {
            return Err(Error::Config(format!(
                "grid [{}, {}] leaves the parameter space [-2, 0)",
                self.start, last
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn theta(&self, s: usize) -> f64 {
        self.start + self.step * s as f64
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.points).map(|s| self.theta(s)).collect()
    }

    /// Open interval between the neighbors of point `s`.
    pub fn bracket(&self, s: usize) -> Result<Interval> {
        if s == 0 || s + 1 >= self.points {
            return Err(Error::EdgeOfGrid {
                index: s,
                points: self.points,
            });
        }
        let (a, b) = (self.theta(s - 1), self.theta(s + 1));
        Ok(Interval::open(a.min(b), a.max(b)))
    }
}

/// Result of the strength chain at one grid point.
#[derive(Debug, Clone)]
pub struct GridRow {
    pub theta: f64,
    pub ces: u64,
    pub best_y0: f64,
    pub candidate: CandidateVector,
}

/// All grid points of one level, in grid order.
#[derive(Debug, Clone)]
pub struct GridTable {
    /// Level number, counting from 1.
    pub level: usize,
    pub grid: GridSpec,
    pub rows: Vec<GridRow>,
}

impl GridTable {
    /// Index of the largest CES; ties go to the first.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (s, row) in self.rows.iter().enumerate() {
            if row.ces > self.rows[best].ces {
                best = s;
            }
        }
        best
    }

    /// `theta,ces` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,ces\n");
        for row in &self.rows {
            writeln!(out, "{:?},{}", row.theta, row.ces).unwrap();
        }
        out
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))
}

/// Runs one strength chain per grid point on `workers` threads (0 picks the
/// machine default). Point `s` of level `level` draws from the stream
/// [`RngStream::for_grid_point`]`(master, level, s)`, so the table does not
/// depend on the worker count.
pub fn evaluate_grid(
    grid: &GridSpec,
    level: usize,
    data: &SymbolicData,
    config: &GibbsConfig,
    master: u64,
    workers: usize,
) -> Result<GridTable> {
    grid.validate()?;
    config.validate()?;
    let rows = pool(workers)?.install(|| {
        (0..grid.points)
            .into_par_iter()
            .map(|s| {
                let theta = grid.theta(s);
                let rng = RngStream::for_grid_point(master, level, s);
                run_strength_chain(theta, data, config, rng).map(|run| GridRow {
                    theta,
                    ces: run.best_ces,
                    best_y0: run.best_y0,
                    candidate: run.best_candidate,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(GridTable {
        level,
        grid: *grid,
        rows,
    })
}

/// Grid spanning the two neighbors of `argmax` with the same point count.
///
/// Needs at least 4 points: with 3 the neighbors are the grid's own ends
/// and the step would not shrink.
pub fn zoom(grid: &GridSpec, argmax: usize) -> Result<GridSpec> {
    if grid.points < 4 {
        return Err(Error::Config(format!(
            "zooming needs at least 4 grid points, got {}",
            grid.points
        )));
    }
    grid.bracket(argmax)?;
    GridSpec::new(
        grid.theta(argmax - 1),
        2.0 * grid.step / (grid.points - 1) as f64,
        grid.points,
    )
}

/// Outcome of a zooming run.
#[derive(Debug, Clone)]
pub struct ZoomResult {
    /// Maximizer on the last grid.
    pub theta_star: f64,
    /// Open interval between the maximizer's neighbors on the last grid.
    pub truncation: Interval,
    /// Candidate orbit at `theta_star`.
    pub candidate: CandidateVector,
    pub levels: Vec<GridTable>,
}

impl ZoomResult {
    /// Every evaluated `(θ, CES)` pair, level by level.
    pub fn ces_by_theta(&self) -> Vec<(f64, u64)> {
        self.levels
            .iter()
            .flat_map(|t| t.rows.iter().map(|r| (r.theta, r.ces)))
            .collect()
    }

    /// Text summary: one line per level, then the final estimate.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for table in &self.levels {
            let best = &table.rows[table.argmax()];
            writeln!(
                out,
                "level {}: argmax theta = {:.6}, ces = {}, ybar0 = {:.6}",
                table.level, best.theta, best.ces, best.best_y0
            )
            .unwrap();
        }
        writeln!(out, "theta_star = {:?}", self.theta_star).unwrap();
        writeln!(
            out,
            "truncation = ({:?}, {:?})",
            self.truncation.lower, self.truncation.upper
        )
        .unwrap();
        let y0 = self.candidate.0.first().copied().unwrap_or(f64::NAN);
        writeln!(out, "ybar0 = {y0:?}").unwrap();
        out
    }
}

/// Evaluates `levels` successive grids starting from `initial`.
pub fn run_zooming(
    initial: &GridSpec,
    levels: usize,
    data: &SymbolicData,
    config: &GibbsConfig,
    master: u64,
    workers: usize,
) -> Result<ZoomResult> {
    run_zooming_with(initial, levels, data, config, master, workers, |_| Ok(()))
}

/// [`run_zooming`] calling `on_level` with each table as soon as it is
/// evaluated, before the zoom decision can fail.
pub fn run_zooming_with(
    initial: &GridSpec,
    levels: usize,
    data: &SymbolicData,
    config: &GibbsConfig,
    master: u64,
    workers: usize,
    mut on_level: impl FnMut(&GridTable) -> Result<()>,
) -> Result<ZoomResult> {
    if levels == 0 {
        return Err(Error::Config("zooming needs at least one level".into()));
    }
    let mut grid = *initial;
    let mut tables = Vec::with_capacity(levels);
    for level in 1..=levels {
        let table = evaluate_grid(&grid, level, data, config, master, workers)?;
        on_level(&table)?;
        let best = table.argmax();
        if level < levels {
            grid = zoom(&grid, best)?;
        }
        tables.push(table);
    }
    let last = tables.last().expect("at least one level");
    let best = last.argmax();
    let truncation = last.grid.bracket(best)?;
    let row = &last.rows[best];
    Ok(ZoomResult {
        theta_star: row.theta,
        truncation,
        candidate: row.candidate.clone(),
        levels: tables,
    })
}
