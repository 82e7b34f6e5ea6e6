//! Censored observations and the interval algebra built on them.
//!
//! A bit `bᵢ` only says which half of `X` the hidden orbit point `yᵢ` sits in:
//! `(-1, 0)` for 0 and `[0, 1)` for 1. Index 0 has no observation; its cell is
//! the whole invariant set.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A real interval with independently open or closed ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    pub closed_lower: bool,
    pub closed_upper: bool,
}

impl Interval {
    /// Canonical empty interval.
    pub const EMPTY: Interval = Interval {
        lower: 0.0,
        upper: 0.0,
        closed_lower: false,
        closed_upper: false,
    };

    /// The invariant set `(-1, 1)`.
    pub const X: Interval = Interval::open(-1.0, 1.0);

    /// `(-1, 0)`, the cell of symbol 0.
    pub const NEGATIVE: Interval = Interval::open(-1.0, 0.0);

    /// `[0, 1)`, the cell of symbol 1.
    pub const NON_NEGATIVE: Interval = Interval {
        lower: 0.0,
        upper: 1.0,
        closed_lower: true,
        closed_upper: false,
    };

    pub const fn open(lower: f64, upper: f64) -> Self {
        Interval {
            lower,
            upper,
            closed_lower: false,
            closed_upper: false,
        }
    }

    pub const fn closed(lower: f64, upper: f64) -> Self {
        Interval {
            lower,
            upper,
            closed_lower: true,
            closed_upper: true,
        }
    }

    /// Builds an interval, collapsing anything without points to
    /// [`Interval::EMPTY`].
    #[inline]
    pub fn new(lower: f64, upper: f64, closed_lower: bool, closed_upper: bool) -> Self {
        let iv = Interval {
            lower,
            upper,
            closed_lower,
            closed_upper,
        };
        if iv.is_empty() {
            Interval::EMPTY
        } else {
            iv
        }
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        !(self.lower < self.upper
            || (self.lower == self.upper && self.closed_lower && self.closed_upper))
    }

    /// Lebesgue length; 0 for empty or degenerate intervals.
    pub fn length(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.upper - self.lower
        }
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        let above = if self.closed_lower {
            x >= self.lower
        } else {
            x > self.lower
        };
        let below = if self.closed_upper {
            x <= self.upper
        } else {
            x < self.upper
        };
        above && below
    }

    #[inline]
    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lower, closed_lower) = if self.lower > other.lower {
            (self.lower, self.closed_lower)
        } else if other.lower > self.lower {
            (other.lower, other.closed_lower)
        } else {
            (self.lower, self.closed_lower && other.closed_lower)
        };
        let (upper, closed_upper) = if self.upper < other.upper {
            (self.upper, self.closed_upper)
        } else if other.upper < self.upper {
            (other.upper, other.closed_upper)
        } else {
            (self.upper, self.closed_upper && other.closed_upper)
        };
        Interval::new(lower, upper, closed_lower, closed_upper)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// Anything that assigns an interval to each orbit index `0..=n`.
pub trait CellSet {
    /// Number of observations `n`; valid indices are `0..=n`.
    fn n(&self) -> usize;

    fn cell(&self, index: usize) -> Interval;

    /// Indices whose cell does not contain the matching value.
    fn violations(&self, values: &[f64]) -> Vec<usize> {
        values
            .iter()
            .enumerate()
            .filter(|(i, &y)| *i > self.n() || !self.cell(*i).contains(y))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Observed bits `b₁ … bₙ` with their censoring cells.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicData {
    bits: Vec<u8>,
    /// `cells[0]` is `X`; `cells[i]` is `Dᵢ` for `i ≥ 1`.
    cells: Vec<Interval>,
}

impl SymbolicData {
    pub fn cell_of_bit(bit: u8) -> Interval {
        if bit == 0 {
            Interval::NEGATIVE
        } else {
            Interval::NON_NEGATIVE
        }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Cells `D₁ … Dₙ` (without the index-0 placeholder).
    pub fn observed_cells(&self) -> &[Interval] {
        &self.cells[1..]
    }

    /// The first `m` observations.
    pub fn prefix(&self, m: usize) -> Result<SymbolicData> {
        if m == 0 || m > self.bits.len() {
            return Err(Error::Config(format!(
                "prefix length {m} outside 1..={}",
                self.bits.len()
            )));
        }
        Ok(cells_from_bits(&self.bits[..m]).expect("nonempty prefix"))
    }

    /// Whether `y` lies in the observed cell `index` (index ≥ 1).
    #[inline(always)]
    pub(crate) fn matches(&self, index: usize, y: f64) -> bool {
        if self.bits[index - 1] == 0 {
            y > -1.0 && y < 0.0
        } else {
            (0.0..1.0).contains(&y)
        }
    }

    /// Single line of `0`/`1` characters followed by a newline.
    pub fn to_bit_line(&self) -> String {
        let mut s: String = self.bits.iter().map(|&b| char::from(b'0' + b)).collect();
        s.push('\n');
        s
    }

    pub fn from_bit_line(text: &str) -> Result<SymbolicData> {
        let line = text.trim();
        let bits = line
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::Parse(format!("unexpected character {other:?} in bit line"))),
            })
            .collect::<Result<Vec<_>>>()?;
        cells_from_bits(&bits)
    }

    /// `index,lower,upper` rows for `D₁ … Dₙ`.
    pub fn cells_csv(&self) -> String {
        intervals_csv(self.cells.iter().enumerate().skip(1))
    }
}

impl CellSet for SymbolicData {
    fn n(&self) -> usize {
        self.bits.len()
    }

    fn cell(&self, index: usize) -> Interval {
        self.cells[index]
    }
}

/// Maps bits to cells; fails only on an empty sequence or a value that is
/// not 0 or 1.
pub fn cells_from_bits(bits: &[u8]) -> Result<SymbolicData> {
    if bits.is_empty() {
        return Err(Error::Parse("empty bit sequence".into()));
    }
    if let Some(bad) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::Parse(format!("bit value {bad}")));
    }
    let mut cells = Vec::with_capacity(bits.len() + 1);
    cells.push(Interval::X);
    cells.extend(bits.iter().map(|&b| SymbolicData::cell_of_bit(b)));
    Ok(SymbolicData {
        bits: bits.to_vec(),
        cells,
    })
}

/// Cells narrowed to `(cᵢ − ε, cᵢ + ε) ∩ Dᵢ` around a center orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinedCells {
    pub epsilon: f64,
    pub cells: Vec<Interval>,
}

impl RefinedCells {
    pub fn to_csv(&self) -> String {
        intervals_csv(self.cells.iter().enumerate())
    }
}

impl CellSet for RefinedCells {
    fn n(&self) -> usize {
        self.cells.len() - 1
    }

    fn cell(&self, index: usize) -> Interval {
        self.cells[index]
    }
}

/// Narrows each base cell to an ε-window around `center`.
///
/// `center` may be shorter than `n + 1`; only indices `0..center.len()` are
/// produced. Any empty result is an error naming its index.
pub fn refine_cells(center: &[f64], epsilon: f64, base: &SymbolicData) -> Result<RefinedCells> {
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    if center.is_empty() || center.len() > base.n() + 1 {
        return Err(Error::Config(format!(
            "center length {} incompatible with {} observations",
            center.len(),
            base.n()
        )));
    }
    let cells = center
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let window = Interval::open(c - epsilon, c + epsilon);
            let cell = window.intersect(&base.cell(i));
            if cell.is_empty() {
                Err(Error::EmptyRefinedCell { index: i })
            } else {
                Ok(cell)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RefinedCells { epsilon, cells })
}

fn intervals_csv<'a>(rows: impl Iterator<Item = (usize, &'a Interval)>) -> String {
    let mut out = String::from("index,lower,upper\n");
    for (i, iv) in rows {
        writeln!(out, "{i},{:?},{:?}", iv.lower, iv.upper).unwrap();
    }
    out
}
