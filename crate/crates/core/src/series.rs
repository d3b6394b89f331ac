//! Data series over an x grid: counting functions next to their continuous
//! approximants, for reproducing the classic comparison plots as CSV.
//!
//! Counts are accumulated in a single streaming pass over the sieve, so a
//! dense grid costs the same as a single evaluation at the maximum.
//! Integrals are extended interval by interval along the grid.

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::sieve::{base_primes, sieve_flags};

/// A grid of evaluation points with one or more named columns of the same
/// length. Column names are unique; the grid is strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct CountSeries {
    pub x_grid: Vec<u64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl CountSeries {
    pub fn len(&self) -> usize {
        self.x_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_grid.is_empty()
    }
}

/// The ten predefined figures: each is an x range plus a set of curves.
/// Figure 10's scaled li_2 uses the eight-digit twin-prime constant
/// 1.32032362, matching the published plot it reproduces.
pub const FIGURE_COUNT: u32 = 10;

const TWIN_CONSTANT_8_DIGITS: f64 = 1.32032362;

#[derive(Clone, Copy)]
enum Column {
    Pi,
    Pi2,
    XOverLog,
    XOverLog2,
    Li,
    Li2,
    ScaledLi2,
}

impl Column {
    fn name(self) -> &'static str {
        match self {
            Column::Pi => "pi",
            Column::Pi2 => "pi2",
            Column::XOverLog => "x_over_log",
            Column::XOverLog2 => "x_over_log2",
            Column::Li => "li",
            Column::Li2 => "li2",
            Column::ScaledLi2 => "scaled_li2",
        }
    }
}

fn figure_spec(figure_id: u32) -> Result<(u64, u64, &'static [Column])> {
    use Column::*;
    Ok(match figure_id {
        1 => (1, 100, &[Pi] as &[Column]),
        2 => (1, 1_000, &[Pi]),
        3 => (1, 1_000_000, &[Pi]),
        4 => (1, 1_000_000, &[Pi, XOverLog]),
        5 => (1_000_000, 1_100_000, &[Li, Pi, XOverLog]),
        6 => (0, 100, &[Pi2]),
        7 => (2, 1_000, &[Pi2]),
        8 => (2, 1_000_000, &[Pi2]),
        9 => (1, 1_000_000, &[Pi2, Li2, XOverLog2]),
        10 => (1, 1_000_000, &[Pi2, ScaledLi2]),
        other => {
            return Err(Error::domain(format!(
                "unknown figure id {other}; use 1..=10"
            )))
        }
    })
}

/// The data series behind one of the ten predefined figures, sampled at
/// `resolution` grid points across the figure's x range.
pub fn figure_series(figure_id: u32, resolution: usize, limits: &Limits) -> Result<CountSeries> {
    let (lo, hi, columns) = figure_spec(figure_id)?;
    if resolution < 2 {
        return Err(Error::domain("resolution must be at least 2"));
    }
    let x_grid = integer_grid(lo, hi, resolution);
    let mut out = Vec::with_capacity(columns.len());
    for &col in columns {
        let values = match col {
            Column::Pi => cumulative_counts(&x_grid, limits, CountKind::Primes)?,
            Column::Pi2 => cumulative_counts(&x_grid, limits, CountKind::TwinPairs)?,
            Column::XOverLog => x_grid.iter().map(|&x| ratio(x, 1)).collect(),
            Column::XOverLog2 => x_grid.iter().map(|&x| ratio(x, 2)).collect(),
            Column::Li => integral_column(&x_grid, 1, 1.0)?,
            Column::Li2 => integral_column(&x_grid, 2, 1.0)?,
            Column::ScaledLi2 => integral_column(&x_grid, 2, TWIN_CONSTANT_8_DIGITS)?,
        };
        out.push((col.name().to_string(), values));
    }
    Ok(CountSeries {
        x_grid,
        columns: out,
    })
}

/// Evenly spaced integer grid from lo to hi inclusive, deduplicated so the
/// grid stays strictly increasing when the range is narrower than the
/// requested resolution.
fn integer_grid(lo: u64, hi: u64, resolution: usize) -> Vec<u64> {
    let span = (hi - lo) as f64;
    let steps = (resolution - 1) as f64;
    let mut grid: Vec<u64> = (0..resolution)
        .map(|i| lo + (span * i as f64 / steps).round() as u64)
        .collect();
    grid.dedup();
    grid
}

fn ratio(x: u64, k: i32) -> f64 {
    // x / (log x)^k has a pole at x = 1; the plots anchor that point at 0
    if x <= 1 {
        return 0.0;
    }
    x as f64 / (x as f64).ln().powi(k)
}

enum CountKind {
    Primes,
    TwinPairs,
}

/// Counts at each grid point in one streaming pass: grid points are
/// visited in order as the sieve walks segments.
fn cumulative_counts(grid: &[u64], limits: &Limits, kind: CountKind) -> Result<Vec<f64>> {
    let hi = *grid.last().unwrap();
    if hi > limits.max_x {
        return Err(Error::budget(format!(
            "grid extends to {hi}, past the configured maximum {}",
            limits.max_x
        )));
    }
    let mut out = Vec::with_capacity(grid.len());
    let mut next = 0; // next grid index awaiting its count
    let mut count = 0u64;
    while next < grid.len() && grid[next] < 2 {
        out.push(0.0);
        next += 1;
    }
    if next == grid.len() {
        return Ok(out);
    }
    let lookahead = match kind {
        CountKind::Primes => 0u64,
        CountKind::TwinPairs => 2,
    };
    let base = base_primes((hi + lookahead).isqrt() + 1);
    let segment = limits.segment();
    let mut lo = 2u64;
    while lo <= hi {
        let seg_hi = lo.saturating_add(segment - 1).min(hi);
        let len = (seg_hi - lo + 1 + lookahead) as usize;
        let flags = sieve_flags(lo, len, &base);
        for n in lo..=seg_hi {
            let hit = match kind {
                CountKind::Primes => flags[(n - lo) as usize],
                CountKind::TwinPairs => flags[(n - lo) as usize] && flags[(n - lo) as usize + 2],
            };
            if hit {
                count += 1;
            }
            while next < grid.len() && grid[next] == n {
                out.push(count as f64);
                next += 1;
            }
        }
        lo = seg_hi + 1;
    }
    debug_assert_eq!(out.len(), grid.len());
    Ok(out)
}

/// li_k along the grid, scaled: each interval [x_i, x_{i+1}] is integrated
/// once and prefix-summed. Grid points below 2 are anchored at 0, matching
/// the counting columns.
fn integral_column(grid: &[u64], k: u32, scale: f64) -> Result<Vec<f64>> {
    let per_interval_tol = 1e-10;
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    let mut prev = 2.0f64;
    for &x in grid {
        let x = x as f64;
        if x <= 2.0 {
            out.push(0.0);
            continue;
        }
        let piece = crate::analytic::adaptive_simpson(
            |t: f64| t.ln().powi(k as i32).recip(),
            prev,
            x,
            per_interval_tol,
        )?;
        acc += piece.value;
        prev = x;
        out.push(scale * acc);
    }
    Ok(out)
}
