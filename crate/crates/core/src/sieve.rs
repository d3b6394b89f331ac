//! Segmented Sieve of Eratosthenes and the counting functions built on it.
//!
//! All counting walks fixed-size segments so memory stays bounded by the
//! segment size rather than by the range being scanned. Base primes up to
//! the square root of the scan ceiling are computed once per process and
//! cached; reaching a million only ever needs the 168 primes below a
//! thousand. Segments are independent work units, so the integer-valued
//! counts are reduced in parallel; the result is exact and identical for
//! any segment size or thread count.

use std::sync::{Arc, RwLock};

use rayon::prelude::*;

use crate::config::Limits;
use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Base primes
// ---------------------------------------------------------------------------

/// Plain bool-array sieve, used only to produce base primes.
fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    primes
}

static BASE_CACHE: RwLock<Option<(u64, Arc<Vec<u64>>)>> = RwLock::new(None);

/// Primes up to `limit`, served from a process-wide cache that grows on
/// demand. The cache doubles so repeated slightly-larger requests do not
/// re-sieve.
pub(crate) fn base_primes(limit: u64) -> Arc<Vec<u64>> {
    {
        let guard = BASE_CACHE.read().expect("base prime cache poisoned");
        if let Some((cached_limit, primes)) = guard.as_ref() {
            if *cached_limit >= limit {
                return Arc::clone(primes);
            }
        }
    }
    let mut guard = BASE_CACHE.write().expect("base prime cache poisoned");
    if let Some((cached_limit, primes)) = guard.as_ref() {
        if *cached_limit >= limit {
            return Arc::clone(primes);
        }
    }
    let target = limit.max(1 << 16).next_power_of_two();
    let primes = Arc::new(simple_sieve(target));
    *guard = Some((target, Arc::clone(&primes)));
    primes
}

// ---------------------------------------------------------------------------
// Segment machinery
// ---------------------------------------------------------------------------

/// Fills `flags` so that `flags[i]` is true iff `seg_lo + i` is prime,
/// given base primes covering sqrt(seg_lo + len).
pub(crate) fn sieve_flags(seg_lo: u64, len: usize, base: &[u64]) -> Vec<bool> {
    let mut flags = vec![true; len];
    let seg_hi = seg_lo + len as u64;
    for small in 0..2u64 {
        if small >= seg_lo && small < seg_hi {
            flags[(small - seg_lo) as usize] = false;
        }
    }
    for &p in base {
        if p.saturating_mul(p) >= seg_hi {
            break;
        }
        let first_multiple = seg_lo.div_ceil(p) * p;
        let mut m = first_multiple.max(p * p);
        while m < seg_hi {
            flags[(m - seg_lo) as usize] = false;
            m += p;
        }
    }
    flags
}

/// Splits `[lo, hi]` into `[start, end)` half-open chunks of the configured
/// segment size.
fn segment_bounds(lo: u64, hi: u64, segment: u64) -> Vec<(u64, u64)> {
    let mut bounds = Vec::new();
    let mut start = lo;
    while start <= hi {
        let end = start.saturating_add(segment).min(hi + 1);
        bounds.push((start, end));
        if end > hi {
            break;
        }
        start = end;
    }
    bounds
}

/// Runs `per_segment` over every segment of `[lo, hi]`, in parallel, and
/// sums the returned counts. The callback receives the segment base and a
/// primality flag for each number in the segment plus `lookahead` numbers
/// beyond its end (so pair and tuple patterns can cross segment boundaries
/// without double counting).
fn count_over_segments<F>(lo: u64, hi: u64, lookahead: u64, limits: &Limits, per_segment: F) -> u64
where
    F: Fn(u64, &[bool], u64) -> u64 + Sync,
{
    if hi < lo {
        return 0;
    }
    let base = base_primes((hi + lookahead).isqrt() + 1);
    segment_bounds(lo, hi, limits.segment())
        .into_par_iter()
        .map(|(start, end)| {
            let len = (end - start + lookahead) as usize;
            let flags = sieve_flags(start, len, &base);
            per_segment(start, &flags, end)
        })
        .sum()
}

// ---------------------------------------------------------------------------
// PrimeTable
// ---------------------------------------------------------------------------

/// Queryable set of primes over a closed interval, produced by segmented
/// sieving. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    lo: u64,
    hi: u64,
    bits: Vec<u64>,
}

impl PrimeTable {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// Primality of `n`, or `None` when `n` is outside `[lo, hi]`.
    pub fn is_prime(&self, n: u64) -> Option<bool> {
        if n < self.lo || n > self.hi {
            return None;
        }
        let idx = (n - self.lo) as usize;
        Some(self.bits[idx / 64] >> (idx % 64) & 1 == 1)
    }

    /// The primes in the table, ascending.
    pub fn iter_primes(&self) -> impl Iterator<Item = u64> + '_ {
        (self.lo..=self.hi).filter(move |&n| self.is_prime(n) == Some(true))
    }

    pub fn count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }
}

/// Highest point a prime table may reach; base primes up to 10^6 suffice
/// to certify everything below it.
pub const SIEVE_RANGE_MAX_HI: u64 = 1_000_000_000_000;

/// Sieves the closed interval `[lo, hi]` into a [`PrimeTable`].
///
/// Construction only uses base primes up to the square root of `hi`;
/// memory for the working set is bounded by the segment size, and the
/// resulting table is bounded by the interval span (budgeted).
pub fn sieve_range(lo: u64, hi: u64, limits: &Limits) -> Result<PrimeTable> {
    if hi < lo {
        return Err(Error::domain(format!("empty range: hi {hi} < lo {lo}")));
    }
    if lo < 2 {
        return Err(Error::domain(format!(
            "range must start at 2 or above, got {lo}"
        )));
    }
    if hi > SIEVE_RANGE_MAX_HI {
        return Err(Error::budget(format!(
            "prime tables are capped at {SIEVE_RANGE_MAX_HI}"
        )));
    }
    let span = hi - lo + 1;
    if span > limits.table_span {
        return Err(Error::budget(format!(
            "prime table span {span} exceeds budget {}",
            limits.table_span
        )));
    }
    let base = base_primes(hi.isqrt() + 1);
    let mut bits = vec![0u64; span.div_ceil(64) as usize];
    for (start, end) in segment_bounds(lo, hi, limits.segment()) {
        let flags = sieve_flags(start, (end - start) as usize, &base);
        for (i, &is_p) in flags.iter().enumerate() {
            if is_p {
                let idx = (start - lo) as usize + i;
                bits[idx / 64] |= 1 << (idx % 64);
            }
        }
    }
    Ok(PrimeTable { lo, hi, bits })
}

// ---------------------------------------------------------------------------
// Counting functions
// ---------------------------------------------------------------------------

fn check_max(x: u64, limits: &Limits, what: &str) -> Result<()> {
    if x > limits.max_x {
        return Err(Error::budget(format!(
            "{what} at {x} exceeds configured maximum {}",
            limits.max_x
        )));
    }
    Ok(())
}

/// pi(x): the number of primes less than or equal to `x`.
pub fn prime_count(x: u64, limits: &Limits) -> Result<u64> {
    check_max(x, limits, "prime count")?;
    if x < 2 {
        return Ok(0);
    }
    Ok(count_over_segments(2, x, 0, limits, |_, flags, _| {
        flags.iter().filter(|&&p| p).count() as u64
    }))
}

/// The n-th prime (1-indexed: the first prime is 2).
pub fn nth_prime(n: u64, limits: &Limits) -> Result<u64> {
    if n == 0 {
        return Err(Error::domain("prime indices start at 1"));
    }
    let base = base_primes(limits.max_x.isqrt() + 1);
    let mut seen = 0u64;
    for (start, end) in segment_bounds(2, limits.max_x, limits.segment()) {
        let flags = sieve_flags(start, (end - start) as usize, &base);
        for (i, &is_p) in flags.iter().enumerate() {
            if is_p {
                seen += 1;
                if seen == n {
                    return Ok(start + i as u64);
                }
            }
        }
    }
    Err(Error::budget(format!(
        "prime #{n} lies beyond the configured maximum {}",
        limits.max_x
    )))
}

/// pi_2(x): twin prime pairs counted by their smaller member, so the pair
/// (3,5) already contributes at x = 3.
pub fn twin_count(x: u64, limits: &Limits) -> Result<u64> {
    check_max(x, limits, "twin count")?;
    if x < 3 {
        return Ok(0);
    }
    Ok(count_over_segments(2, x, 2, limits, |start, flags, end| {
        let mut c = 0;
        for p in start..end {
            let i = (p - start) as usize;
            if flags[i] && flags[i + 2] {
                c += 1;
            }
        }
        c
    }))
}

/// pi(x; H): the number of n in [1, x] with n + h prime for every shift h.
pub fn tuple_count(x: u64, shifts: &crate::tuples::ShiftTuple, limits: &Limits) -> Result<u64> {
    let h_max = shifts.diameter();
    check_max(x.saturating_add(h_max), limits, "tuple count")?;
    if x == 0 {
        return Ok(0);
    }
    let hs = shifts.shifts();
    Ok(count_over_segments(
        1,
        x,
        h_max,
        limits,
        |start, flags, end| {
            let mut c = 0;
            for n in start..end {
                if hs.iter().all(|&h| flags[(n + h - start) as usize]) {
                    c += 1;
                }
            }
            c
        },
    ))
}

/// pi(x; q, a): primes up to `x` in the progression `a (mod q)`.
pub fn prime_count_ap(x: u64, q: u64, a: u64, limits: &Limits) -> Result<u64> {
    if q == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    if a >= q {
        return Err(Error::domain(format!("residue {a} must lie in [0, {q})")));
    }
    check_max(x, limits, "progression count")?;
    if x < 2 {
        return Ok(0);
    }
    Ok(count_over_segments(2, x, 0, limits, |start, flags, end| {
        (start..end)
            .filter(|&p| flags[(p - start) as usize] && p % q == a)
            .count() as u64
    }))
}

/// Counts primes up to `x` in every residue class mod `q` in one pass.
/// Index `a` of the result holds pi(x; q, a).
pub fn prime_count_ap_all(x: u64, q: u64, limits: &Limits) -> Result<Vec<u64>> {
    if q == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    check_max(x, limits, "progression count")?;
    let mut hist = vec![0u64; q as usize];
    if x < 2 {
        return Ok(hist);
    }
    let base = base_primes(x.isqrt() + 1);
    let partials: Vec<Vec<u64>> = segment_bounds(2, x, limits.segment())
        .into_par_iter()
        .map(|(start, end)| {
            let flags = sieve_flags(start, (end - start) as usize, &base);
            let mut h = vec![0u64; q as usize];
            for p in start..end {
                if flags[(p - start) as usize] {
                    h[(p % q) as usize] += 1;
                }
            }
            h
        })
        .collect();
    for part in partials {
        for (acc, v) in hist.iter_mut().zip(part) {
            *acc += v;
        }
    }
    Ok(hist)
}

/// Streams every prime in `[lo, hi]` to `visit`, ascending, one segment at
/// a time. Sequential, so the visit order is part of the contract.
pub(crate) fn for_each_prime(
    lo: u64,
    hi: u64,
    limits: &Limits,
    mut visit: impl FnMut(u64),
) -> Result<()> {
    if hi < lo || hi < 2 {
        return Ok(());
    }
    let lo = lo.max(2);
    let base = base_primes(hi.isqrt() + 1);
    for (start, end) in segment_bounds(lo, hi, limits.segment()) {
        let flags = sieve_flags(start, (end - start) as usize, &base);
        for p in start..end {
            if flags[(p - start) as usize] {
                visit(p);
            }
        }
    }
    Ok(())
}

/// All primes up to `x`, materialized ascending.
pub fn primes_up_to(x: u64, limits: &Limits) -> Result<Vec<u64>> {
    check_max(x, limits, "prime listing")?;
    if x < 2 {
        return Ok(Vec::new());
    }
    let base = base_primes(x.isqrt() + 1);
    let chunks: Vec<Vec<u64>> = segment_bounds(2, x, limits.segment())
        .into_par_iter()
        .map(|(start, end)| {
            let flags = sieve_flags(start, (end - start) as usize, &base);
            (start..end)
                .filter(|&p| flags[(p - start) as usize])
                .collect()
        })
        .collect();
    Ok(chunks.concat())
}

// ---------------------------------------------------------------------------
// Gap statistics
// ---------------------------------------------------------------------------

/// One consecutive-prime gap, with the gap normalized by log p.
#[derive(Debug, Clone, PartialEq)]
pub struct GapRecord {
    /// Global index of `prime` in the sequence of all primes (p_1 = 2).
    pub index: u64,
    pub prime: u64,
    pub next_prime: u64,
    /// (next_prime - prime) / log(prime).
    pub normalized_gap: f64,
}

/// Range summary for [`gap_statistics`].
#[derive(Debug, Clone, PartialEq)]
pub struct GapSummary {
    pub primes_in_range: u64,
    pub min_normalized_gap: f64,
    /// (last prime - first prime) / (primes_in_range - 1): the average gap,
    /// which tracks log x.
    pub mean_gap: f64,
}

/// Gap records for every consecutive prime pair inside `[x_lo, x_hi]`.
pub fn gap_statistics(
    x_lo: u64,
    x_hi: u64,
    limits: &Limits,
) -> Result<(Vec<GapRecord>, GapSummary)> {
    if x_lo < 2 {
        return Err(Error::domain("gap scan must start at 2 or above"));
    }
    if x_hi < x_lo {
        return Err(Error::domain(format!("empty range: {x_hi} < {x_lo}")));
    }
    check_max(x_hi, limits, "gap scan")?;
    let first_index = prime_count(x_lo - 1, limits)? + 1;

    let base = base_primes(x_hi.isqrt() + 1);
    let mut records = Vec::new();
    let mut prev: Option<u64> = None;
    let mut index = first_index;
    let mut first_prime = None;
    let mut last_prime = None;
    for (start, end) in segment_bounds(x_lo, x_hi, limits.segment()) {
        let flags = sieve_flags(start, (end - start) as usize, &base);
        for p in start..end {
            if !flags[(p - start) as usize] {
                continue;
            }
            if first_prime.is_none() {
                first_prime = Some(p);
            }
            last_prime = Some(p);
            if let Some(prev_p) = prev {
                records.push(GapRecord {
                    index,
                    prime: prev_p,
                    next_prime: p,
                    normalized_gap: (p - prev_p) as f64 / (prev_p as f64).ln(),
                });
                index += 1;
            }
            prev = Some(p);
        }
    }

    let count = records.len() as u64 + u64::from(prev.is_some());
    if count < 2 {
        return Err(Error::domain(format!(
            "need at least 2 primes in [{x_lo}, {x_hi}] for gap statistics, found {count}"
        )));
    }
    let (first_prime, last_prime) = (first_prime.unwrap(), last_prime.unwrap());
    let summary = GapSummary {
        primes_in_range: count,
        min_normalized_gap: records
            .iter()
            .map(|r| r.normalized_gap)
            .fold(f64::INFINITY, f64::min),
        mean_gap: (last_prime - first_prime) as f64 / (count - 1) as f64,
    };
    Ok((records, summary))
}

// ---------------------------------------------------------------------------
// Scalar primality (for inputs beyond any table)
// ---------------------------------------------------------------------------

/// Deterministic primality by trial division. Uses the cached base primes
/// up to 10^6 and odd candidates beyond, so 64-bit inputs are always
/// decided exactly; inputs whose second-largest prime factor exceeds 10^6
/// simply take longer.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let root = n.isqrt();
    let cached = base_primes(root.min(1_000_000) + 1);
    for &p in cached.iter() {
        if p > root {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = cached.last().map_or(3, |&p| p | 1) + 2;
    while d <= root {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}
