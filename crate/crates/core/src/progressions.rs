//! Primes in arithmetic progressions: the expected count li(x)/phi(q), the
//! worst-residue error sum over moduli q <= Q, and an empirical
//! level-of-distribution probe that raises Q = x^theta until the error sum
//! stops being small.

use rayon::prelude::*;

use crate::analytic::li_auto;
use crate::arith::euler_phi;
use crate::config::Limits;
use crate::error::{Error, Result};
use crate::sieve::primes_up_to;

/// Ceiling on x for the error-sum scans; the prime list is materialized.
pub const BV_MAX_X: u64 = 100_000_000;

/// The worst residue class for one modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct BvRecord {
    pub q: u64,
    /// Residue coprime to q attaining the largest deviation (smallest such
    /// residue on ties). For q = 1 the single class is 0.
    pub worst_a: u64,
    /// |pi(x; q, worst_a) - li(x)/phi(q)|.
    pub error: f64,
}

/// Error sum over moduli up to Q with its per-modulus records.
#[derive(Debug, Clone, PartialEq)]
pub struct BvSum {
    pub x: u64,
    pub q_max: u64,
    pub li_x: f64,
    pub total: f64,
    pub records: Vec<BvRecord>,
}

/// Expected count of primes up to x in one progression mod q: li(x)/phi(q).
pub fn ap_expected(x: f64, q: u64) -> Result<f64> {
    if q == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    Ok(li_auto(x)?.value / euler_phi(q)? as f64)
}

fn worst_residue(primes: &[u64], q: u64, expected: f64) -> BvRecord {
    if q == 1 {
        return BvRecord {
            q,
            worst_a: 0,
            error: (primes.len() as f64 - expected).abs(),
        };
    }
    let mut counts = vec![0u64; q as usize];
    for &p in primes {
        counts[(p % q) as usize] += 1;
    }
    let mut worst_a = 0;
    let mut worst = -1.0;
    for a in 0..q {
        if gcd(a, q) != 1 {
            continue;
        }
        let err = (counts[a as usize] as f64 - expected).abs();
        if err > worst {
            worst = err;
            worst_a = a;
        }
    }
    BvRecord {
        q,
        worst_a,
        error: worst,
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Sum over q <= q_max of the worst-residue deviation
/// max over coprime a of |pi(x; q, a) - li(x)/phi(q)|.
///
/// li(x) is evaluated once and shared across all moduli. Records are
/// computed in parallel per modulus and totaled in ascending q order.
pub fn bv_sum(x: u64, q_max: u64, limits: &Limits) -> Result<BvSum> {
    if q_max == 0 {
        return Err(Error::domain("need at least the modulus q = 1"));
    }
    if q_max > x {
        return Err(Error::domain(format!(
            "q_max {q_max} must not exceed x = {x}"
        )));
    }
    if x > BV_MAX_X {
        return Err(Error::budget(format!(
            "error-sum scan capped at x = {BV_MAX_X}"
        )));
    }
    let primes = primes_up_to(x, limits)?;
    let li_x = li_auto(x.max(2) as f64)?.value;
    let records = bv_records(&primes, q_max, li_x);
    let total = records.iter().map(|r| r.error).sum();
    Ok(BvSum {
        x,
        q_max,
        li_x,
        total,
        records,
    })
}

fn bv_records(primes: &[u64], q_max: u64, li_x: f64) -> Vec<BvRecord> {
    (1..=q_max)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|q| {
            let expected = li_x / phi_small(q) as f64;
            worst_residue(primes, q, expected)
        })
        .collect()
}

fn phi_small(q: u64) -> u64 {
    euler_phi(q).expect("q >= 1")
}

/// One row of the level-of-distribution probe.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelProbeRow {
    pub theta: f64,
    pub q_max: u64,
    pub total: f64,
    /// total * (log x)^2 / x: small while the error sum is under control.
    pub normalized: f64,
}

/// Evaluates the error-sum total at Q = floor(x^theta) for each theta on
/// the grid. The prime list and li(x) are shared across rows.
pub fn level_probe(x: u64, thetas: &[f64], limits: &Limits) -> Result<Vec<LevelProbeRow>> {
    if x < 2 {
        return Err(Error::domain("probe needs x >= 2"));
    }
    if x > BV_MAX_X {
        return Err(Error::budget(format!(
            "error-sum scan capped at x = {BV_MAX_X}"
        )));
    }
    for &theta in thetas {
        if !(0.0..=0.9).contains(&theta) {
            return Err(Error::domain(format!(
                "theta {theta} outside [0, 0.9]; larger exponents put Q past the budget"
            )));
        }
    }
    let primes = primes_up_to(x, limits)?;
    let li_x = li_auto(x as f64)?.value;
    let log_x = (x as f64).ln();
    let mut rows = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let q_max = ((x as f64).powf(theta).floor() as u64).clamp(1, x);
        let records = bv_records(&primes, q_max, li_x);
        let total: f64 = records.iter().map(|r| r.error).sum();
        rows.push(LevelProbeRow {
            theta,
            q_max,
            total,
            normalized: total * log_x * log_x / x as f64,
        });
    }
    Ok(rows)
}
