//! Naive re-implementations used as independent oracles. Everything here
//! is written for obviousness, not speed: trial division, full divisor
//! scans, and direct triple loops. None of it shares code with the
//! library paths it checks.

#![allow(dead_code)]

pub fn naive_is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn naive_mobius(n: u64) -> i64 {
    assert!(n >= 1);
    let mut m = n;
    let mut factors = 0;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return 0;
            }
            factors += 1;
        }
        p += 1;
    }
    if m > 1 {
        factors += 1;
    }
    if factors % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn naive_von_mangoldt(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            return if m == 1 { (p as f64).ln() } else { 0.0 };
        }
        p += 1;
    }
    (m as f64).ln() // n itself is prime
}

/// Full divisor scan for Lambda_R(n): every d from 1 to min(n, R).
pub fn naive_lambda_r(n: u64, r_level: f64) -> f64 {
    let mut sum = 0.0;
    let mut d = 1;
    while d <= n && d as f64 <= r_level {
        if n.is_multiple_of(d) {
            sum += naive_mobius(d) as f64 * (r_level / d as f64).ln();
        }
        d += 1;
    }
    sum
}

pub fn naive_lambda_r_product(n: u64, shifts: &[u64], r_level: f64) -> f64 {
    shifts
        .iter()
        .map(|&h| naive_lambda_r(n + h, r_level))
        .product()
}

fn naive_factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Divisor scan over the tuple polynomial: d runs to R and is tested
/// against the full product in 128 bits.
pub fn naive_lambda_r_sieve(n: u64, shifts: &[u64], ell: u32, r_level: f64) -> f64 {
    let poly: u128 = shifts.iter().map(|&h| (n + h) as u128).product();
    let e = shifts.len() as u32 + ell;
    let mut sum = 0.0;
    let mut d: u64 = 1;
    while d as f64 <= r_level {
        if poly.is_multiple_of(d as u128) {
            sum += naive_mobius(d) as f64 * (r_level / d as f64).ln().powi(e as i32);
        }
        d += 1;
    }
    sum / naive_factorial(e)
}

pub enum NaiveApprox {
    Product,
    Sieve,
}

fn naive_weight(n: u64, shifts: &[u64], ell: u32, r_level: f64, approx: &NaiveApprox) -> f64 {
    let v = match approx {
        NaiveApprox::Product => naive_lambda_r_product(n, shifts, r_level),
        NaiveApprox::Sieve => naive_lambda_r_sieve(n, shifts, ell, r_level),
    };
    v * v
}

pub fn naive_first_moment(
    n_base: u64,
    shifts: &[u64],
    ell: u32,
    r_level: f64,
    approx: &NaiveApprox,
) -> f64 {
    (1..=n_base)
        .map(|n| naive_weight(n, shifts, ell, r_level, approx))
        .sum()
}

pub fn naive_second_moment(
    n_base: u64,
    shifts: &[u64],
    h0: u64,
    ell: u32,
    r_level: f64,
    approx: &NaiveApprox,
) -> f64 {
    (1..=n_base)
        .map(|n| naive_von_mangoldt(n + h0) * naive_weight(n, shifts, ell, r_level, approx))
        .sum()
}

/// Detection sum over (N, 2N] with the shifts offset by one, mirroring the
/// library's documented convention.
pub fn naive_detection_sum(
    n_base: u64,
    shifts: &[u64],
    ell: u32,
    r_level: f64,
    threshold: u32,
    approx: &NaiveApprox,
) -> f64 {
    let offset: Vec<u64> = shifts.iter().map(|&h| h + 1).collect();
    let log_3n = (3.0 * n_base as f64).ln();
    let mut sum = 0.0;
    for n in n_base + 1..=2 * n_base {
        let lambda_total: f64 = offset.iter().map(|&h| naive_von_mangoldt(n + h)).sum();
        let w = naive_weight(n, &offset, ell, r_level, approx);
        sum += (lambda_total - threshold as f64 * log_3n) * w;
    }
    sum
}

fn naive_subsets(h: u64, k: usize) -> Vec<Vec<u64>> {
    fn rec(start: u64, h: u64, k: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..=h {
            cur.push(v);
            rec(v + 1, h, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, h, k, &mut Vec::new(), &mut out);
    out
}

pub fn naive_detection_sum_interval(
    n_base: u64,
    h: u64,
    k: usize,
    ell: u32,
    r_level: f64,
    threshold: u32,
) -> f64 {
    let subsets = naive_subsets(h, k);
    let log_3n = (3.0 * n_base as f64).ln();
    let mut sum = 0.0;
    for n in n_base + 1..=2 * n_base {
        let lambda_total: f64 = (1..=h).map(|j| naive_von_mangoldt(n + j)).sum();
        let inner: f64 = subsets
            .iter()
            .map(|s| {
                let v = naive_lambda_r_sieve(n, s, ell, r_level);
                v * v
            })
            .sum();
        sum += (lambda_total - threshold as f64 * log_3n) * inner;
    }
    sum
}

/// Relative agreement check with an exact-zero escape hatch.
pub fn assert_close_rel(got: f64, want: f64, rel: f64, what: &str) {
    if want == 0.0 {
        assert!(got.abs() < 1e-12, "{what}: got {got}, want exactly 0");
        return;
    }
    let err = (got - want).abs() / want.abs();
    assert!(
        err <= rel,
        "{what}: got {got}, want {want} (rel err {err:.3e})"
    );
}
