//! Exact integer arithmetic functions: factorization, the Mobius function,
//! Euler's phi, the von Mangoldt function and its generalization, and the
//! product-plus-one construction of new primes.
//!
//! Factorization is deterministic trial division by sieved primes up to the
//! square root, so every listed prime factor is certified. All operations
//! are pure functions; logarithms are natural logs in double precision.

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::sieve::base_primes;

/// A certified factorization: `n` equals the product of `prime^exponent`
/// over the listed pairs, primes strictly increasing. `n = 1` has an empty
/// factor list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Total number of divisors of `n`.
    pub fn divisor_count(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    /// Calls `visit` for every divisor of `n`, each exactly once, together
    /// with a flag telling whether the divisor is squarefree and the parity
    /// of its prime support (so the Mobius value is `0` when not squarefree,
    /// else `(-1)^odd`).
    pub fn for_each_divisor(&self, mut visit: impl FnMut(u64, bool, bool)) {
        // Iterative odometer over exponent vectors.
        let k = self.factors.len();
        let mut exps = vec![0u32; k];
        loop {
            let mut d = 1u64;
            let mut squarefree = true;
            let mut odd = false;
            for (i, &(p, _)) in self.factors.iter().enumerate() {
                if exps[i] > 0 {
                    odd ^= true;
                    if exps[i] > 1 {
                        squarefree = false;
                    }
                    for _ in 0..exps[i] {
                        d *= p;
                    }
                }
            }
            visit(d, squarefree, odd);
            let mut i = 0;
            loop {
                if i == k {
                    return;
                }
                if exps[i] < self.factors[i].1 {
                    exps[i] += 1;
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }

    /// The distinct prime factors, ascending.
    pub fn distinct_primes(&self) -> Vec<u64> {
        self.factors.iter().map(|&(p, _)| p).collect()
    }
}

/// Factors `n` by trial division with sieved primes up to sqrt(n).
/// Deterministic; rejects `n = 0`.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::domain("cannot factor 0"));
    }
    let mut rem = n;
    let mut factors = Vec::new();
    let cached = base_primes(n.isqrt().min(1_000_000) + 1);
    for &p in cached.iter() {
        if p * p > rem {
            break;
        }
        if rem.is_multiple_of(p) {
            let mut e = 0;
            while rem.is_multiple_of(p) {
                rem /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    // Second-largest factor above 10^6: continue with odd candidates. Every
    // smaller prime has been divided out, so a successful division is prime.
    let mut d = cached.last().map_or(3, |&p| p | 1) + 2;
    while d <= rem / d {
        if rem.is_multiple_of(d) {
            let mut e = 0;
            while rem.is_multiple_of(d) {
                rem /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += 2;
    }
    if rem > 1 {
        factors.push((rem, 1));
    }
    Ok(Factorization { n, factors })
}

/// Mobius mu: 1 at n = 1, (-1)^r on squarefree n with r prime factors,
/// 0 when n has a repeated prime factor.
pub fn mobius(n: u64) -> Result<i32> {
    let f = factorize(n)?;
    if f.factors.iter().any(|&(_, e)| e > 1) {
        return Ok(0);
    }
    Ok(if f.factors.len() % 2 == 0 { 1 } else { -1 })
}

/// Euler's phi: the count of 1 <= a <= q coprime to q.
pub fn euler_phi(q: u64) -> Result<u64> {
    let f = factorize(q)?;
    let mut phi = q;
    for &(p, _) in &f.factors {
        phi = phi / p * (p - 1);
    }
    Ok(phi)
}

/// Von Mangoldt Lambda: log p when n = p^m, zero otherwise.
pub fn von_mangoldt(n: u64) -> Result<f64> {
    let f = factorize(n)?;
    Ok(match f.factors.as_slice() {
        [(p, _)] => (*p as f64).ln(),
        _ => 0.0,
    })
}

/// Maximum n accepted by the generalized von Mangoldt divisor sum; divisor
/// enumeration stays trivially cheap below this.
pub const LAMBDA_K_MAX_N: u64 = 1_000_000_000_000;

/// Generalized von Mangoldt Lambda_k(n) = sum over d | n of
/// mu(d) (log(n/d))^k, evaluated by direct divisor enumeration.
///
/// Vanishes when n has more than k distinct prime factors. Equals the
/// ordinary von Mangoldt function at k = 1.
pub fn generalized_von_mangoldt(n: u64, k: u32, limits: &Limits) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("order k must be at least 1"));
    }
    if n > LAMBDA_K_MAX_N {
        return Err(Error::domain(format!(
            "n = {n} exceeds the divisor-enumeration ceiling {LAMBDA_K_MAX_N}"
        )));
    }
    let f = factorize(n)?;
    if f.divisor_count() > limits.divisor_budget {
        return Err(Error::budget(format!(
            "{} divisors of {n} exceed the budget {}",
            f.divisor_count(),
            limits.divisor_budget
        )));
    }
    let n_f = n as f64;
    let mut sum = 0.0;
    f.for_each_divisor(|d, squarefree, odd| {
        if squarefree {
            let term = (n_f / d as f64).ln().powi(k as i32);
            sum += if odd { -term } else { term };
        }
    });
    Ok(sum)
}

/// Multiplies the given primes, adds one, and factors the result: the
/// factors are always new primes, absent from the input list.
///
/// Inputs must be distinct primes; the product plus one must fit in 64 bits.
pub fn euclid_step(primes: &[u64]) -> Result<(u64, Vec<u64>)> {
    if primes.is_empty() {
        return Err(Error::domain("need at least one prime"));
    }
    let mut seen = primes.to_vec();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::domain("input primes must be distinct"));
    }
    for &p in primes {
        if !crate::sieve::is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
    }
    let mut product: u64 = 1;
    for &p in primes {
        product = product
            .checked_mul(p)
            .ok_or_else(|| Error::overflow("prime product exceeds 64 bits"))?;
    }
    let n = product
        .checked_add(1)
        .ok_or_else(|| Error::overflow("prime product plus one exceeds 64 bits"))?;
    let new_primes = factorize(n)?.distinct_primes();
    debug_assert!(new_primes.iter().all(|p| seen.binary_search(p).is_err()));
    Ok((n, new_primes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_small() {
        assert_eq!(factorize(1).unwrap().factors, vec![]);
        assert_eq!(factorize(175).unwrap().factors, vec![(5, 2), (7, 1)]);
        assert_eq!(factorize(2).unwrap().factors, vec![(2, 1)]);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn factorize_large_composite_remultiplies() {
        // near 2^62, chosen so trial division stays fast
        let n: u64 = (1 << 62) - 1; // 3 * 715827883 * 2147483647
        let f = factorize(715827883 * 6).unwrap();
        let product: u64 = f.factors.iter().map(|&(p, e)| p.pow(e)).product();
        assert_eq!(product, f.n);
        let f2 = factorize(n / 2147483647).unwrap(); // 3 * 715827883
        assert_eq!(f2.factors, vec![(3, 1), (715827883, 1)]);
        let f3 = factorize(1u64 << 62).unwrap();
        assert_eq!(f3.factors, vec![(2, 62)]);
        let product3: u64 = f3.factors.iter().map(|&(p, e)| p.pow(e)).product();
        assert_eq!(product3, 1u64 << 62);
    }

    #[test]
    fn factors_strictly_increasing_and_certified() {
        for n in [2u64, 60, 97, 1024, 999_983, 720_720] {
            let f = factorize(n).unwrap();
            assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0), "n = {n}");
            for &(p, _) in &f.factors {
                assert!(crate::sieve::is_prime(p), "factor {p} of {n}");
            }
        }
    }

    #[test]
    fn mobius_values() {
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(4).unwrap(), 0);
        assert_eq!(mobius(30).unwrap(), -1);
        assert_eq!(mobius(6).unwrap(), 1);
        assert!(mobius(0).is_err());
    }

    #[test]
    fn euler_phi_values() {
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert_eq!(euler_phi(3).unwrap(), 2);
        assert_eq!(euler_phi(12).unwrap(), 4);
        // brute force for a spread of moduli
        for q in 1..=500u64 {
            let brute = (1..=q).filter(|&a| gcd(a, q) == 1).count() as u64;
            assert_eq!(euler_phi(q).unwrap(), brute, "phi({q})");
        }
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn von_mangoldt_values() {
        assert!((von_mangoldt(8).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(von_mangoldt(6).unwrap(), 0.0);
        assert!((von_mangoldt(7).unwrap() - 7f64.ln()).abs() < 1e-15);
        assert_eq!(von_mangoldt(1).unwrap(), 0.0);
    }

    #[test]
    fn lambda_k_matches_lambda_at_k1() {
        let limits = Limits::default();
        for n in 1..=2000u64 {
            let a = generalized_von_mangoldt(n, 1, &limits).unwrap();
            let b = von_mangoldt(n).unwrap();
            assert!((a - b).abs() < 1e-10, "n = {n}: {a} vs {b}");
        }
    }

    #[test]
    fn lambda_k_nonzero_on_few_factors() {
        let limits = Limits::default();
        // 15 = 3 * 5 has two distinct prime factors, so Lambda_2(15) != 0
        let v = generalized_von_mangoldt(15, 2, &limits).unwrap();
        assert!(v.abs() > 1e-6, "Lambda_2(15) = {v}");
        // and it vanishes for three distinct factors
        let z = generalized_von_mangoldt(2 * 3 * 5, 2, &limits).unwrap();
        assert!(z.abs() < 1e-9, "Lambda_2(30) = {z}");
    }

    #[test]
    fn lambda_k_budget() {
        let limits = Limits {
            divisor_budget: 4,
            ..Limits::default()
        };
        assert!(matches!(
            generalized_von_mangoldt(720_720, 2, &limits),
            Err(Error::Budget(_))
        ));
        assert!(generalized_von_mangoldt(LAMBDA_K_MAX_N + 1, 1, &Limits::default()).is_err());
    }

    #[test]
    fn euclid_step_examples() {
        let (n, new) = euclid_step(&[2, 3, 29]).unwrap();
        assert_eq!(n, 175);
        assert_eq!(new, vec![5, 7]);

        let (n, new) = euclid_step(&[2]).unwrap();
        assert_eq!((n, new), (3, vec![3]));

        let (n, new) = euclid_step(&[2, 3, 5, 7, 11, 13]).unwrap();
        assert_eq!(n, 30031);
        assert_eq!(new, vec![59, 509]);
    }

    #[test]
    fn euclid_step_rejects_bad_input() {
        assert!(euclid_step(&[]).is_err());
        assert!(euclid_step(&[4]).is_err());
        assert!(euclid_step(&[2, 2]).is_err());
        // product of many large primes overflows
        let big = vec![1_000_000_007, 1_000_000_009, 1_000_000_021, 1_000_000_033];
        assert!(matches!(euclid_step(&big), Err(Error::Overflow(_))));
    }

    #[test]
    fn divisor_enumeration_complete() {
        let f = factorize(360).unwrap();
        let mut divisors = Vec::new();
        f.for_each_divisor(|d, _, _| divisors.push(d));
        divisors.sort_unstable();
        let brute: Vec<u64> = (1..=360).filter(|d| 360 % d == 0).collect();
        assert_eq!(divisors, brute);
        assert_eq!(f.divisor_count(), 24);
    }
}
