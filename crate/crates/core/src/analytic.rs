//! Continuous approximants and partial sums: the logarithmic integral and
//! its generalizations, the asymptotic expansion, Mertens products, Mobius
//! partial sums, harmonic sums, reciprocal sums over twin primes, and the
//! finite Euler-product / zeta-sum consistency check.
//!
//! Quadrature is adaptive Simpson with an interval-halving error estimate;
//! the integrands 1/(log t)^k are smooth on [2, oo). Partial sums are
//! evaluated in a fixed ascending order so results are reproducible
//! regardless of configuration.

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::sieve::base_primes;

/// Result of an error-controlled integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Sum of per-panel Richardson estimates; at most the requested
    /// tolerance when integration succeeds.
    pub abs_error_estimate: f64,
    pub evaluations: u64,
}

const MAX_DEPTH: u32 = 60;

struct SimpsonState<'a, F: Fn(f64) -> f64> {
    f: &'a F,
    evaluations: u64,
    error: f64,
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    st: &mut SimpsonState<'_, F>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = (st.f)(lm);
    let frm = (st.f)(rm);
    st.evaluations += 2;
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a) < f64::EPSILON * a.abs() {
        st.error += delta.abs() / 15.0;
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::budget("quadrature failed to converge"));
    }
    let l = adaptive(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?;
    let r = adaptive(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?;
    Ok(l + r)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` by adaptive
/// Simpson refinement.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::domain("tolerance must be positive"));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let mut st = SimpsonState {
        f: &f,
        evaluations: 3,
        error: 0.0,
    };
    let whole = simpson(fa, fm, fb, b - a);
    let value = adaptive(&mut st, a, b, fa, fm, fb, whole, tol, 0)?;
    Ok(QuadratureResult {
        value,
        abs_error_estimate: st.error,
        evaluations: st.evaluations,
    })
}

/// li(x): the logarithmic integral from 2 to x.
pub fn li(x: f64, tol: f64) -> Result<QuadratureResult> {
    li_k(x, 1, tol)
}

/// li_k(x): the integral of 1/(log t)^k from 2 to x.
pub fn li_k(x: f64, k: u32, tol: f64) -> Result<QuadratureResult> {
    if x < 2.0 {
        return Err(Error::domain(format!(
            "li_k is defined for x >= 2, got {x}"
        )));
    }
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    adaptive_simpson(|t: f64| t.ln().powi(k as i32).recip(), 2.0, x, tol)
}

/// Default-tolerance li: absolute tolerance 1e-9 scaled by the magnitude
/// of the value (estimated by a coarse pass).
pub fn li_auto(x: f64) -> Result<QuadratureResult> {
    li_k_auto(x, 1)
}

/// Default-tolerance li_k; see [`li_auto`].
pub fn li_k_auto(x: f64, k: u32) -> Result<QuadratureResult> {
    let rough = li_k(x, k, 1e-3)?;
    li_k(x, k, 1e-9 * rough.value.abs().max(1.0))
}

/// The divergent asymptotic expansion of li truncated at `terms` terms:
/// x/log x + x/(log x)^2 + 2! x/(log x)^3 + ...
pub fn li_asymptotic(x: f64, terms: u32) -> Result<f64> {
    if x.is_nan() || x <= 1.0 {
        return Err(Error::domain(format!("expansion needs x > 1, got {x}")));
    }
    if terms == 0 {
        return Err(Error::domain("need at least one term"));
    }
    let log_x = x.ln();
    let mut sum = 0.0;
    let mut term = x / log_x;
    for j in 1..=terms {
        sum += term;
        term *= j as f64 / log_x;
    }
    Ok(sum)
}

// ---------------------------------------------------------------------------
// Mertens products and Mobius sums
// ---------------------------------------------------------------------------

/// Largest argument accepted by the exact-rational Mertens product. The
/// 128-bit fraction overflows well before this; the bound just keeps the
/// prime iteration cheap.
pub const MERTENS_EXACT_MAX: u64 = 1_000_000;

/// The product of (1 - 1/p) over primes p <= limit, as an exact reduced
/// fraction. Overflow of the 128-bit fraction is an error, never a float
/// fallback.
pub fn mertens_product_exact(limit: u64) -> Result<Rational> {
    if limit < 2 {
        return Err(Error::domain("product needs limit >= 2"));
    }
    if limit > MERTENS_EXACT_MAX {
        return Err(Error::budget(format!(
            "exact Mertens product capped at {MERTENS_EXACT_MAX}"
        )));
    }
    let primes = base_primes(limit);
    let mut acc = Rational::ONE;
    for &p in primes.iter().take_while(|&&p| p <= limit) {
        let factor = Rational::new(p as i128 - 1, p as i128)?;
        acc = acc.checked_mul(&factor)?;
    }
    Ok(acc)
}

/// The product of (1 - 1/p) over primes p <= limit in double precision,
/// accumulated in log space.
pub fn mertens_product_real(limit: u64, limits: &Limits) -> Result<f64> {
    if limit < 2 {
        return Err(Error::domain("product needs limit >= 2"));
    }
    if limit > limits.max_x {
        return Err(Error::budget(format!(
            "Mertens product at {limit} exceeds configured maximum {}",
            limits.max_x
        )));
    }
    let mut log_sum = 0.0;
    crate::sieve::for_each_prime(2, limit, limits, |p| {
        log_sum += (-1.0 / p as f64).ln_1p();
    })?;
    Ok(log_sum.exp())
}

/// Sum of mu(d)/d over all divisors d of the primorial of the primes up to
/// `limit`, as an exact fraction. The primorial of the 20 primes up to 71
/// has 2^20 squarefree divisors, the enumeration budget.
pub fn mobius_divisor_sum(limit: u64) -> Result<Rational> {
    if limit < 2 {
        return Err(Error::domain("primorial needs limit >= 2"));
    }
    let primes: Vec<i128> = base_primes(limit)
        .iter()
        .take_while(|&&p| p <= limit)
        .map(|&p| p as i128)
        .collect();
    if primes.len() > 20 {
        return Err(Error::budget(format!(
            "primorial of {} primes has more than 2^20 divisors",
            primes.len()
        )));
    }
    let mut primorial: i128 = 1;
    for &p in &primes {
        primorial = primorial
            .checked_mul(p)
            .ok_or_else(|| Error::overflow("primorial exceeds 128 bits"))?;
    }
    // Sum mu(d) * (primorial / d) over squarefree divisors d, sharing the
    // primorial as the common denominator. DFS carries the exact quotient.
    fn dfs(primes: &[i128], i: usize, quotient: i128, sign: i128, acc: &mut i128) {
        if i == primes.len() {
            *acc += sign * quotient;
            return;
        }
        dfs(primes, i + 1, quotient, sign, acc);
        dfs(primes, i + 1, quotient / primes[i], -sign, acc);
    }
    let mut numerator: i128 = 0;
    dfs(&primes, 0, primorial, 1, &mut numerator);
    Rational::new(numerator, primorial)
}

/// Partial sum of mu(n)/n for n <= n_max, evaluated with a segmented
/// Mobius sieve in a fixed ascending order.
pub fn mobius_partial_sum(n_max: u64, limits: &Limits) -> Result<f64> {
    const CAP: u64 = 100_000_000;
    if n_max == 0 {
        return Err(Error::domain("sum needs n >= 1"));
    }
    if n_max > CAP {
        return Err(Error::budget(format!("Mobius partial sum capped at {CAP}")));
    }
    let mut sum = 0.0;
    for_each_mobius(n_max, limits, |n, mu| {
        if mu != 0 {
            sum += mu as f64 / n as f64;
        }
    });
    Ok(sum)
}

/// Streams (n, mu(n)) for n = 1..=n_max in ascending order using a
/// segmented factor sieve.
pub(crate) fn for_each_mobius(n_max: u64, limits: &Limits, mut visit: impl FnMut(u64, i8)) {
    let base = base_primes(n_max.isqrt() + 1);
    let segment = limits.segment();
    let mut lo = 1u64;
    while lo <= n_max {
        let hi = lo.saturating_add(segment - 1).min(n_max);
        let len = (hi - lo + 1) as usize;
        let mut remaining: Vec<u64> = (lo..=hi).collect();
        let mut mu: Vec<i8> = vec![1; len];
        for &p in base.iter() {
            if p * p > hi {
                break;
            }
            let mut m = lo.div_ceil(p) * p;
            while m <= hi {
                let idx = (m - lo) as usize;
                let mut e = 0;
                while remaining[idx].is_multiple_of(p) {
                    remaining[idx] /= p;
                    e += 1;
                }
                mu[idx] = if e >= 2 { 0 } else { -mu[idx] };
                m += p;
            }
        }
        for idx in 0..len {
            if remaining[idx] > 1 {
                // one prime factor above sqrt remains
                mu[idx] = -mu[idx];
            }
            visit(lo + idx as u64, mu[idx]);
        }
        lo = hi + 1;
    }
}

/// Partial sum of the harmonic series, 1 + 1/2 + ... + 1/n, which grows
/// like log n.
pub fn harmonic_sum(n: u64) -> f64 {
    let mut sum = 0.0;
    for i in 1..=n {
        sum += 1.0 / i as f64;
    }
    sum
}

// ---------------------------------------------------------------------------
// Twin-prime reciprocal sums
// ---------------------------------------------------------------------------

/// Which convention a twin-prime reciprocal sum uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrunVariant {
    /// 1/3 + 1/5 + 1/7 + 1/11 + ...: each prime belonging to at least one
    /// twin pair contributes once (5 appears once).
    DistinctMembers,
    /// Sum of 1/p + 1/(p+2) over pairs with smaller member p <= x; 5 is
    /// counted twice, once per pair. This is the convention whose limit is
    /// the classical constant 1.902...; partial sums stay below 1.92016.
    PairSum,
}

/// Reciprocal sum over twin primes up to `x` under the chosen convention,
/// accumulated over primes in ascending order.
pub fn brun_partial_sum(x: u64, variant: BrunVariant, limits: &Limits) -> Result<f64> {
    if x > limits.max_x {
        return Err(Error::budget(format!(
            "twin reciprocal sum at {x} exceeds configured maximum {}",
            limits.max_x
        )));
    }
    let mut sum = 0.0;
    // window [p-2, p+2] around each prime: sieve with 2 of margin each side
    let base = base_primes((x + 2).isqrt() + 1);
    let segment = limits.segment();
    let mut lo = 2u64;
    while lo <= x {
        let hi = lo.saturating_add(segment - 1).min(x);
        let win_lo = lo.saturating_sub(2);
        let len = (hi + 2 - win_lo + 1) as usize;
        let flags = crate::sieve::sieve_flags(win_lo, len, &base);
        for p in lo..=hi {
            let i = (p - win_lo) as usize;
            if !flags[i] {
                continue;
            }
            let below = i >= 2 && flags[i - 2];
            let above = flags[i + 2];
            match variant {
                BrunVariant::DistinctMembers => {
                    if below || above {
                        sum += 1.0 / p as f64;
                    }
                }
                BrunVariant::PairSum => {
                    if above {
                        sum += 1.0 / p as f64 + 1.0 / (p + 2) as f64;
                    }
                }
            }
        }
        lo = hi + 1;
    }
    Ok(sum)
}

// ---------------------------------------------------------------------------
// Euler product vs zeta sum
// ---------------------------------------------------------------------------

/// Finite consistency check of the Euler product identity at a real
/// argument z: returns (sum of n^-z for n <= n_limit, product of
/// (1 - p^-z)^-1 over primes p <= p_limit). For z >= 1.5 both truncation
/// tails are small and the two sides nearly agree.
pub fn euler_product_check(z: f64, p_limit: u64, n_limit: u64) -> Result<(f64, f64)> {
    const CAP: u64 = 10_000_000;
    if z < 1.5 {
        return Err(Error::domain(format!("z must be at least 1.5, got {z}")));
    }
    if p_limit > CAP || n_limit > CAP {
        return Err(Error::budget(format!("limits capped at {CAP}")));
    }
    if n_limit == 0 {
        return Err(Error::domain("need at least one term in the sum"));
    }
    let mut sum = 0.0;
    for n in 1..=n_limit {
        sum += (n as f64).powf(-z);
    }
    let mut product = 1.0;
    let primes = base_primes(p_limit);
    for &p in primes.iter().take_while(|&&p| p <= p_limit) {
        product *= 1.0 / (1.0 - (p as f64).powf(-z));
    }
    Ok((sum, product))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn li_at_lower_limit_is_zero() {
        let r = li(2.0, 1e-12).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.evaluations, 0);
    }

    #[test]
    fn li_rejects_domain() {
        assert!(li(1.5, 1e-9).is_err());
        assert!(li_k(10.0, 0, 1e-9).is_err());
        assert!(li(10.0, 0.0).is_err());
    }

    #[test]
    fn li_matches_fixed_grid_simpson() {
        // independent oracle: composite Simpson on a uniform grid
        let n = 1 << 14;
        let (a, b) = (2.0f64, 4.0f64);
        let h = (b - a) / n as f64;
        let f = |t: f64| 1.0 / t.ln();
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + i as f64 * h);
        }
        let oracle = acc * h / 3.0;
        let r = li(4.0, 1e-10).unwrap();
        assert!((r.value - oracle).abs() < 1e-8, "{} vs {oracle}", r.value);
        assert!(r.abs_error_estimate <= 1e-10);
    }

    #[test]
    fn li_error_estimate_respects_tolerance() {
        for &x in &[10.0, 100.0, 1e4, 1e6] {
            let r = li(x, 1e-8).unwrap();
            assert!(r.abs_error_estimate <= 1e-8, "x = {x}");
            let refined = li(x, 5e-10).unwrap();
            assert!((r.value - refined.value).abs() < 2e-8, "x = {x}");
        }
    }

    #[test]
    fn li_1_equals_li() {
        let a = li(1000.0, 1e-10).unwrap();
        let b = li_k(1000.0, 1, 1e-10).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn li_k_zero_at_two() {
        for k in 1..=4 {
            assert_eq!(li_k(2.0, k, 1e-9).unwrap().value, 0.0);
        }
    }

    #[test]
    fn asymptotic_expansion() {
        let x = 1e6;
        assert_eq!(li_asymptotic(x, 1).unwrap(), x / x.ln());
        let li_x = li_auto(x).unwrap().value;
        let m1 = (li_asymptotic(x, 1).unwrap() - li_x).abs();
        let m2 = (li_asymptotic(x, 2).unwrap() - li_x).abs();
        assert!(m2 < m1, "two terms should be the better fit: {m2} vs {m1}");
        // the series is asymptotic, not convergent: at fixed x = 100 the
        // tail explodes once j! wins
        let li_100 = li_auto(100.0).unwrap().value;
        let short = (li_asymptotic(100.0, 3).unwrap() - li_100).abs();
        let long = (li_asymptotic(100.0, 50).unwrap() - li_100).abs();
        assert!(long > short);
        assert!(long > 1e20);
        assert!(li_asymptotic(1.0, 3).is_err());
    }

    #[test]
    fn mertens_exact_values() {
        assert_eq!(
            mertens_product_exact(3).unwrap(),
            Rational::new(1, 3).unwrap()
        );
        assert_eq!(
            mertens_product_exact(5).unwrap(),
            Rational::new(4, 15).unwrap()
        );
        assert_eq!(
            mertens_product_exact(2).unwrap(),
            Rational::new(1, 2).unwrap()
        );
        assert!(mertens_product_exact(1).is_err());
    }

    #[test]
    fn mertens_real_brackets() {
        let limits = Limits::default();
        let at_97 = mertens_product_real(97, &limits).unwrap();
        assert!((0.115..=0.125).contains(&at_97), "{at_97}");
        let at_9973 = mertens_product_real(9973, &limits).unwrap();
        assert!((0.055..=0.065).contains(&at_9973), "{at_9973}");
    }

    #[test]
    fn mertens_strictly_decreasing_over_primes() {
        let limits = Limits::default();
        let mut prev = f64::INFINITY;
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23] {
            let v = mertens_product_real(p, &limits).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn mobius_divisor_sum_matches_product() {
        // inclusion-exclusion identity, both sides exact
        for limit in [2u64, 3, 5, 7, 11, 13, 30, 31, 47, 71] {
            let sum = mobius_divisor_sum(limit).unwrap();
            let product = mertens_product_exact(limit).unwrap();
            assert_eq!(sum, product, "limit {limit}");
        }
        assert_eq!(mobius_divisor_sum(2).unwrap(), Rational::new(1, 2).unwrap());
        assert!(mobius_divisor_sum(73).is_err()); // 21 primes: over budget
    }

    #[test]
    fn mobius_partial_sums() {
        let limits = Limits::default();
        assert_eq!(mobius_partial_sum(1, &limits).unwrap(), 1.0);
        assert_eq!(mobius_partial_sum(2, &limits).unwrap(), 0.5);
        // against a naive factorization loop
        let mut naive = 0.0;
        for n in 1..=3000u64 {
            naive += crate::arith::mobius(n).unwrap() as f64 / n as f64;
        }
        let fast = mobius_partial_sum(3000, &limits).unwrap();
        assert!((fast - naive).abs() < 1e-12, "{fast} vs {naive}");
    }

    #[test]
    fn mobius_segmentation_invariance() {
        let coarse = Limits::default();
        let fine = Limits {
            segment_size: 1 << 10,
            ..Limits::default()
        };
        // identical mu values regardless of segmentation
        let mut a = Vec::new();
        for_each_mobius(5000, &coarse, |_, mu| a.push(mu));
        let mut b = Vec::new();
        for_each_mobius(5000, &fine, |_, mu| b.push(mu));
        assert_eq!(a, b);
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic_sum(1), 1.0);
        assert_eq!(harmonic_sum(2), 1.5);
        let gamma_ish = harmonic_sum(1_000_000) - 1e6f64.ln();
        assert!((0.57..=0.58).contains(&gamma_ish), "{gamma_ish}");
    }

    #[test]
    fn brun_listed_terms() {
        let limits = Limits::default();
        let listed: f64 = [3u64, 5, 7, 11, 13, 17, 19, 29, 31]
            .iter()
            .map(|&p| 1.0 / p as f64)
            .sum();
        let got = brun_partial_sum(31, BrunVariant::DistinctMembers, &limits).unwrap();
        assert!((got - listed).abs() < 1e-15, "{got} vs {listed}");
        assert_eq!(
            brun_partial_sum(4, BrunVariant::DistinctMembers, &limits).unwrap(),
            1.0 / 3.0
        );
    }

    #[test]
    fn brun_pair_sum_counts_five_twice() {
        let limits = Limits::default();
        // pairs with smaller member <= 5: (3,5) and (5,7)
        let expected = 1.0 / 3.0 + 1.0 / 5.0 + 1.0 / 5.0 + 1.0 / 7.0;
        let got = brun_partial_sum(5, BrunVariant::PairSum, &limits).unwrap();
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn brun_monotone_and_bounded() {
        let limits = Limits::default();
        let mut prev = 0.0;
        for x in [10u64, 100, 1000, 10_000, 100_000, 1_000_000] {
            let v = brun_partial_sum(x, BrunVariant::PairSum, &limits).unwrap();
            assert!(v >= prev);
            assert!(v < 1.92016, "pair sum {v} at {x}");
            prev = v;
        }
    }

    #[test]
    fn euler_product_agreement() {
        let (sum, product) = euler_product_check(4.0, 1000, 1000).unwrap();
        assert!((sum - product).abs() < 1e-9, "{sum} vs {product}");
        let (s1, p1) = euler_product_check(2.0, 2, 1).unwrap();
        assert_eq!(s1, 1.0);
        assert!(p1 > 1.0);
        assert!(euler_product_check(1.2, 10, 10).is_err());
    }
}
