//! Truncated divisor sums and the prime-detection sums built from them.
//!
//! The short approximation Lambda_R(n) = sum over d | n, d <= R of
//! mu(d) log(R/d) replaces the von Mangoldt function in tuple sums. Two
//! squared approximations are supported: the componentwise product
//! Lambda_R(n+h_1)...Lambda_R(n+h_k), and the single divisor sum over the
//! tuple polynomial (n+h_1)...(n+h_k) with weight (log R/d)^(k+l) / (k+l)!.
//! The detection sums weight each n in (N, 2N] by
//! (sum_i Lambda(n+h_i) - r log(3N)) times the squared approximation: a
//! positive total forces some n to carry at least r+1 prime-power
//! components, and that witness is extracted and reported.
//!
//! Only squarefree divisors contribute (mu kills the rest), so divisor
//! enumeration works on the distinct prime factors of each component,
//! obtained from a windowed factor sieve rather than by factoring the
//! tuple polynomial itself.
//!
//! Moment sums run over n in [1, N]; detection sums run over n in
//! (N, 2N]. Detection shifts are the canonical tuple offset by one so
//! every component n + h_i stays inside (N, 2N + diameter], keeping each
//! von Mangoldt value below log(3N).
//!
//! The outer sums are chunked at a fixed width and reduced in chunk order,
//! so totals are bit-identical for any thread count.

use rayon::prelude::*;

use crate::arith::factorize;
use crate::config::Limits;
use crate::error::{Error, Result};
use crate::sieve::base_primes;
use crate::tuples::ShiftTuple;

/// Which squared approximation drives a moment or detection sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approximation {
    /// Componentwise product of truncated divisor sums.
    Product,
    /// Single truncated divisor sum over the tuple polynomial, order k + l.
    Sieve,
}

/// The tuple a detection run scans: an explicit shift set, or all
/// k-element subsets of the interval {1, ..., h}.
#[derive(Debug, Clone, PartialEq)]
pub enum TupleSpec {
    Shifts(ShiftTuple),
    Interval { h: u64, k: usize },
}

impl TupleSpec {
    pub fn k(&self) -> usize {
        match self {
            TupleSpec::Shifts(t) => t.len(),
            TupleSpec::Interval { k, .. } => *k,
        }
    }
}

/// Parameter bundle for the moment and detection sums.
#[derive(Debug, Clone, PartialEq)]
pub struct GpyParams {
    /// Range base N; moments sum n <= N, detections sum N < n <= 2N.
    pub n_base: u64,
    pub tuple: TupleSpec,
    /// The l in the sieve approximation's exponent k + l.
    pub ell: u32,
    /// Truncation level R. Any 1 <= R <= N is accepted.
    pub r_level: f64,
    /// Detection threshold r: a positive sum certifies r+1 prime-power
    /// components for some n.
    pub threshold: u32,
}

impl GpyParams {
    fn validate(&self, approx: Approximation, limits: &Limits) -> Result<()> {
        if self.n_base < 2 {
            return Err(Error::domain("range base N must be at least 2"));
        }
        if self.n_base > limits.detection_range_budget {
            return Err(Error::budget(format!(
                "range base {} exceeds budget {}",
                self.n_base, limits.detection_range_budget
            )));
        }
        if self.r_level.is_nan() || self.r_level < 1.0 {
            return Err(Error::domain("truncation level R must be at least 1"));
        }
        if self.r_level > self.n_base as f64 {
            return Err(Error::domain("truncation level R must not exceed N"));
        }
        if self.threshold == 0 {
            return Err(Error::domain("threshold r must be at least 1"));
        }
        let k = self.tuple.k();
        if k == 0 {
            return Err(Error::domain("tuple size must be at least 1"));
        }
        match approx {
            Approximation::Product => {
                if self.ell != 0 {
                    return Err(Error::domain(
                        "the product approximation has no l parameter",
                    ));
                }
            }
            Approximation::Sieve => {
                if self.ell as usize >= k {
                    return Err(Error::domain(format!(
                        "l = {} must be smaller than the tuple size {k}",
                        self.ell
                    )));
                }
            }
        }
        if let TupleSpec::Interval { h, k } = self.tuple {
            if (h as usize) < k {
                return Err(Error::domain(format!(
                    "interval length {h} is shorter than k = {k}"
                )));
            }
        }
        Ok(())
    }
}

/// Default truncation floor(N^(1/(4k))), matching the regime where the
/// squared product of 2k short divisor sums stays controllable.
pub fn default_r_level(n_base: u64, k: usize) -> f64 {
    ((n_base as f64).powf(1.0 / (4.0 * k as f64)))
        .floor()
        .max(1.0)
}

// ---------------------------------------------------------------------------
// Tuple polynomial and single-point divisor sums
// ---------------------------------------------------------------------------

/// P(n, H) = (n + h_1)(n + h_2)...(n + h_k).
pub fn tuple_polynomial(n: u64, tuple: &ShiftTuple) -> Result<u128> {
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    let mut product: u128 = 1;
    for &h in tuple.shifts() {
        product = product
            .checked_mul((n + h) as u128)
            .ok_or_else(|| Error::overflow("tuple polynomial exceeds 128 bits"))?;
    }
    Ok(product)
}

/// Sum of mu(d) (log(R/d))^e over squarefree d <= R composed of the given
/// distinct primes. Counts enumerated divisors against `budget`.
fn truncated_divisor_sum(primes: &[u64], r_level: f64, e: i32, budget: u64) -> Result<f64> {
    struct Dfs<'a> {
        primes: &'a [u64],
        r_level: f64,
        e: i32,
        budget: u64,
        visited: u64,
        acc: f64,
    }
    impl Dfs<'_> {
        fn run(&mut self, i: usize, d: u64, negate: bool) -> Result<()> {
            if i == self.primes.len() {
                self.visited += 1;
                if self.visited > self.budget {
                    return Err(Error::budget(format!(
                        "divisor enumeration exceeds {}",
                        self.budget
                    )));
                }
                let term = (self.r_level / d as f64).ln().powi(self.e);
                self.acc += if negate { -term } else { term };
                return Ok(());
            }
            self.run(i + 1, d, negate)?;
            let with = d as u128 * self.primes[i] as u128;
            if with as f64 <= self.r_level {
                self.run(i + 1, with as u64, !negate)?;
            }
            Ok(())
        }
    }
    let mut dfs = Dfs {
        primes,
        r_level,
        e,
        budget,
        visited: 0,
        acc: 0.0,
    };
    dfs.run(0, 1, false)?;
    Ok(dfs.acc)
}

/// Lambda_R(n): the truncated divisor sum of mu(d) log(R/d) over d | n,
/// d <= R. Exact divisor enumeration in natural logs.
pub fn lambda_r(n: u64, r_level: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    if r_level.is_nan() || r_level < 1.0 {
        return Err(Error::domain("truncation level R must be at least 1"));
    }
    let primes = factorize(n)?.distinct_primes();
    truncated_divisor_sum(&primes, r_level, 1, u64::MAX)
}

/// Componentwise product Lambda_R(n + h_1) ... Lambda_R(n + h_k).
pub fn lambda_r_product(n: u64, tuple: &ShiftTuple, r_level: f64) -> Result<f64> {
    let mut product = 1.0;
    for &h in tuple.shifts() {
        product *= lambda_r(n + h, r_level)?;
    }
    Ok(product)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// The sieve-style approximation Lambda_R(n; H, l): a single truncated
/// divisor sum over divisors of the tuple polynomial, with weight
/// (log R/d)^(k+l) / (k+l)!. At l = 0 and H = {0} this reduces to
/// [`lambda_r`].
pub fn lambda_r_sieve(
    n: u64,
    tuple: &ShiftTuple,
    ell: u32,
    r_level: f64,
    limits: &Limits,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    if r_level.is_nan() || r_level < 1.0 {
        return Err(Error::domain("truncation level R must be at least 1"));
    }
    tuple_polynomial(n, tuple)?; // surfaces overflow on adversarial tuples
    let mut union = Vec::new();
    for &h in tuple.shifts() {
        union.extend(factorize(n + h)?.distinct_primes());
    }
    union.sort_unstable();
    union.dedup();
    let e = tuple.len() as u32 + ell;
    let sum = truncated_divisor_sum(&union, r_level, e as i32, limits.divisor_budget)?;
    Ok(sum / factorial(e))
}

// ---------------------------------------------------------------------------
// Windowed factor sieve
// ---------------------------------------------------------------------------

/// Distinct prime factors for every integer in a consecutive window,
/// computed by one sieving pass.
struct FactorWindow {
    lo: u64,
    lists: Vec<Vec<u64>>,
}

impl FactorWindow {
    fn build(lo: u64, hi: u64) -> FactorWindow {
        debug_assert!(lo >= 1 && hi >= lo);
        let len = (hi - lo + 1) as usize;
        let mut remaining: Vec<u64> = (lo..=hi).collect();
        let mut lists: Vec<Vec<u64>> = vec![Vec::new(); len];
        let base = base_primes(hi.isqrt() + 1);
        for &p in base.iter() {
            if p * p > hi {
                break;
            }
            let mut m = lo.div_ceil(p) * p;
            while m <= hi {
                let idx = (m - lo) as usize;
                lists[idx].push(p);
                while remaining[idx].is_multiple_of(p) {
                    remaining[idx] /= p;
                }
                m += p;
            }
        }
        for idx in 0..len {
            if remaining[idx] > 1 {
                lists[idx].push(remaining[idx]);
            }
        }
        FactorWindow { lo, lists }
    }

    fn primes(&self, m: u64) -> &[u64] {
        &self.lists[(m - self.lo) as usize]
    }

    /// log p when m = p^a, else 0.
    fn von_mangoldt(&self, m: u64) -> f64 {
        match self.primes(m) {
            [p] => (*p as f64).ln(),
            _ => 0.0,
        }
    }
}

/// Merged distinct primes of the components n + h over the given shifts.
fn component_prime_union(window: &FactorWindow, n: u64, shifts: &[u64], scratch: &mut Vec<u64>) {
    scratch.clear();
    for &h in shifts {
        scratch.extend_from_slice(window.primes(n + h));
    }
    scratch.sort_unstable();
    scratch.dedup();
}

/// Per-run constants for evaluating the squared approximation at each n.
struct WeightCtx {
    approx: Approximation,
    e: u32,
    inv_factorial: f64,
    r_level: f64,
    budget: u64,
}

impl WeightCtx {
    fn new(approx: Approximation, k: usize, ell: u32, r_level: f64, budget: u64) -> Self {
        let e = k as u32 + ell;
        WeightCtx {
            approx,
            e,
            inv_factorial: 1.0 / factorial(e),
            r_level,
            budget,
        }
    }

    fn squared_weight(
        &self,
        window: &FactorWindow,
        n: u64,
        shifts: &[u64],
        scratch: &mut Vec<u64>,
    ) -> Result<f64> {
        let value = match self.approx {
            Approximation::Product => {
                let mut product = 1.0;
                for &h in shifts {
                    product *=
                        truncated_divisor_sum(window.primes(n + h), self.r_level, 1, self.budget)?;
                    if product == 0.0 {
                        break;
                    }
                }
                product
            }
            Approximation::Sieve => {
                component_prime_union(window, n, shifts, scratch);
                truncated_divisor_sum(scratch, self.r_level, self.e as i32, self.budget)?
                    * self.inv_factorial
            }
        };
        Ok(value * value)
    }
}

/// Fixed parallel chunk width for the outer sums; independent of the
/// configured segment size so float totals never depend on configuration.
const CHUNK: u64 = 1 << 16;

fn chunk_bounds(lo: u64, hi: u64) -> Vec<(u64, u64)> {
    let mut bounds = Vec::new();
    let mut start = lo;
    while start <= hi {
        let end = (start + CHUNK - 1).min(hi);
        bounds.push((start, end));
        if end == hi {
            break;
        }
        start = end + 1;
    }
    bounds
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

fn explicit_shifts(params: &GpyParams) -> Result<&ShiftTuple> {
    match &params.tuple {
        TupleSpec::Shifts(t) => Ok(t),
        TupleSpec::Interval { .. } => Err(Error::domain("this sum needs an explicit shift tuple")),
    }
}

/// First moment: the sum over n <= N of the squared approximation.
pub fn first_moment(params: &GpyParams, approx: Approximation, limits: &Limits) -> Result<f64> {
    params.validate(approx, limits)?;
    let tuple = explicit_shifts(params)?;
    moment_sum(params, tuple, None, approx, limits)
}

/// Second moment: the sum over n <= N of Lambda(n + h0) times the squared
/// approximation. The h0 shift need not belong to the tuple; comparing
/// h0 in H against h0 outside H measures how strongly the weight
/// concentrates on prime components.
pub fn second_moment(
    params: &GpyParams,
    h0: u64,
    approx: Approximation,
    limits: &Limits,
) -> Result<f64> {
    params.validate(approx, limits)?;
    let tuple = explicit_shifts(params)?;
    moment_sum(params, tuple, Some(h0), approx, limits)
}

fn moment_sum(
    params: &GpyParams,
    tuple: &ShiftTuple,
    h0: Option<u64>,
    approx: Approximation,
    limits: &Limits,
) -> Result<f64> {
    let shifts = tuple.shifts();
    let ctx = WeightCtx::new(
        approx,
        tuple.len(),
        params.ell,
        params.r_level,
        limits.divisor_budget,
    );
    let window_pad = tuple.diameter().max(h0.unwrap_or(0));

    let partials: Vec<Result<f64>> = chunk_bounds(1, params.n_base)
        .into_par_iter()
        .map(|(lo, hi)| {
            let window = FactorWindow::build(lo, hi + window_pad);
            let mut scratch = Vec::new();
            let mut sum = 0.0;
            for n in lo..=hi {
                let w = ctx.squared_weight(&window, n, shifts, &mut scratch)?;
                match h0 {
                    Some(h0) => sum += window.von_mangoldt(n + h0) * w,
                    None => sum += w,
                }
            }
            Ok(sum)
        })
        .collect();
    let mut total = 0.0;
    for partial in partials {
        total += partial?;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Detection sums
// ---------------------------------------------------------------------------

/// One component of a detection witness.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessComponent {
    /// The shift actually used in the sum (already offset for the
    /// explicit-tuple variant).
    pub shift: u64,
    pub value: u64,
    pub is_prime: bool,
    /// A proper prime power p^a with a >= 2; these are flagged separately
    /// so the prime count after discarding powers is visible.
    pub is_prime_power: bool,
}

/// An n whose tuple carries weight, with its prime/prime-power pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub n: u64,
    /// The squared approximation value at n.
    pub weight: f64,
    /// Components with a nonzero von Mangoldt value (primes and powers).
    pub nonzero_components: usize,
    pub components: Vec<WitnessComponent>,
}

/// Outcome of a detection sum.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub params: GpyParams,
    pub sum_value: f64,
    /// sum_value / (N (log R)^(2k+2l+1)), further divided by the subset
    /// count for the interval variant. Diagnostic scale for comparing runs
    /// across N.
    pub normalized: f64,
    pub positive: bool,
    /// The highest-weighted n (up to ten), plus, whenever the sum is
    /// positive, an n certified to carry at least r+1 prime-power
    /// components.
    pub witnesses: Vec<Witness>,
}

/// Detection sum over n in (N, 2N] for an explicit tuple: each n is
/// weighted by (sum_i Lambda(n+h_i) - r log(3N)) times the squared
/// approximation. The canonical shifts are offset by one internally so
/// every shift is at least 1.
pub fn detection_sum(
    params: &GpyParams,
    approx: Approximation,
    limits: &Limits,
) -> Result<DetectionReport> {
    params.validate(approx, limits)?;
    let tuple = explicit_shifts(params)?;
    let shifts: Vec<u64> = tuple.shifts().iter().map(|&h| h + 1).collect();
    if *shifts.last().unwrap() >= params.n_base {
        return Err(Error::domain(format!(
            "tuple diameter {} must stay below the range base {}",
            tuple.diameter() + 1,
            params.n_base
        )));
    }
    run_detection(
        params,
        std::slice::from_ref(&shifts),
        &shifts,
        approx,
        1,
        limits,
    )
}

/// Detection sum over n in (N, 2N] scanning every k-element subset of
/// {1, ..., h}: the weight is (sum over 1 <= j <= h of Lambda(n+j) -
/// r log(3N)) times the sum over subsets of the squared sieve
/// approximation. Uses the sieve approximation of order k + l.
pub fn detection_sum_interval(
    n_base: u64,
    h: u64,
    k: usize,
    ell: u32,
    r_level: f64,
    threshold: u32,
    limits: &Limits,
) -> Result<DetectionReport> {
    let params = GpyParams {
        n_base,
        tuple: TupleSpec::Interval { h, k },
        ell,
        r_level,
        threshold,
    };
    params.validate(Approximation::Sieve, limits)?;
    if h >= n_base {
        return Err(Error::domain(format!(
            "interval length {h} must stay below the range base {n_base}"
        )));
    }
    let subset_count = binomial(h, k as u64)
        .ok_or_else(|| Error::budget(format!("C({h}, {k}) overflows the subset budget")))?;
    if subset_count > limits.subset_budget {
        return Err(Error::budget(format!(
            "C({h}, {k}) = {subset_count} subsets exceed the budget {}",
            limits.subset_budget
        )));
    }
    let subsets = k_subsets(h, k);
    debug_assert_eq!(subsets.len() as u64, subset_count);
    let outer: Vec<u64> = (1..=h).collect();
    run_detection(
        &params,
        &subsets,
        &outer,
        Approximation::Sieve,
        subset_count,
        limits,
    )
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

fn k_subsets(h: u64, k: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut current: Vec<u64> = (1..=k as u64).collect();
    loop {
        out.push(current.clone());
        // advance the rightmost index that can still move
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] < h - (k - 1 - i) as u64 {
                current[i] += 1;
                for j in i + 1..k {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Shared core: `weight_tuples` are the shift sets whose squared
/// approximations are summed per n; `lambda_shifts` are the shifts whose
/// von Mangoldt values form the first factor.
fn run_detection(
    params: &GpyParams,
    weight_tuples: &[Vec<u64>],
    lambda_shifts: &[u64],
    approx: Approximation,
    subset_count: u64,
    limits: &Limits,
) -> Result<DetectionReport> {
    let n_base = params.n_base;
    let threshold = params.threshold;
    let ctx = WeightCtx::new(
        approx,
        params.tuple.k(),
        params.ell,
        params.r_level,
        limits.divisor_budget,
    );
    let log_3n = (3.0 * n_base as f64).ln();
    let pad = weight_tuples
        .iter()
        .flat_map(|t| t.iter().copied())
        .chain(lambda_shifts.iter().copied())
        .max()
        .unwrap_or(0);

    struct ChunkOutcome {
        sum: f64,
        top: Vec<(u64, f64, usize)>,
        verified: Option<u64>,
    }

    let chunks: Vec<Result<ChunkOutcome>> = chunk_bounds(n_base + 1, 2 * n_base)
        .into_par_iter()
        .map(|(lo, hi)| {
            let window = FactorWindow::build(lo, hi + pad);
            let mut scratch = Vec::new();
            let mut sum = 0.0;
            let mut top: Vec<(u64, f64, usize)> = Vec::new();
            let mut verified = None;
            for n in lo..=hi {
                let mut weight = 0.0;
                for shifts in weight_tuples {
                    weight += ctx.squared_weight(&window, n, shifts, &mut scratch)?;
                }
                let mut lambda_total = 0.0;
                let mut hits = 0;
                for &h in lambda_shifts {
                    let lam = window.von_mangoldt(n + h);
                    if lam > 0.0 {
                        hits += 1;
                    }
                    lambda_total += lam;
                }
                sum += (lambda_total - threshold as f64 * log_3n) * weight;
                if weight > 0.0 {
                    if verified.is_none() && hits > threshold as usize {
                        verified = Some(n);
                    }
                    insert_top(&mut top, (n, weight, hits));
                }
            }
            Ok(ChunkOutcome { sum, top, verified })
        })
        .collect();

    let mut sum_value = 0.0;
    let mut merged: Vec<(u64, f64, usize)> = Vec::new();
    let mut verified = None;
    for chunk in chunks {
        let chunk = chunk?;
        sum_value += chunk.sum;
        for cand in chunk.top {
            insert_top(&mut merged, cand);
        }
        if verified.is_none() {
            verified = chunk.verified;
        }
    }

    let positive = sum_value > 0.0;
    if let Some(v) = verified.filter(|_| positive) {
        if !merged.iter().any(|&(n, _, _)| n == v) {
            // keep the certifying n visible even when it is not top-weighted
            let window = FactorWindow::build(v, v + pad);
            let mut scratch = Vec::new();
            let mut weight = 0.0;
            for shifts in weight_tuples {
                weight += ctx.squared_weight(&window, v, shifts, &mut scratch)?;
            }
            let hits = lambda_shifts
                .iter()
                .filter(|&&h| window.von_mangoldt(v + h) > 0.0)
                .count();
            merged.push((v, weight, hits));
        }
    }

    let witnesses = merged
        .iter()
        .map(|&(n, weight, hits)| build_witness(n, weight, hits, lambda_shifts))
        .collect::<Result<Vec<_>>>()?;

    let norm_scale =
        n_base as f64 * params.r_level.ln().powi(2 * ctx.e as i32 + 1) * subset_count as f64;
    Ok(DetectionReport {
        params: params.clone(),
        sum_value,
        normalized: if norm_scale != 0.0 {
            sum_value / norm_scale
        } else {
            f64::NAN
        },
        positive,
        witnesses,
    })
}

/// Keeps the ten heaviest candidates, ordered by weight descending with
/// the smaller n winning ties, so the report is schedule-independent.
fn insert_top(top: &mut Vec<(u64, f64, usize)>, cand: (u64, f64, usize)) {
    let pos = top
        .iter()
        .position(|&(n, w, _)| cand.1 > w || (cand.1 == w && cand.0 < n))
        .unwrap_or(top.len());
    top.insert(pos, cand);
    top.truncate(10);
}

fn build_witness(n: u64, weight: f64, hits: usize, shifts: &[u64]) -> Result<Witness> {
    let components = shifts
        .iter()
        .map(|&h| {
            let value = n + h;
            let f = factorize(value)?;
            let single = f.factors.len() == 1;
            Ok(WitnessComponent {
                shift: h,
                value,
                is_prime: single && f.factors[0].1 == 1,
                is_prime_power: single && f.factors[0].1 >= 2,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Witness {
        n,
        weight,
        nonzero_components: hits,
        components,
    })
}
