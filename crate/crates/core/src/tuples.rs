//! Shift tuples and their local data: residue counts nu_p, admissibility,
//! the singular series, the twin prime constant, tuple-count predictions,
//! and exhaustive search for the narrowest admissible tuple of a given size.
//!
//! Admissibility only needs checking at primes p <= k: for p > k the tuple
//! occupies at most k < p residue classes, so no prime above the tuple size
//! can cover every class. That turns an infinite condition into a finite one.

use crate::analytic::li_k_auto;
use crate::config::Limits;
use crate::error::{Error, Result};
use crate::sieve::{base_primes, for_each_prime, is_prime};

/// A set of shifts h_1 < h_2 < ... < h_k, stored in canonical form with
/// h_1 = 0 (inputs are normalized by subtracting their minimum).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftTuple {
    shifts: Vec<u64>,
}

impl ShiftTuple {
    /// Builds a canonical tuple from arbitrary distinct shifts.
    pub fn new(raw: impl Into<Vec<u64>>) -> Result<Self> {
        let mut shifts = raw.into();
        if shifts.is_empty() {
            return Err(Error::domain("a shift tuple needs at least one element"));
        }
        shifts.sort_unstable();
        if shifts.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("shifts must be distinct"));
        }
        let min = shifts[0];
        for h in &mut shifts {
            *h -= min;
        }
        Ok(ShiftTuple { shifts })
    }

    pub fn shifts(&self) -> &[u64] {
        &self.shifts
    }

    /// Tuple size k.
    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor rejects empty tuples
    }

    /// h_k - h_1.
    pub fn diameter(&self) -> u64 {
        *self.shifts.last().unwrap()
    }
}

/// Number of distinct residue classes mod p occupied by the shifts.
fn residue_count(shifts: &[u64], p: u64) -> u64 {
    if p > shifts[shifts.len() - 1] {
        // shifts below p are already distinct
        return shifts.len() as u64;
    }
    let mut seen = vec![false; p as usize];
    let mut count = 0;
    for &h in shifts {
        let r = (h % p) as usize;
        if !seen[r] {
            seen[r] = true;
            count += 1;
        }
    }
    count
}

/// nu_p(H): the number of distinct residue classes mod p the shifts fall
/// into. Rejects composite p.
pub fn nu_p(tuple: &ShiftTuple, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    Ok(residue_count(tuple.shifts(), p))
}

/// True iff nu_p(H) < p for every prime p (equivalently, every prime
/// p <= k; see the module notes).
pub fn is_admissible(tuple: &ShiftTuple) -> bool {
    let k = tuple.len() as u64;
    let primes = base_primes(k);
    primes
        .iter()
        .take_while(|&&p| p <= k)
        .all(|&p| residue_count(tuple.shifts(), p) < p)
}

/// A truncated singular series value with its truncation metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularSeriesValue {
    pub value: f64,
    pub cutoff: u64,
    /// Estimated absolute truncation error: |value| * k^2 / (cutoff log cutoff),
    /// an empirical bound on the discarded tail of near-unit factors.
    pub tail_bound: f64,
    pub admissible: bool,
}

/// The singular series for H truncated at `cutoff`: the product over
/// primes p <= cutoff of (1 - 1/p)^-k (1 - nu_p(H)/p).
///
/// Exactly zero (with `admissible = false`) when some factor vanishes;
/// every vanishing factor has p <= k, so the cutoff must be at least k.
pub fn singular_series(
    tuple: &ShiftTuple,
    cutoff: u64,
    limits: &Limits,
) -> Result<SingularSeriesValue> {
    let k = tuple.len() as u64;
    if cutoff < k.max(2) {
        return Err(Error::domain(format!(
            "cutoff {cutoff} is too small: it must reach the tuple size {k}"
        )));
    }
    let k_f = k as f64;
    let mut log_sum = 0.0;
    let mut vanished = false;
    for_each_prime(2, cutoff, limits, |p| {
        if vanished {
            return;
        }
        let nu = residue_count(tuple.shifts(), p);
        if nu == p {
            vanished = true;
            return;
        }
        let p_f = p as f64;
        log_sum += (-(nu as f64) / p_f).ln_1p() - k_f * (-1.0 / p_f).ln_1p();
    })?;
    if vanished {
        return Ok(SingularSeriesValue {
            value: 0.0,
            cutoff,
            tail_bound: 0.0,
            admissible: false,
        });
    }
    let value = log_sum.exp();
    Ok(SingularSeriesValue {
        value,
        cutoff,
        tail_bound: value.abs() * k_f * k_f / (cutoff as f64 * (cutoff as f64).ln()),
        admissible: true,
    })
}

/// Default truncation for the singular series; gives better than 1e-6
/// absolute accuracy for small tuples.
pub const SINGULAR_SERIES_CUTOFF: u64 = 10_000_000;

/// The twin prime constant 2 * product over odd primes p <= cutoff of
/// (1 - 1/(p-1)^2). With cutoff 10^7 this is 1.32032362 to within 1e-6.
pub fn twin_prime_constant(cutoff: u64, limits: &Limits) -> Result<f64> {
    if cutoff < 3 {
        return Err(Error::domain("cutoff must reach the first odd prime"));
    }
    let mut log_sum = 0.0;
    for_each_prime(3, cutoff, limits, |p| {
        let q = (p - 1) as f64;
        log_sum += (-1.0 / (q * q)).ln_1p();
    })?;
    Ok(2.0 * log_sum.exp())
}

/// A tuple-count prediction: singular series times li_k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    /// Predicted count; exactly zero when the tuple is not admissible.
    pub value: f64,
    pub admissible: bool,
    pub singular_series: f64,
    pub li_k: f64,
}

/// Predicted pi(x; H): the truncated singular series times li_k(x).
/// A non-admissible tuple yields a flagged zero.
pub fn prediction(x: f64, tuple: &ShiftTuple, cutoff: u64, limits: &Limits) -> Result<Prediction> {
    let ss = singular_series(tuple, cutoff, limits)?;
    let li = li_k_auto(x, tuple.len() as u32)?;
    Ok(Prediction {
        value: if ss.admissible {
            ss.value * li.value
        } else {
            0.0
        },
        admissible: ss.admissible,
        singular_series: ss.value,
        li_k: li.value,
    })
}

/// Hard caps for the exhaustive narrowest-tuple search.
pub const NARROWEST_MAX_K: usize = 12;
pub const NARROWEST_MAX_DIAMETER: u64 = 400;

/// Finds an admissible k-tuple of minimal diameter at most `max_diameter`,
/// lexicographically least among the minimal-diameter tuples, or `None`
/// when no admissible tuple fits the budget.
pub fn narrowest_admissible(k: usize, max_diameter: u64) -> Result<Option<ShiftTuple>> {
    if k == 0 {
        return Err(Error::domain("tuple size must be at least 1"));
    }
    if k > NARROWEST_MAX_K || max_diameter > NARROWEST_MAX_DIAMETER {
        return Err(Error::budget(format!(
            "search capped at k <= {NARROWEST_MAX_K}, diameter <= {NARROWEST_MAX_DIAMETER}"
        )));
    }
    if k == 1 {
        return Ok(Some(ShiftTuple::new(vec![0])?));
    }
    let primes: Vec<u64> = base_primes(k as u64)
        .iter()
        .copied()
        .take_while(|&p| p <= k as u64)
        .collect();
    for diameter in (k as u64 - 1)..=max_diameter {
        let mut chosen = vec![0u64];
        if let Some(found) = search(&mut chosen, diameter, k, &primes) {
            return Ok(Some(ShiftTuple::new(found)?));
        }
    }
    Ok(None)
}

/// Depth-first search for the lexicographically least admissible completion
/// of `chosen` with final element exactly `diameter`. Prunes any branch
/// whose partial tuple already covers every residue class of some prime.
fn search(chosen: &mut Vec<u64>, diameter: u64, k: usize, primes: &[u64]) -> Option<Vec<u64>> {
    if covers_some_prime(chosen, primes) {
        return None;
    }
    if chosen.len() == k - 1 {
        chosen.push(diameter);
        let full = !covers_some_prime(chosen, primes);
        let result = full.then(|| chosen.clone());
        chosen.pop();
        return result;
    }
    let next_min = chosen.last().unwrap() + 1;
    // leave room for the remaining elements below the final one
    let slots_after = (k - 1 - chosen.len()) as u64;
    let next_max = diameter.saturating_sub(slots_after);
    for h in next_min..=next_max {
        chosen.push(h);
        if let Some(found) = search(chosen, diameter, k, primes) {
            chosen.pop();
            return Some(found);
        }
        chosen.pop();
    }
    None
}

fn covers_some_prime(shifts: &[u64], primes: &[u64]) -> bool {
    primes.iter().any(|&p| residue_count(shifts, p) == p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuple(raw: &[u64]) -> ShiftTuple {
        ShiftTuple::new(raw.to_vec()).unwrap()
    }

    #[test]
    fn tuple_canonical_form() {
        let t = ShiftTuple::new(vec![7, 3, 5]).unwrap();
        assert_eq!(t.shifts(), &[0, 2, 4]);
        assert_eq!(t.diameter(), 4);
        assert!(ShiftTuple::new(vec![1, 1]).is_err());
        assert!(ShiftTuple::new(Vec::new()).is_err());
    }

    #[test]
    fn nu_p_values() {
        assert_eq!(nu_p(&tuple(&[0, 2]), 2).unwrap(), 1);
        assert_eq!(nu_p(&tuple(&[0, 2]), 3).unwrap(), 2);
        assert_eq!(nu_p(&tuple(&[0, 2, 4]), 3).unwrap(), 3);
        assert!(nu_p(&tuple(&[0, 2]), 4).is_err());
    }

    #[test]
    fn nu_p_is_k_above_diameter() {
        let t = tuple(&[0, 4, 6, 10, 12, 16]);
        for p in [17u64, 19, 101, 997] {
            assert_eq!(nu_p(&t, p).unwrap(), 6);
        }
    }

    #[test]
    fn admissibility() {
        assert!(is_admissible(&tuple(&[0, 2])));
        assert!(!is_admissible(&tuple(&[0, 1])));
        assert!(!is_admissible(&tuple(&[0, 2, 4])));
        assert!(is_admissible(&tuple(&[0, 2, 6])));
        assert!(is_admissible(&tuple(&[0])));
    }

    #[test]
    fn admissibility_translation_invariant() {
        // canonicalization subtracts the minimum, so translates are equal
        assert_eq!(tuple(&[10, 12, 16]), tuple(&[0, 2, 6]));
    }

    #[test]
    fn singular_series_zero_iff_inadmissible() {
        let limits = Limits::default();
        let bad = singular_series(&tuple(&[0, 2, 4]), 1000, &limits).unwrap();
        assert_eq!(bad.value, 0.0);
        assert!(!bad.admissible);

        let good = singular_series(&tuple(&[0, 2, 6]), 1000, &limits).unwrap();
        assert!(good.value > 0.0);
        assert!(good.admissible);
    }

    #[test]
    fn singular_series_identity_tuple() {
        // k = 1: every factor is exactly 1
        let limits = Limits::default();
        let one = singular_series(&tuple(&[0]), 10_000, &limits).unwrap();
        assert_eq!(one.value, 1.0);
    }

    #[test]
    fn singular_series_cutoff_too_small() {
        let limits = Limits::default();
        let t = tuple(&[0, 2, 6, 8, 12]);
        assert!(singular_series(&t, 3, &limits).is_err());
    }

    #[test]
    fn twin_constant_small_cutoff() {
        let limits = Limits::default();
        let v = twin_prime_constant(3, &limits).unwrap();
        assert!((v - 1.5).abs() < 1e-15); // 2 * (1 - 1/4)
    }

    #[test]
    fn twin_constant_matches_singular_series() {
        let limits = Limits::default();
        let cutoff = 100_000;
        let a = twin_prime_constant(cutoff, &limits).unwrap();
        let b = singular_series(&tuple(&[0, 2]), cutoff, &limits)
            .unwrap()
            .value;
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn shifted_pair_same_series() {
        // nu_p({0,4}) = nu_p({0,2}) for every p, so the series agree
        let limits = Limits::default();
        let a = singular_series(&tuple(&[0, 2]), 100_000, &limits)
            .unwrap()
            .value;
        let b = singular_series(&tuple(&[0, 4]), 100_000, &limits)
            .unwrap()
            .value;
        assert!((a - b).abs() < 1e-12);
        for p in [2u64, 3, 5, 7, 11] {
            assert_eq!(
                nu_p(&tuple(&[0, 2]), p).unwrap(),
                nu_p(&tuple(&[0, 4]), p).unwrap()
            );
        }
    }

    #[test]
    fn tail_bound_shrinks_and_brackets_refinement() {
        let limits = Limits::default();
        let t = tuple(&[0, 2, 6, 8]);
        let coarse = singular_series(&t, 10_000, &limits).unwrap();
        let fine = singular_series(&t, 1_000_000, &limits).unwrap();
        assert!(fine.tail_bound < coarse.tail_bound);
        assert!((fine.value - coarse.value).abs() <= coarse.tail_bound);
    }

    #[test]
    fn prediction_flags_inadmissible() {
        let limits = Limits::default();
        let p = prediction(1000.0, &tuple(&[0, 2, 4]), 1000, &limits).unwrap();
        assert_eq!(p.value, 0.0);
        assert!(!p.admissible);
    }

    #[test]
    fn prediction_single_shift_recovers_li() {
        let limits = Limits::default();
        let p = prediction(10_000.0, &tuple(&[0]), 1000, &limits).unwrap();
        let li = crate::analytic::li_auto(10_000.0).unwrap().value;
        assert!((p.value - li).abs() < 1e-6, "{} vs {li}", p.value);
    }

    #[test]
    fn narrowest_small_tuples() {
        assert_eq!(
            narrowest_admissible(2, 10).unwrap().unwrap().shifts(),
            &[0, 2]
        );
        let three = narrowest_admissible(3, 10).unwrap().unwrap();
        assert_eq!(three.shifts(), &[0, 2, 6]);
        assert_eq!(three.diameter(), 6);
        // lexicographic tie-break at diameter 8
        assert_eq!(
            narrowest_admissible(4, 20).unwrap().unwrap().shifts(),
            &[0, 2, 6, 8]
        );
    }

    #[test]
    fn narrowest_not_found_within_budget() {
        assert_eq!(narrowest_admissible(5, 8).unwrap(), None);
        assert_eq!(
            narrowest_admissible(5, 12).unwrap().unwrap().shifts(),
            &[0, 2, 6, 8, 12]
        );
    }

    #[test]
    fn narrowest_budget_errors() {
        assert!(narrowest_admissible(13, 100).is_err());
        assert!(narrowest_admissible(3, 500).is_err());
        assert!(narrowest_admissible(0, 10).is_err());
    }

    #[test]
    fn narrowest_output_admissible() {
        for k in 1..=8 {
            let t = narrowest_admissible(k, 40).unwrap().unwrap();
            assert!(is_admissible(&t), "k = {k}");
            assert_eq!(t.len(), k);
        }
    }
}
