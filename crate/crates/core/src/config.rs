//! Resource limits shared by the counting and divisor-sum machinery.

/// Budgets for the memory- or time-bounded operations.
///
/// Every limit can be raised by the caller; the defaults keep any single
/// operation within a few seconds and a few hundred MB on a desktop.
#[derive(Debug, Clone)]
pub struct Limits {
    /// Largest `x` the counting functions will scan to.
    pub max_x: u64,
    /// Numbers per sieve segment. Affects working-set size only; results
    /// are identical for any segment size.
    pub segment_size: u64,
    /// Widest span `hi - lo` a materialized prime table may cover.
    pub table_span: u64,
    /// Cap on divisors enumerated by a single divisor sum.
    pub divisor_budget: u64,
    /// Cap on the number of k-subsets enumerated by the interval detection sum.
    pub subset_budget: u64,
    /// Cap on the range base N of the moment and detection sums.
    pub detection_range_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_x: 1_000_000_000,
            segment_size: 1 << 20,
            table_span: 1 << 27,
            divisor_budget: 1_000_000,
            subset_budget: 100_000,
            detection_range_budget: 1_000_000,
        }
    }
}

impl Limits {
    /// Segment size clamped to a sane floor so degenerate configs still work.
    pub(crate) fn segment(&self) -> u64 {
        self.segment_size.max(1 << 10)
    }
}
