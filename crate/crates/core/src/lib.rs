//! ptl-core: a prime-distribution laboratory.
//!
//! Everything here is desk-scale experimental number theory: segmented
//! sieving and the counting functions pi(x), pi_2(x), pi(x; H) and
//! pi(x; q, a); exact arithmetic functions (mu, phi, Lambda, Lambda_k);
//! the logarithmic integral family and classic partial sums; shift-tuple
//! admissibility and the singular series; truncated divisor sums with
//! their moment and detection sums; and an empirical error-sum probe for
//! primes in arithmetic progressions.
//!
//! Results are reproducible by construction: integer counts are exact,
//! floating-point reductions run in a fixed order independent of thread
//! count and segment size, and exact identities are checked in 128-bit
//! rational arithmetic that reports overflow instead of degrading.

pub mod analytic;
pub mod arith;
pub mod config;
pub mod error;
pub mod gpy;
pub mod progressions;
pub mod rational;
pub mod series;
pub mod sieve;
pub mod tuples;

pub use config::Limits;
pub use error::{Error, Result};
