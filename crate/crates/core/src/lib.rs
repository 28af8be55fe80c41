//! Ranks of appearance in Fibonacci and Lucas sequences, the classes
//! 𝒜_k = {n : gcd(n, uₙ) = k}, and their asymptotic densities.
//!
//! - [`arith`]: primality, factorization, divisors, Möbius, Jacobi.
//! - [`fib`]: sequence terms by fast doubling, p-adic valuations.
//! - [`rank`]: z(m) and ℓ(m) = lcm(m, z(m)), memoized.
//! - [`density`]: the membership criterion for 𝒜_k ≠ ∅ and the exact
//!   truncated Möbius series for 𝐝(𝒜_k) and 𝐝(ℬ_k).
//! - [`oracle`]: brute-force counts that the formulas are checked against.

pub mod arith;
pub mod density;
pub mod error;
mod exact;
pub mod fib;
pub mod oracle;
pub mod rank;

pub use density::{GeneratorSet, InclusionExclusion, MembershipVerdict, SeriesApproximation};
pub use error::{Error, ErrorKind, Result};
pub use fib::{FibIndex, LucasParams, Sequence};
pub use oracle::{CountReport, Gamma, ScanBReport, ScanRow};
pub use rank::{RankCache, RankRecord};

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;
