//! Which classes 𝒜_k = {n : gcd(n, uₙ) = k} are nonempty, and their
//! asymptotic densities as truncated Möbius series over ℓ(dk).
//!
//! Partial sums are exact rationals. The reported tail window
//! Σ_{D < d ≤ 4D} 1/ℓ(dk) over squarefree d is a heuristic size estimate of
//! the neglected tail, not a proven bound.

use crate::arith::{self, gcd, Factorization, Sieve};
use crate::error::{Error, Result};
use crate::exact::{self, UnitFraction};
use crate::fib::{FibIndex, LucasParams, Sequence};
use crate::rank::{fibonacci_cache, shared_cache, RankCache};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Depth used by the command-line frontend when none is given.
pub const DEFAULT_DEPTH: u64 = 100_000;

/// Multiplier from the truncation depth to the end of the tail window.
pub const TAIL_FACTOR: u64 = 4;

/// Largest accepted series depth; the tail window then ends at 10⁷.
pub const MAX_DEPTH: u64 = 2_500_000;

/// Largest accepted prime bound for generator sets.
pub const MAX_PRIME_BOUND: u64 = 10_000_000;

/// Whether 𝒜_k is nonempty, with the quantities deciding it.
///
/// `ell` and `gcd` are `None` only when the rank of k is undefined (k shares
/// a factor with a₂); such k are never members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MembershipVerdict {
    pub k: u64,
    pub ell: Option<u64>,
    pub gcd: Option<u64>,
    pub member: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesApproximation {
    pub k: u64,
    pub depth: u64,
    pub partial_sum: BigRational,
    /// Heuristic: Σ 1/ℓ(dk) over admissible squarefree d in (D, 4D].
    pub tail_window: BigRational,
    pub float_value: f64,
}

impl SeriesApproximation {
    pub fn tail_float(&self) -> f64 {
        self.tail_window.to_f64().unwrap_or(f64::NAN)
    }
}

/// The generators ℒ_k = {p : p | k} ∪ {ℓ(kp)/ℓ(k) : p ∤ k}, the second part
/// truncated to primes p ≤ `bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorSet {
    pub k: u64,
    pub prime_part: Vec<u64>,
    /// (p, ℓ(kp)/ℓ(k)), increasing in p.
    pub ratio_part: Vec<(u64, u64)>,
    pub bound: u64,
}

impl GeneratorSet {
    /// Distinct elements, increasing.
    pub fn elements(&self) -> Vec<u64> {
        let mut all: Vec<u64> = self
            .prime_part
            .iter()
            .copied()
            .chain(self.ratio_part.iter().map(|&(_, r)| r))
            .collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InclusionExclusion {
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub gap: BigRational,
}

/// Decides 𝒜_k ≠ ∅ through k = gcd(ℓ(k), u_ℓ(k)), with u_ℓ(k) taken mod ℓ(k).
pub fn membership(cache: &RankCache, k: u64) -> Result<MembershipVerdict> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let seq = cache.sequence();
    if !seq.has_rank(k) {
        return Ok(MembershipVerdict {
            k,
            ell: None,
            gcd: None,
            member: false,
        });
    }
    let ell = cache.rank(k)?.ell;
    let g = seq.index_gcd(FibIndex::new(ell)?);
    Ok(MembershipVerdict {
        k,
        ell: Some(ell),
        gcd: Some(g),
        member: g == k,
    })
}

pub fn is_member(k: u64) -> Result<MembershipVerdict> {
    membership(fibonacci_cache(), k)
}

pub fn lucas_is_member(u: &LucasParams, k: u64) -> Result<MembershipVerdict> {
    membership(&shared_cache(Sequence::Lucas(*u)), k)
}

#[derive(Debug, Clone, Copy)]
enum Weights {
    /// μ(d) / ℓ(dk)
    Mobius,
    /// |μ(d)| / ℓ(dk)
    Absolute,
}

/// Σ over squarefree d in (lo, hi] with gcd(d, a₂) = 1 (and gcd(d, k) = 1
/// when `coprime_to_k`) of the chosen weight.
fn reciprocal_sum(
    cache: &RankCache,
    sieve: &Sieve,
    k: &Factorization,
    lo: u64,
    hi: u64,
    coprime_to_k: bool,
    weights: Weights,
) -> Result<BigRational> {
    debug_assert!(hi <= sieve.limit());
    let seq = cache.sequence();
    let kv = k.value();
    let terms: Vec<UnitFraction> = (lo + 1..=hi)
        .into_par_iter()
        .filter_map(|d| {
            let mu = sieve.mobius(d);
            if mu == 0 || !seq.has_rank(d) || (coprime_to_k && gcd(d, kv) != 1) {
                return None;
            }
            let term = sieve
                .factor(d)
                .mul(k)
                .and_then(|dk| cache.ell_factorization(&dk))
                .map(|den| UnitFraction {
                    negative: matches!(weights, Weights::Mobius) && mu < 0,
                    den,
                });
            Some(term)
        })
        .collect::<Result<_>>()?;
    Ok(exact::sum_unit_fractions(&terms))
}

fn validated_k(cache: &RankCache, k: u64) -> Result<Factorization> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if !cache.sequence().has_rank(k) {
        return Err(Error::RankUndefined {
            m: k,
            a2: cache.sequence().a2(),
        });
    }
    Ok(arith::factor(k))
}

fn tail_end(depth: u64) -> Result<u64> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if depth > MAX_DEPTH {
        return Err(Error::LimitAboveCap {
            limit: depth,
            cap: MAX_DEPTH,
        });
    }
    depth
        .checked_mul(TAIL_FACTOR)
        .ok_or(Error::Overflow("tail window end"))
}

fn approximate(
    cache: &RankCache,
    k: u64,
    depth: u64,
    coprime_to_k: bool,
) -> Result<SeriesApproximation> {
    let fk = validated_k(cache, k)?;
    let sieve = Sieve::new(tail_end(depth)?)?;
    let partial_sum = reciprocal_sum(cache, &sieve, &fk, 0, depth, coprime_to_k, Weights::Mobius)?;
    let tail_window = reciprocal_sum(
        cache,
        &sieve,
        &fk,
        depth,
        sieve.limit(),
        coprime_to_k,
        Weights::Absolute,
    )?;
    let float_value = partial_sum.to_f64().unwrap_or(f64::NAN);
    Ok(SeriesApproximation {
        k,
        depth,
        partial_sum,
        tail_window,
        float_value,
    })
}

/// Σ_{d ≤ D} μ(d)/ℓ(dk), over d coprime to a₂ (no restriction for Fibonacci).
pub fn series(cache: &RankCache, k: u64, depth: u64) -> Result<SeriesApproximation> {
    approximate(cache, k, depth, false)
}

/// Σ_{d ≤ D, gcd(d, k) = 1} μ(d)/ℓ(dk), the density series of ℬ_k.
pub fn series_bk(cache: &RankCache, k: u64, depth: u64) -> Result<SeriesApproximation> {
    approximate(cache, k, depth, true)
}

pub fn density_series(k: u64, depth: u64) -> Result<SeriesApproximation> {
    series(fibonacci_cache(), k, depth)
}

pub fn density_bk_series(k: u64, depth: u64) -> Result<SeriesApproximation> {
    series_bk(fibonacci_cache(), k, depth)
}

pub fn lucas_density_series(u: &LucasParams, k: u64, depth: u64) -> Result<SeriesApproximation> {
    series(&shared_cache(Sequence::Lucas(*u)), k, depth)
}

/// Compares Σ_{f ≤ D} μ(f)/ℓ(fk) with Σ_{d | k} μ(d) Σ_{e ≤ D/d, (e, k) = 1} μ(e)/ℓ(dek).
///
/// Each squarefree f ≤ D splits uniquely as f = de with d | k and
/// gcd(e, k) = 1, so truncating the inner sums at ⌊D/d⌋ covers exactly the
/// same terms and the gap is 0 as a rational.
pub fn inclusion_exclusion(cache: &RankCache, k: u64, depth: u64) -> Result<InclusionExclusion> {
    let fk = validated_k(cache, k)?;
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if depth > MAX_DEPTH {
        return Err(Error::LimitAboveCap {
            limit: depth,
            cap: MAX_DEPTH,
        });
    }
    let sieve = Sieve::new(depth)?;
    let lhs = reciprocal_sum(cache, &sieve, &fk, 0, depth, false, Weights::Mobius)?;
    let mut rhs = BigRational::zero();
    for d in arith::divisors(&fk)? {
        let mu = arith::mobius(&arith::factor(d));
        if mu == 0 {
            continue;
        }
        let fdk = arith::factor(d).mul(&fk)?;
        let inner = reciprocal_sum(cache, &sieve, &fdk, 0, depth / d, true, Weights::Mobius)?;
        if mu > 0 {
            rhs += inner;
        } else {
            rhs -= inner;
        }
    }
    let gap = (&lhs - &rhs).abs();
    Ok(InclusionExclusion { lhs, rhs, gap })
}

pub fn inclusion_exclusion_check(k: u64, depth: u64) -> Result<InclusionExclusion> {
    inclusion_exclusion(fibonacci_cache(), k, depth)
}

/// ℒ_k for a member k, with ratios for primes p ≤ `bound`, p ∤ k (and p ∤ a₂,
/// since such primes never divide a term of the sequence).
pub fn generators(cache: &RankCache, k: u64, bound: u64) -> Result<GeneratorSet> {
    if bound < 2 {
        return Err(Error::InvalidArgument(
            "prime bound must be at least 2".into(),
        ));
    }
    if bound > MAX_PRIME_BOUND {
        return Err(Error::LimitAboveCap {
            limit: bound,
            cap: MAX_PRIME_BOUND,
        });
    }
    if !membership(cache, k)?.member {
        return Err(Error::NotMember(k));
    }
    let seq = cache.sequence();
    let fk = arith::factor(k);
    let ell_k = cache.ell_factorization(&fk)?.value();
    let sieve = Sieve::new(bound)?;
    let ratio_part = sieve
        .primes()
        .par_iter()
        .filter(|&&p| !k.is_multiple_of(p) && seq.has_rank(p))
        .map(|&p| {
            let ell_kp = cache
                .ell_factorization(&fk.mul(&Factorization::prime(p))?)?
                .value();
            debug_assert_eq!(ell_kp % ell_k, 0, "ell(k) must divide ell(kp)");
            Ok((p, ell_kp / ell_k))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneratorSet {
        k,
        prime_part: fk.primes().collect(),
        ratio_part,
        bound,
    })
}

pub fn lk_generators(k: u64, bound: u64) -> Result<GeneratorSet> {
    generators(fibonacci_cache(), k, bound)
}

/// Π_{s ∈ g} (1 − 1/s), the Heilbronn–Rohrbach lower bound for the density
/// of the nonmultiples of g.
pub fn heilbronn_lower_bound(g: &GeneratorSet) -> BigRational {
    // accumulate the exponent of every prime in Π (s − 1) / Π s, then rebuild
    let mut exponents: BTreeMap<u64, i64> = BTreeMap::new();
    for s in g.elements() {
        debug_assert!(s >= 2, "1 is never a generator");
        for pp in arith::factor(s - 1).factors() {
            *exponents.entry(pp.p).or_default() += i64::from(pp.e);
        }
        for pp in arith::factor(s).factors() {
            *exponents.entry(pp.p).or_default() -= i64::from(pp.e);
        }
    }
    let split = |positive: bool| {
        let pps: Vec<_> = exponents
            .iter()
            .filter(|(_, &e)| if positive { e > 0 } else { e < 0 })
            .map(|(&p, &e)| arith::PrimePower {
                p,
                e: e.unsigned_abs() as u32,
            })
            .collect();
        exact::product(&pps)
    };
    let (num, den): (BigUint, BigUint) = (split(true), split(false));
    BigRational::new_raw(BigInt::from(num), BigInt::from(den))
}
