//! Rank of appearance z(m) and ℓ(m) = lcm(m, z(m)).
//!
//! Prime ranks come from a divisor search over p − (Δ/p); prime powers are
//! lifted one exponent at a time, since z(p^e) is either z(p^{e−1}) or
//! p·z(p^{e−1}); composite ranks are the lcm of the prime-power ranks.
//! No assumption is made about whether z(p²) differs from z(p).

use crate::arith::{self, checked_lcm, divisors, factor, jacobi, Factorization, PrimePower};
use crate::error::{Error, Result};
use crate::fib::{LucasParams, Sequence};
use dashmap::DashMap;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// (m, z(m), ℓ(m)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RankRecord {
    pub m: u64,
    pub z: u64,
    pub ell: u64,
}

#[derive(Debug, Clone)]
struct PrimeRank {
    z: u64,
    z_factors: Factorization,
}

/// Memoized ranks for one sequence. Safe to share across threads; entries
/// are written at most once per key with identical values, so concurrent
/// duplicate inserts are harmless.
#[derive(Debug)]
pub struct RankCache {
    seq: Sequence,
    primes: DashMap<u64, PrimeRank>,
    records: DashMap<u64, RankRecord>,
}

impl RankCache {
    pub fn new(seq: Sequence) -> Self {
        RankCache {
            seq,
            primes: DashMap::new(),
            records: DashMap::new(),
        }
    }

    pub fn sequence(&self) -> Sequence {
        self.seq
    }

    fn check_rank_exists(&self, m: u64) -> Result<()> {
        if self.seq.has_rank(m) {
            Ok(())
        } else {
            Err(Error::RankUndefined {
                m,
                a2: self.seq.a2(),
            })
        }
    }

    /// z(p) for a prime p.
    pub fn rank_prime(&self, p: u64) -> Result<u64> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(self.prime_entry(p)?.z)
    }

    fn prime_entry(&self, p: u64) -> Result<PrimeRank> {
        if let Some(hit) = self.primes.get(&p) {
            return Ok(hit.clone());
        }
        let entry = self.compute_prime_rank(p)?;
        self.primes.insert(p, entry.clone());
        Ok(entry)
    }

    fn compute_prime_rank(&self, p: u64) -> Result<PrimeRank> {
        self.check_rank_exists(p)?;
        match self.seq {
            Sequence::Fibonacci => match p {
                2 => Ok(PrimeRank {
                    z: 3,
                    z_factors: Factorization::prime(3),
                }),
                5 => Ok(PrimeRank {
                    z: 5,
                    z_factors: Factorization::prime(5),
                }),
                _ => {
                    let bound = match jacobi((p % 5) as i64, 5)? {
                        1 => p - 1,
                        _ => p + 1,
                    };
                    self.divisor_search(p, bound)
                }
            },
            Sequence::Lucas(u) => {
                let disc = u.discriminant();
                if p == 2 || disc.unsigned_abs() % p == 0 {
                    let z = scan_rank(&self.seq, p, 6 * p * p)?;
                    Ok(PrimeRank {
                        z,
                        z_factors: factor(z),
                    })
                } else {
                    let bound = match jacobi(disc, p)? {
                        1 => p - 1,
                        _ => p + 1,
                    };
                    self.divisor_search(p, bound)
                }
            }
        }
    }

    /// Least divisor d of `bound` with p | u_d.
    fn divisor_search(&self, p: u64, bound: u64) -> Result<PrimeRank> {
        let bf = factor(bound);
        let z = match divisors(&bf) {
            Ok(ds) => ds.into_iter().find(|&d| self.seq.term_mod(d, p) == 0),
            // too many divisors to list: shrink the known multiple prime by prime
            Err(Error::TooManyDivisors { .. }) => Some(self.order_reduction(p, &bf)),
            Err(e) => return Err(e),
        };
        let z = z.ok_or(Error::ScanCapExceeded { m: p, limit: bound })?;
        Ok(PrimeRank {
            z,
            z_factors: bf.of_divisor(z),
        })
    }

    /// Smallest n dividing `multiple` with p | u_n, given p | u_multiple.
    fn order_reduction(&self, p: u64, multiple: &Factorization) -> u64 {
        let mut z = multiple.value();
        for pp in multiple.factors() {
            for _ in 0..pp.e {
                if self.seq.term_mod(z / pp.p, p) == 0 {
                    z /= pp.p;
                } else {
                    break;
                }
            }
        }
        z
    }

    /// z(p^e).
    pub fn rank_prime_power(&self, p: u64, e: u32) -> Result<u64> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::InvalidArgument(
                "prime power exponent must be at least 1".into(),
            ));
        }
        p.checked_pow(e).ok_or(Error::Overflow("p^e"))?;
        Ok(self.prime_power_rank(PrimePower { p, e })?.value())
    }

    fn prime_power_rank(&self, pp: PrimePower) -> Result<Factorization> {
        let base = self.prime_entry(pp.p)?;
        let mut z = base.z;
        let mut lifts = 0u32;
        let mut modulus = pp.p;
        for _ in 1..pp.e {
            modulus = modulus.checked_mul(pp.p).ok_or(Error::Overflow("p^e"))?;
            if self.seq.term_mod(z, modulus) != 0 {
                z = z
                    .checked_mul(pp.p)
                    .ok_or(Error::Overflow("rank of prime power"))?;
                lifts += 1;
            }
        }
        if lifts == 0 {
            Ok(base.z_factors)
        } else {
            base.z_factors
                .mul(&Factorization::from_sorted(vec![PrimePower {
                    p: pp.p,
                    e: lifts,
                }])?)
        }
    }

    /// z(m) as a factorization, given the factorization of m.
    pub fn rank_factorization(&self, m: &Factorization) -> Result<Factorization> {
        self.check_rank_exists(m.value())?;
        m.factors()
            .iter()
            .try_fold(Factorization::one(), |acc, &pp| {
                acc.lcm(&self.prime_power_rank(pp)?)
            })
    }

    /// ℓ(m) as a factorization, given the factorization of m.
    pub fn ell_factorization(&self, m: &Factorization) -> Result<Factorization> {
        m.lcm(&self.rank_factorization(m)?)
    }

    pub fn rank_of(&self, m: &Factorization) -> Result<RankRecord> {
        let z = self.rank_factorization(m)?.value();
        let ell = checked_lcm(m.value(), z)?;
        Ok(RankRecord {
            m: m.value(),
            z,
            ell,
        })
    }

    pub fn rank(&self, m: u64) -> Result<RankRecord> {
        if m == 0 {
            return Err(Error::InvalidArgument(
                "rank of appearance needs m >= 1".into(),
            ));
        }
        if let Some(hit) = self.records.get(&m) {
            return Ok(*hit);
        }
        let record = self.rank_of(&factor(m))?;
        self.records.insert(m, record);
        Ok(record)
    }

    pub fn ell_of(&self, m: u64) -> Result<u64> {
        Ok(self.rank(m)?.ell)
    }

    /// Rank by scanning the sequence mod m, capped at 6m steps for Fibonacci
    /// and m² + 1 otherwise (the period of a sequence mod m with a₂ a unit
    /// is below m²).
    pub fn rank_naive(&self, m: u64) -> Result<u64> {
        self.check_rank_exists(m)?;
        let limit = match self.seq {
            Sequence::Fibonacci => m.saturating_mul(6),
            Sequence::Lucas(_) => m.saturating_mul(m).saturating_add(1),
        };
        scan_rank(&self.seq, m, limit)
    }
}

/// First n in 1..=limit with m | u_n, iterating the recurrence mod m.
pub fn scan_rank(seq: &Sequence, m: u64, limit: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidArgument("modulus must be at least 1".into()));
    }
    if m == 1 {
        return Ok(1);
    }
    let u = seq.params();
    let a1 = (u.a1() as i128).rem_euclid(m as i128) as u128;
    let a2 = (u.a2() as i128).rem_euclid(m as i128) as u128;
    let m128 = m as u128;
    let (mut prev, mut cur) = (0u128, 1u128);
    for n in 1..=limit {
        if cur == 0 {
            return Ok(n);
        }
        let next = (a1 * cur + a2 * prev) % m128;
        (prev, cur) = (cur, next);
    }
    Err(Error::ScanCapExceeded { m, limit })
}

/// The process-wide Fibonacci rank cache.
pub fn fibonacci_cache() -> &'static RankCache {
    static CACHE: OnceLock<RankCache> = OnceLock::new();
    CACHE.get_or_init(|| RankCache::new(Sequence::Fibonacci))
}

/// A process-wide cache for the given sequence.
pub fn shared_cache(seq: Sequence) -> Arc<RankCache> {
    static REGISTRY: OnceLock<Mutex<HashMap<Sequence, Arc<RankCache>>>> = OnceLock::new();
    let registry = REGISTRY.get_or_init(Default::default);
    let mut map = registry.lock().expect("rank cache registry poisoned");
    map.entry(seq)
        .or_insert_with(|| Arc::new(RankCache::new(seq)))
        .clone()
}

pub fn rank_prime(p: u64) -> Result<u64> {
    fibonacci_cache().rank_prime(p)
}

pub fn rank_prime_power(p: u64, e: u32) -> Result<u64> {
    fibonacci_cache().rank_prime_power(p, e)
}

pub fn rank(m: u64) -> Result<RankRecord> {
    fibonacci_cache().rank(m)
}

pub fn ell_of(m: u64) -> Result<u64> {
    fibonacci_cache().ell_of(m)
}

/// Oracle: least n ≤ `limit` with m | Fₙ.
pub fn rank_naive(m: u64, limit: u64) -> Result<u64> {
    scan_rank(&Sequence::Fibonacci, m, limit)
}

/// (m, z_u(m), ℓ_u(m)) for a Lucas sequence; undefined unless gcd(m, a₂) = 1.
pub fn lucas_rank(u: &LucasParams, m: u64) -> Result<RankRecord> {
    shared_cache(Sequence::Lucas(*u)).rank(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_rank_examples() {
        assert_eq!(rank_prime(5).unwrap(), 5);
        assert_eq!(rank_prime(2).unwrap(), 3);
        assert_eq!(rank_prime(7).unwrap(), 8);
        assert_eq!(rank_naive(2, 12).unwrap(), 3);
        assert_eq!(rank_naive(7, 42).unwrap(), 8);
        assert!(matches!(rank_prime(9), Err(Error::NotPrime(9))));
    }

    #[test]
    fn prime_power_examples() {
        assert_eq!(rank_prime_power(2, 3).unwrap(), 6);
        assert_eq!(rank_prime_power(2, 2).unwrap(), 6);
        assert_eq!(rank_prime_power(5, 2).unwrap(), 25);
        assert_eq!(rank_naive(8, 48).unwrap(), 6);
        assert_eq!(rank_naive(4, 24).unwrap(), 6);
        assert_eq!(rank_naive(25, 150).unwrap(), 25);
        assert!(matches!(rank_prime_power(2, 64), Err(Error::Overflow(_))));
        assert!(rank_prime_power(2, 0).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(1).unwrap(), RankRecord { m: 1, z: 1, ell: 1 });
        assert_eq!(
            rank(6).unwrap(),
            RankRecord {
                m: 6,
                z: 12,
                ell: 12
            }
        );
        assert_eq!(
            rank(10).unwrap(),
            RankRecord {
                m: 10,
                z: 15,
                ell: 30
            }
        );
        assert_eq!(rank_naive(1, 6).unwrap(), 1);
        assert_eq!(rank_naive(12, 72).unwrap(), 12);
        assert_eq!(rank_naive(11, 66).unwrap(), 10);
        assert_eq!(rank_naive(6, 36).unwrap(), 12);
        assert!(matches!(
            rank_naive(11, 5),
            Err(Error::ScanCapExceeded { .. })
        ));
    }

    #[test]
    fn ell_examples() {
        assert_eq!(ell_of(5).unwrap(), 5);
        assert_eq!(ell_of(7).unwrap(), 56);
        assert_eq!(ell_of(2).unwrap(), 6);
    }

    #[test]
    fn large_prime_ranks_divide_the_bound() {
        // primes near 2^63 and 2^64 exercise the 128-bit products
        for p in [9_223_372_036_854_775_783u64, 18_446_744_073_709_551_557] {
            let z = rank_prime(p).unwrap();
            let bound = if p % 5 == 1 || p % 5 == 4 {
                p - 1
            } else {
                p + 1
            };
            assert_eq!(bound % z, 0);
            assert_eq!(crate::fib::fib_pair_mod(z, p).0, 0);
        }
    }

    #[test]
    fn order_reduction_agrees_with_divisor_search() {
        let cache = RankCache::new(Sequence::Fibonacci);
        for p in (7..5000).filter(|&p| arith::is_prime(p)) {
            let bound = if p % 5 == 1 || p % 5 == 4 {
                p - 1
            } else {
                p + 1
            };
            let by_reduction = cache.order_reduction(p, &factor(bound));
            assert_eq!(by_reduction, cache.rank_prime(p).unwrap(), "p = {p}");
        }
    }

    #[test]
    fn lucas_examples() {
        let pell = LucasParams::new(2, 1).unwrap();
        assert_eq!(lucas_rank(&pell, 5).unwrap().z, 3);
        assert_eq!(lucas_rank(&pell, 2).unwrap().z, 2);
        assert_eq!(lucas_rank(&pell, 2).unwrap().ell, 2);
        let jac = LucasParams::new(1, 2).unwrap();
        assert!(matches!(
            lucas_rank(&jac, 6),
            Err(Error::RankUndefined { m: 6, a2: 2 })
        ));
        assert_eq!(lucas_rank(&jac, 3).unwrap().z, 3);
    }

    #[test]
    fn lucas_one_one_matches_fibonacci_to_1000() {
        let fib = LucasParams::fibonacci();
        for m in 1..=1000 {
            assert_eq!(lucas_rank(&fib, m).unwrap(), rank(m).unwrap(), "m = {m}");
        }
    }

    #[test]
    fn lucas_ranks_match_scan() {
        for (a1, a2) in [(2, 1), (1, 2), (3, -2), (-1, 3), (3, 1), (1, -3), (-2, 3)] {
            let seq = Sequence::Lucas(LucasParams::new(a1, a2).unwrap());
            let cache = RankCache::new(seq);
            for m in 1..=600u64 {
                match cache.rank(m) {
                    Ok(rec) => {
                        assert_eq!(rec.z, cache.rank_naive(m).unwrap(), "({a1},{a2}) m={m}");
                        assert_eq!(rec.ell, checked_lcm(m, rec.z).unwrap());
                    }
                    Err(Error::RankUndefined { .. }) => assert!(!seq.has_rank(m)),
                    Err(e) => panic!("({a1},{a2}) m={m}: {e}"),
                }
            }
        }
    }

    #[test]
    fn concurrent_lookups_agree() {
        use rayon::prelude::*;
        let cache = RankCache::new(Sequence::Fibonacci);
        let parallel: Vec<RankRecord> = (1..=3000u64)
            .into_par_iter()
            .map(|m| cache.rank(m).unwrap())
            .collect();
        let fresh = RankCache::new(Sequence::Fibonacci);
        for (m, rec) in (1..=3000u64).zip(parallel) {
            assert_eq!(rec, fresh.rank(m).unwrap());
        }
    }
}
