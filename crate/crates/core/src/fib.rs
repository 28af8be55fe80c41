//! Terms of the Fibonacci sequence and of nondegenerate Lucas sequences.
//!
//! Residues are computed by fast doubling in O(log n) steps. Exact terms are
//! available only up to a small cap and exist to feed the test oracles.

use crate::arith::{self, gcd, is_prime, mul_mod};
use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use std::fmt;

/// Default cap on [`fib_exact`] indices.
pub const DEFAULT_EXACT_CAP: u64 = 10_000;

/// A positive sequence index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FibIndex(u64);

impl FibIndex {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "sequence index must be at least 1".into(),
            ));
        }
        Ok(FibIndex(n))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl TryFrom<u64> for FibIndex {
    type Error = Error;
    fn try_from(n: u64) -> Result<Self> {
        FibIndex::new(n)
    }
}

/// Parameters of the Lucas sequence u₀ = 0, u₁ = 1, uₙ = a₁uₙ₋₁ + a₂uₙ₋₂.
///
/// Construction rejects parameters that are not coprime and the degenerate
/// cases: a₁a₂ = 0, a vanishing discriminant, and (±1, −1), where the ratio
/// of the characteristic roots is a primitive cube or sixth root of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LucasParams {
    a1: i64,
    a2: i64,
    discriminant: i64,
}

impl LucasParams {
    pub fn new(a1: i64, a2: i64) -> Result<Self> {
        let degenerate = |reason| Err(Error::DegenerateLucas { a1, a2, reason });
        if a1 == 0 || a2 == 0 {
            return degenerate("a1 * a2 must be nonzero");
        }
        if gcd(a1.unsigned_abs(), a2.unsigned_abs()) != 1 {
            return degenerate("a1 and a2 must be coprime");
        }
        let discriminant = a1
            .checked_mul(a1)
            .and_then(|sq| a2.checked_mul(4).and_then(|q| sq.checked_add(q)))
            .ok_or(Error::Overflow("lucas discriminant"))?;
        if discriminant == 0 {
            return degenerate("discriminant a1^2 + 4 a2 vanishes");
        }
        if a1.abs() == 1 && a2 == -1 {
            return degenerate("root ratio is a root of unity");
        }
        Ok(LucasParams {
            a1,
            a2,
            discriminant,
        })
    }

    pub fn fibonacci() -> Self {
        LucasParams {
            a1: 1,
            a2: 1,
            discriminant: 5,
        }
    }

    pub fn a1(&self) -> i64 {
        self.a1
    }

    pub fn a2(&self) -> i64 {
        self.a2
    }

    /// Δ = a₁² + 4a₂.
    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }
}

/// The sequence a computation runs against. `Lucas(1, 1)` produces the same
/// numbers as `Fibonacci` through the general code paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sequence {
    Fibonacci,
    Lucas(LucasParams),
}

impl Sequence {
    pub fn params(&self) -> LucasParams {
        match self {
            Sequence::Fibonacci => LucasParams::fibonacci(),
            Sequence::Lucas(u) => *u,
        }
    }

    pub fn a2(&self) -> i64 {
        self.params().a2
    }

    /// Whether z(m) exists, i.e. gcd(m, a₂) = 1.
    pub fn has_rank(&self, m: u64) -> bool {
        gcd(m, self.a2().unsigned_abs()) == 1
    }

    /// (uₙ mod m, uₙ₊₁ mod m).
    pub fn pair_mod(&self, n: u64, m: u64) -> (u64, u64) {
        match self {
            Sequence::Fibonacci => fib_pair_mod(n, m),
            Sequence::Lucas(u) => lucas_pair_mod(u, n, m),
        }
    }

    pub fn term_mod(&self, n: u64, m: u64) -> u64 {
        self.pair_mod(n, m).0
    }

    /// gcd(n, uₙ), through uₙ mod n.
    pub fn index_gcd(&self, n: FibIndex) -> u64 {
        let n = n.get();
        gcd(n, self.term_mod(n, n))
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sequence::Fibonacci => write!(f, "fibonacci"),
            Sequence::Lucas(u) => write!(f, "lucas({}, {})", u.a1, u.a2),
        }
    }
}

/// Exact Fₙ for n up to `cap`.
pub fn fib_exact(n: FibIndex, cap: u64) -> Result<BigUint> {
    let n = n.get();
    if n > cap {
        return Err(Error::IndexAboveCap { index: n, cap });
    }
    let (mut a, mut b) = (BigUint::zero(), BigUint::one());
    for _ in 0..n {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    Ok(a)
}

/// Exact uₙ as a signed big integer, by direct recurrence. Oracle use only.
pub fn lucas_exact(u: &LucasParams, n: u64, cap: u64) -> Result<num_bigint::BigInt> {
    use num_bigint::BigInt;
    if n > cap {
        return Err(Error::IndexAboveCap { index: n, cap });
    }
    let (a1, a2) = (BigInt::from(u.a1), BigInt::from(u.a2));
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 0..n {
        let next = &a1 * &b + &a2 * &a;
        a = std::mem::replace(&mut b, next);
    }
    Ok(a)
}

/// (Fₙ mod m, Fₙ₊₁ mod m) by fast doubling; any n ≥ 0 and m ≥ 1.
pub fn fib_pair_mod(n: u64, m: u64) -> (u64, u64) {
    assert!(m >= 1, "modulus must be positive");
    if m == 1 {
        return (0, 0);
    }
    let m128 = m as u128;
    let (mut a, mut b) = (0u64, 1u64);
    for bit in (0..64 - n.leading_zeros()).rev() {
        // F(2k) = F(k) (2F(k+1) − F(k)),  F(2k+1) = F(k)² + F(k+1)²
        let twice_b_minus_a = ((2 * b as u128 + m128 - a as u128) % m128) as u64;
        let c = mul_mod(a, twice_b_minus_a, m);
        let d = arith::add_mod(mul_mod(a, a, m), mul_mod(b, b, m), m);
        if (n >> bit) & 1 == 1 {
            (a, b) = (d, ((c as u128 + d as u128) % m128) as u64);
        } else {
            (a, b) = (c, d);
        }
    }
    (a, b)
}

fn reduce_signed(x: i64, m: u64) -> u64 {
    (x as i128).rem_euclid(m as i128) as u64
}

/// (uₙ mod m, uₙ₊₁ mod m) for a Lucas sequence, by the doubling identities
/// u₂ₖ = uₖ(2uₖ₊₁ − a₁uₖ) and u₂ₖ₊₁ = uₖ₊₁² + a₂uₖ².
pub fn lucas_pair_mod(u: &LucasParams, n: u64, m: u64) -> (u64, u64) {
    assert!(m >= 1, "modulus must be positive");
    if m == 1 {
        return (0, 0);
    }
    let p = reduce_signed(u.a1, m);
    let q = reduce_signed(u.a2, m);
    let (mut a, mut b) = (0u64, 1u64);
    for bit in (0..64 - n.leading_zeros()).rev() {
        let two_b = arith::add_mod(b, b, m);
        let pa = mul_mod(p, a, m);
        let c = mul_mod(a, arith::add_mod(two_b, m - pa, m), m);
        let d = arith::add_mod(mul_mod(b, b, m), mul_mod(q, mul_mod(a, a, m), m), m);
        if (n >> bit) & 1 == 1 {
            // u₂ₖ₊₂ = a₁u₂ₖ₊₁ + a₂u₂ₖ
            let e = arith::add_mod(mul_mod(p, d, m), mul_mod(q, c, m), m);
            (a, b) = (d, e);
        } else {
            (a, b) = (c, d);
        }
    }
    (a, b)
}

/// gcd(n, Fₙ), computed as gcd(n, Fₙ mod n).
pub fn gcd_n_fib(n: FibIndex) -> u64 {
    Sequence::Fibonacci.index_gcd(n)
}

/// Number of times `p` divides `x` (x ≠ 0).
fn valuation_u64(mut x: u64, p: u64) -> u32 {
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// Largest power of `p` representable in 64 bits, with its exponent.
fn max_power(p: u64) -> (u64, u32) {
    let (mut q, mut e) = (p, 1);
    while let Some(next) = q.checked_mul(p) {
        q = next;
        e += 1;
    }
    (q, e)
}

/// ν_p(Fₙ) from the closed form: ν₅(Fₙ) = ν₅(n); for p = 2 it depends on n
/// mod 12; otherwise it is 0 off multiples of z(p) and ν_p(n) + ν_p(F_z(p)) on them.
pub fn fib_valuation(p: u64, n: FibIndex) -> Result<u32> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let n = n.get();
    Ok(match p {
        5 => valuation_u64(n, 5),
        2 => match n % 12 {
            0 => valuation_u64(n, 2) + 2,
            6 => 3,
            3 | 9 => 1,
            _ => 0,
        },
        _ => {
            let z = crate::rank::fibonacci_cache().rank_prime(p)?;
            if !n.is_multiple_of(z) {
                0
            } else {
                valuation_u64(n, p) + prime_rank_valuation(p, z)?
            }
        }
    })
}

/// ν_p(F_z(p)), read off F_z(p) mod the largest 64-bit power of p.
fn prime_rank_valuation(p: u64, z: u64) -> Result<u32> {
    let (modulus, cap) = max_power(p);
    let r = fib_pair_mod(z, modulus).0;
    if r == 0 {
        return Err(Error::Overflow(
            "valuation of F_z(p) exceeds 64-bit precision",
        ));
    }
    Ok(valuation_u64(r, p).min(cap))
}

/// min(ν_p(uₙ), K), evaluated from uₙ mod p^K.
pub fn lucas_valuation(u: &LucasParams, p: u64, n: FibIndex, precision: u32) -> Result<u32> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if u.a2.unsigned_abs().is_multiple_of(p) {
        return Err(Error::RankUndefined { m: p, a2: u.a2 });
    }
    if precision == 0 {
        return Err(Error::InvalidArgument(
            "valuation precision must be at least 1".into(),
        ));
    }
    let modulus = p.checked_pow(precision).ok_or(Error::Overflow("p^K"))?;
    let r = lucas_pair_mod(u, n.get(), modulus).0;
    Ok(if r == 0 {
        precision
    } else {
        valuation_u64(r, p)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;

    fn idx(n: u64) -> FibIndex {
        FibIndex::new(n).unwrap()
    }

    fn exact_valuation(x: &BigUint, p: u64) -> u32 {
        let p = BigUint::from(p);
        let mut x = x.clone();
        let mut v = 0;
        while !x.is_zero() && (&x % &p).is_zero() {
            x /= &p;
            v += 1;
        }
        v
    }

    #[test]
    fn exact_examples() {
        assert_eq!(
            fib_exact(idx(1), DEFAULT_EXACT_CAP).unwrap(),
            BigUint::from(1u32)
        );
        assert_eq!(
            fib_exact(idx(12), DEFAULT_EXACT_CAP).unwrap(),
            BigUint::from(144u32)
        );
        assert_eq!(
            fib_exact(idx(24), DEFAULT_EXACT_CAP).unwrap(),
            BigUint::from(46368u32)
        );
        assert!(matches!(
            fib_exact(idx(10_001), DEFAULT_EXACT_CAP),
            Err(Error::IndexAboveCap {
                index: 10_001,
                cap: 10_000
            })
        ));
        assert!(FibIndex::new(0).is_err());
    }

    #[test]
    fn pair_mod_examples() {
        assert_eq!(fib_pair_mod(10, 11), (0, 1));
        assert_eq!(fib_pair_mod(6, 7), (1, 6));
        for n in [0, 1, 17, 1 << 40] {
            assert_eq!(fib_pair_mod(n, 1), (0, 0));
        }
        assert_eq!(fib_pair_mod(0, 10), (0, 1));
    }

    #[test]
    fn pair_mod_matches_exact() {
        let mut fibs = vec![BigUint::zero(), BigUint::one()];
        for i in 2..=2001 {
            let next = &fibs[i - 1] + &fibs[i - 2];
            fibs.push(next);
        }
        for n in 1..=2000usize {
            for m in (1..=1000u64).step_by(7).chain([2, 3, 4, 5, 1000]) {
                let bm = BigUint::from(m);
                let expect = (
                    (&fibs[n] % &bm).to_u64().unwrap(),
                    (&fibs[n + 1] % &bm).to_u64().unwrap(),
                );
                assert_eq!(fib_pair_mod(n as u64, m), expect, "n = {n}, m = {m}");
            }
        }
    }

    #[test]
    fn pair_mod_huge_modulus() {
        // F_93 fits in u64; reduce by a modulus close to 2^64
        let m = u64::MAX - 58;
        let f93 = 12_200_160_415_121_876_738u64;
        assert_eq!(fib_pair_mod(93, m).0, f93 % m);
        let f92 = 7_540_113_804_746_346_429u64;
        assert_eq!(fib_pair_mod(92, m), (f92, f93 % m));
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd_n_fib(idx(1)), 1);
        assert_eq!(gcd_n_fib(idx(12)), 12);
        assert_eq!(gcd_n_fib(idx(25)), 25);
        assert_eq!(gcd_n_fib(idx(5)), 5);
        assert_eq!(gcd_n_fib(idx(10)), 5);
    }

    #[test]
    fn gcd_divides_index_and_matches_exact() {
        for n in 1..=1500u64 {
            let g = gcd_n_fib(idx(n));
            assert_eq!(n % g, 0);
            let f = fib_exact(idx(n), DEFAULT_EXACT_CAP).unwrap();
            let exact = num_integer::Integer::gcd(&f, &BigUint::from(n));
            assert_eq!(BigUint::from(g), exact, "n = {n}");
        }
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(fib_valuation(2, idx(6)).unwrap(), 3);
        assert_eq!(fib_valuation(5, idx(25)).unwrap(), 2);
        assert_eq!(fib_valuation(7, idx(8)).unwrap(), 1);
        assert!(matches!(fib_valuation(9, idx(8)), Err(Error::NotPrime(9))));
    }

    #[test]
    fn valuation_matches_exact() {
        let primes: Vec<u64> = (2..=50).filter(|&p| is_prime(p)).collect();
        for n in 1..=500u64 {
            let f = fib_exact(idx(n), DEFAULT_EXACT_CAP).unwrap();
            for &p in &primes {
                assert_eq!(
                    fib_valuation(p, idx(n)).unwrap(),
                    exact_valuation(&f, p),
                    "p = {p}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn valuation_dominates_index_valuation() {
        let cache = crate::rank::fibonacci_cache();
        for p in (2..=50).filter(|&p| is_prime(p)) {
            let z = cache.rank_prime(p).unwrap();
            for n in (z..=2000).step_by(z as usize) {
                assert!(
                    fib_valuation(p, idx(n)).unwrap() >= valuation_u64(n, p),
                    "p = {p}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn lucas_params_validation() {
        assert!(LucasParams::new(1, 1).is_ok());
        assert_eq!(LucasParams::new(1, 1).unwrap(), LucasParams::fibonacci());
        assert_eq!(LucasParams::new(2, 1).unwrap().discriminant(), 8);
        for (a1, a2) in [
            (0, 1),
            (1, 0),
            (2, -1),
            (-2, -1),
            (1, -1),
            (-1, -1),
            (2, 4),
            (3, 3),
        ] {
            assert!(
                matches!(LucasParams::new(a1, a2), Err(Error::DegenerateLucas { .. })),
                "({a1}, {a2})"
            );
        }
        // (1, -2): roots 2 and -1, nondegenerate
        assert!(LucasParams::new(1, -2).is_ok());
        assert!(LucasParams::new(i64::MAX, 1).is_err());
    }

    #[test]
    fn lucas_pair_examples() {
        let pell = LucasParams::new(2, 1).unwrap();
        let jacobsthal = LucasParams::new(1, 2).unwrap();
        assert_eq!(lucas_pair_mod(&pell, 5, 100), (29, 70));
        assert_eq!(lucas_pair_mod(&jacobsthal, 6, 1000), (21, 43));
    }

    #[test]
    fn lucas_one_one_is_fibonacci() {
        let fib = LucasParams::fibonacci();
        for m in (1..=10_000u64).step_by(97).chain([1, 2, 5, 9_973, 10_000]) {
            for n in (0..=10_000u64).step_by(37).chain([10_000]) {
                assert_eq!(lucas_pair_mod(&fib, n, m), fib_pair_mod(n, m));
            }
        }
        for m in 1..=300u64 {
            for n in 0..=300u64 {
                assert_eq!(lucas_pair_mod(&fib, n, m), fib_pair_mod(n, m));
            }
        }
    }

    #[test]
    fn lucas_pair_matches_exact_for_signed_params() {
        let params = [(2, 1), (1, 2), (3, -2), (-1, 3), (-3, -5), (5, -7), (1, -2)];
        for (a1, a2) in params {
            let u = LucasParams::new(a1, a2).unwrap();
            for n in 0..120u64 {
                let x = lucas_exact(&u, n, 1000).unwrap();
                let y = lucas_exact(&u, n + 1, 1000).unwrap();
                for m in [1u64, 2, 3, 7, 10, 97, 1 << 20, u64::MAX] {
                    let bm = BigInt::from(m);
                    let r = |v: &BigInt| {
                        let r = ((v % &bm) + &bm) % &bm;
                        r.to_u64().unwrap()
                    };
                    assert_eq!(
                        lucas_pair_mod(&u, n, m),
                        (r(&x), r(&y)),
                        "({a1},{a2}) n={n} m={m}"
                    );
                }
            }
        }
    }

    #[test]
    fn lucas_valuation_examples() {
        let fib = LucasParams::fibonacci();
        let pell = LucasParams::new(2, 1).unwrap();
        assert_eq!(lucas_valuation(&fib, 2, idx(6), 10).unwrap(), 3);
        assert_eq!(lucas_valuation(&pell, 2, idx(2), 10).unwrap(), 1);
        assert_eq!(lucas_valuation(&pell, 3, idx(4), 10).unwrap(), 1);
        // capped at K
        assert_eq!(lucas_valuation(&fib, 2, idx(6), 2).unwrap(), 2);
        assert!(matches!(
            lucas_valuation(&fib, 2, idx(6), 64),
            Err(Error::Overflow(_))
        ));
        let jac = LucasParams::new(1, 2).unwrap();
        assert!(matches!(
            lucas_valuation(&jac, 2, idx(6), 5),
            Err(Error::RankUndefined { .. })
        ));
    }

    #[test]
    fn lucas_valuation_agrees_with_fib_valuation() {
        let fib = LucasParams::fibonacci();
        for p in (2..=50).filter(|&p| is_prime(p)) {
            for n in 1..=400u64 {
                let v = fib_valuation(p, idx(n)).unwrap();
                assert_eq!(
                    lucas_valuation(&fib, p, idx(n), 8).unwrap(),
                    v.min(8),
                    "p={p} n={n}"
                );
            }
        }
    }
}
