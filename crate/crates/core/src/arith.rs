//! Exact 64-bit integer utilities: primality, factorization, divisors,
//! the Möbius function and the Jacobi symbol.
//!
//! Primality is deterministic Miller–Rabin with a witness set that is
//! exact for every 64-bit input. Factorization strips primes below 1000 by
//! trial division and splits what remains with Pollard's rho in Brent's
//! formulation. All modular products go through 128-bit intermediates.

use crate::error::{Error, Result};
use serde::Serialize;

/// Largest number of divisors [`divisors`] will materialize.
pub const MAX_DIVISORS: u64 = 1 << 16;

const TRIAL_BOUND: u64 = 1000;

// Exact for all n < 2^64 (Jim Sinclair's set).
const MR_WITNESSES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PrimePower {
    pub p: u64,
    pub e: u32,
}

/// A positive integer together with its prime factorization, primes strictly
/// increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Factorization {
    value: u64,
    factors: Vec<PrimePower>,
}

impl Factorization {
    pub fn one() -> Self {
        Factorization {
            value: 1,
            factors: Vec::new(),
        }
    }

    pub fn prime(p: u64) -> Self {
        Factorization {
            value: p,
            factors: vec![PrimePower { p, e: 1 }],
        }
    }

    /// Builds a factorization from prime powers that are already known to be
    /// prime, strictly increasing and with nonzero exponents.
    pub(crate) fn from_sorted(factors: Vec<PrimePower>) -> Result<Self> {
        debug_assert!(factors.windows(2).all(|w| w[0].p < w[1].p));
        debug_assert!(factors.iter().all(|f| f.e >= 1));
        let value = product_of(&factors).ok_or(Error::Overflow("factorization value"))?;
        Ok(Factorization { value, factors })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[PrimePower] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// P(n), the greatest prime factor; `None` for 1.
    pub fn largest_prime(&self) -> Option<u64> {
        self.factors.last().map(|f| f.p)
    }

    /// τ(n) = Π (e + 1).
    pub fn divisor_count(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, f| acc.saturating_mul(u64::from(f.e) + 1))
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|f| f.e == 1)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|f| f.p)
    }

    /// Exponent of `p` in the value (0 when `p` does not divide it).
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .binary_search_by_key(&p, |f| f.p)
            .map(|i| self.factors[i].e)
            .unwrap_or(0)
    }

    /// Factorization of the product, overflow-checked.
    pub fn mul(&self, other: &Factorization) -> Result<Factorization> {
        Factorization::from_sorted(merge_with(&self.factors, &other.factors, |a, b| a + b))
    }

    /// Factorization of the least common multiple, overflow-checked.
    pub fn lcm(&self, other: &Factorization) -> Result<Factorization> {
        Factorization::from_sorted(merge_with(&self.factors, &other.factors, u32::max))
    }

    /// Factorization of a divisor `d` of this value, read off prime by prime.
    pub(crate) fn of_divisor(&self, mut d: u64) -> Factorization {
        let mut out = Vec::new();
        for f in &self.factors {
            let mut e = 0;
            while d.is_multiple_of(f.p) {
                d /= f.p;
                e += 1;
            }
            if e > 0 {
                out.push(PrimePower { p: f.p, e });
            }
        }
        debug_assert_eq!(d, 1, "not a divisor");
        let value = product_of(&out).expect("divisor of a 64-bit value fits");
        Factorization {
            value,
            factors: out,
        }
    }
}

fn product_of(factors: &[PrimePower]) -> Option<u64> {
    factors.iter().try_fold(1u64, |acc, f| {
        f.p.checked_pow(f.e).and_then(|q| acc.checked_mul(q))
    })
}

fn merge_with(a: &[PrimePower], b: &[PrimePower], op: impl Fn(u32, u32) -> u32) -> Vec<PrimePower> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i].p < b[j].p {
            out.push(a[i]);
            i += 1;
        } else if b[j].p < a[i].p {
            out.push(b[j]);
            j += 1;
        } else {
            out.push(PrimePower {
                p: a[i].p,
                e: op(a[i].e, b[j].e),
            });
            i += 1;
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// lcm with overflow reported rather than wrapped. `lcm(0, 0)` is 0.
pub fn checked_lcm(a: u64, b: u64) -> Result<u64> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    (a / gcd(a, b)).checked_mul(b).ok_or(Error::Overflow("lcm"))
}

pub fn gcd_lcm(a: u64, b: u64) -> Result<(u64, u64)> {
    if a == 0 && b == 0 {
        return Err(Error::InvalidArgument("lcm(0, 0) is undefined".into()));
    }
    Ok((gcd(a, b), checked_lcm(a, b)?))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Some nontrivial factor of an odd composite `n` with no prime factor below
/// the trial bound. Deterministic: increments the polynomial constant on a
/// failed cycle.
fn pollard_brent(n: u64) -> u64 {
    const BATCH: u64 = 128;
    for c in 1..n {
        let f = |x: u64| add_mod(mul_mod(x, x, n), c, n);
        let (mut x, mut y, mut ys) = (2u64, 2u64, 2u64);
        let mut q = 1u64;
        let mut g = 1u64;
        let mut r = 1u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r <<= 1;
        }
        if g == n {
            // the batch overshot; replay one step at a time
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("rho exhausted all constants for {n}")
}

/// Complete factorization of `n ≥ 1`.
///
/// # Panics
/// If `n == 0`.
pub fn factor(n: u64) -> Factorization {
    assert!(n >= 1, "factor(0) is undefined");
    let mut rest = n;
    let mut primes: Vec<u64> = Vec::new();
    let mut push = |p: u64, rest: &mut u64| {
        while (*rest).is_multiple_of(p) {
            *rest /= p;
            primes.push(p);
        }
    };
    push(2, &mut rest);
    let mut p = 3;
    while p < TRIAL_BOUND && p * p <= rest {
        push(p, &mut rest);
        p += 2;
    }
    let mut large = Vec::new();
    if rest > 1 {
        if rest < TRIAL_BOUND * TRIAL_BOUND || is_prime(rest) {
            large.push(rest);
        } else {
            let mut stack = vec![rest];
            while let Some(m) = stack.pop() {
                if is_prime(m) {
                    large.push(m);
                } else {
                    let d = pollard_brent(m);
                    stack.push(d);
                    stack.push(m / d);
                }
            }
        }
    }
    primes.extend(large);
    primes.sort_unstable();
    let mut factors: Vec<PrimePower> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some(last) if last.p == p => last.e += 1,
            _ => factors.push(PrimePower { p, e: 1 }),
        }
    }
    Factorization { value: n, factors }
}

/// μ(n): 0 when a square divides n, otherwise (−1)^ω(n).
pub fn mobius(f: &Factorization) -> i8 {
    if !f.is_squarefree() {
        0
    } else if f.factors.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// All divisors in increasing order. Refuses to build more than
/// [`MAX_DIVISORS`] of them.
pub fn divisors(f: &Factorization) -> Result<Vec<u64>> {
    let count = f.divisor_count();
    if count > MAX_DIVISORS {
        return Err(Error::TooManyDivisors {
            count,
            cap: MAX_DIVISORS,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    out.push(1u64);
    for pp in &f.factors {
        let len = out.len();
        let mut q = 1u64;
        for _ in 0..pp.e {
            q *= pp.p;
            for i in 0..len {
                out.push(out[i] * q);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Jacobi symbol (a / n) for odd positive n.
pub fn jacobi(a: i64, n: u64) -> Result<i8> {
    if n.is_multiple_of(2) {
        return Err(Error::EvenModulus(n));
    }
    let mut a = (a as i128).rem_euclid(n as i128) as u64;
    let mut n = n;
    let mut sign = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        (a, n) = (n % a, a);
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// Linear sieve over `[0, limit]`: smallest prime factors, Möbius values and
/// the primes themselves.
#[derive(Debug, Clone)]
pub struct Sieve {
    spf: Vec<u32>,
    mu: Vec<i8>,
    primes: Vec<u64>,
}

impl Sieve {
    pub fn new(limit: u64) -> Result<Self> {
        if limit >= u64::from(u32::MAX) {
            return Err(Error::LimitAboveCap {
                limit,
                cap: u64::from(u32::MAX) - 1,
            });
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut mu = vec![0i8; n + 1];
        let mut primes = Vec::new();
        if n >= 1 {
            mu[1] = 1;
        }
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                mu[i] = -1;
                primes.push(i as u64);
            }
            for &p in &primes {
                let p = p as usize;
                let j = i * p;
                if p > spf[i] as usize || j > n {
                    break;
                }
                spf[j] = p as u32;
                mu[j] = if p == spf[i] as usize { 0 } else { -mu[i] };
            }
        }
        Ok(Sieve { spf, mu, primes })
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn mobius(&self, n: u64) -> i8 {
        self.mu[n as usize]
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Factorization of `1 ≤ n ≤ limit` read off the smallest-factor table.
    pub fn factor(&self, n: u64) -> Factorization {
        assert!(n >= 1 && n <= self.limit());
        let mut rest = n as usize;
        let mut factors: Vec<PrimePower> = Vec::new();
        while rest > 1 {
            let p = self.spf[rest] as u64;
            rest /= p as usize;
            match factors.last_mut() {
                Some(last) if last.p == p => last.e += 1,
                _ => factors.push(PrimePower { p, e: 1 }),
            }
        }
        Factorization { value: n, factors }
    }
}
