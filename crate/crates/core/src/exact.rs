//! Exact sums of signed unit fractions ±1/L with factored denominators.
//!
//! Partial sums keep their denominator as a prime-power list, so combining
//! two of them needs no big gcd: the common denominator is a merge and the
//! cofactors are products of small prime powers. Leaves are grouped into
//! fixed-size chunks and reduced in a fixed balanced tree. The final fraction
//! is put in lowest terms by testing only the primes of the denominator, so
//! the result is canonical and independent of how work was scheduled.

use crate::arith::{Factorization, PrimePower};
use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

const CHUNK: usize = 256;

#[derive(Debug, Clone)]
pub(crate) struct UnitFraction {
    pub negative: bool,
    pub den: Factorization,
}

#[derive(Debug, Clone)]
struct Partial {
    num: BigInt,
    den: Vec<PrimePower>,
}

impl Partial {
    fn zero() -> Self {
        Partial {
            num: BigInt::zero(),
            den: Vec::new(),
        }
    }

    fn leaf(t: &UnitFraction) -> Self {
        let num = if t.negative {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        Partial {
            num,
            den: t.den.factors().to_vec(),
        }
    }
}

fn combine(a: Partial, b: Partial) -> Partial {
    if a.num.is_zero() && a.den.is_empty() {
        return b;
    }
    if b.num.is_zero() && b.den.is_empty() {
        return a;
    }
    let mut den = Vec::with_capacity(a.den.len().max(b.den.len()));
    let mut scale_a = Vec::new();
    let mut scale_b = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.den.len() || j < b.den.len() {
        let pa = a.den.get(i).map_or(u64::MAX, |f| f.p);
        let pb = b.den.get(j).map_or(u64::MAX, |f| f.p);
        if pa < pb || j == b.den.len() {
            den.push(a.den[i]);
            scale_b.push(a.den[i]);
            i += 1;
        } else if pb < pa || i == a.den.len() {
            den.push(b.den[j]);
            scale_a.push(b.den[j]);
            j += 1;
        } else {
            let (ea, eb) = (a.den[i].e, b.den[j].e);
            den.push(PrimePower {
                p: pa,
                e: ea.max(eb),
            });
            if ea < eb {
                scale_a.push(PrimePower { p: pa, e: eb - ea });
            } else if eb < ea {
                scale_b.push(PrimePower { p: pa, e: ea - eb });
            }
            i += 1;
            j += 1;
        }
    }
    let num = scaled(a.num, &scale_a) + scaled(b.num, &scale_b);
    Partial { num, den }
}

fn scaled(x: BigInt, by: &[PrimePower]) -> BigInt {
    if by.is_empty() || x.is_zero() {
        x
    } else {
        x * BigInt::from(product(by))
    }
}

/// Π p^e, packing small powers into machine words and multiplying the words
/// in a balanced tree.
pub(crate) fn product(pps: &[PrimePower]) -> BigUint {
    let mut words: Vec<BigUint> = Vec::new();
    let mut acc = 1u64;
    for pp in pps {
        for _ in 0..pp.e {
            match acc.checked_mul(pp.p) {
                Some(next) => acc = next,
                None => {
                    words.push(BigUint::from(acc));
                    acc = pp.p;
                }
            }
        }
    }
    words.push(BigUint::from(acc));
    product_tree(words)
}

fn product_tree(mut xs: Vec<BigUint>) -> BigUint {
    while xs.len() > 1 {
        let mut next = Vec::with_capacity(xs.len().div_ceil(2));
        let mut it = xs.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a * b),
                None => next.push(a),
            }
        }
        xs = next;
    }
    xs.pop().unwrap_or_else(BigUint::one)
}

fn tree_sum(mut parts: Vec<Partial>) -> Partial {
    match parts.len() {
        0 => Partial::zero(),
        1 => parts.pop().unwrap(),
        n => {
            let right = parts.split_off(n / 2);
            let (l, r) = rayon::join(|| tree_sum(parts), || tree_sum(right));
            combine(l, r)
        }
    }
}

/// Puts num/den in lowest terms; only primes of `den` can cancel.
fn reduce(p: Partial) -> BigRational {
    let Partial { num, mut den } = p;
    if num.is_zero() {
        return BigRational::zero();
    }
    let (sign, mut mag) = num.into_parts();
    let mut start = 0;
    while start < den.len() {
        // group primes so the modulus fits one word
        let mut modulus = 1u64;
        let mut end = start;
        while end < den.len() {
            match modulus.checked_mul(den[end].p) {
                Some(next) => {
                    modulus = next;
                    end += 1;
                }
                None => break,
            }
        }
        if end == start {
            // a single prime above 2^64 cannot occur: every prime fits u64
            end += 1;
            modulus = den[start].p;
        }
        let r = (&mag % modulus).to_u64().expect("remainder fits");
        for f in &mut den[start..end] {
            if !r.is_multiple_of(f.p) {
                continue;
            }
            while f.e > 0 {
                let (q, rem) = num_integer::Integer::div_rem(&mag, &BigUint::from(f.p));
                if !rem.is_zero() {
                    break;
                }
                mag = q;
                f.e -= 1;
            }
        }
        start = end;
    }
    den.retain(|f| f.e > 0);
    let num = BigInt::from_biguint(sign, mag);
    BigRational::new_raw(num, BigInt::from_biguint(Sign::Plus, product(&den)))
}

/// Σ ±1/L over `terms`, exactly and in lowest terms.
pub(crate) fn sum_unit_fractions(terms: &[UnitFraction]) -> BigRational {
    let chunks: Vec<Partial> = terms
        .par_chunks(CHUNK)
        .map(|chunk| tree_sum(chunk.iter().map(Partial::leaf).collect()))
        .collect();
    reduce(tree_sum(chunks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor;
    use proptest::prelude::*;

    fn naive(terms: &[(bool, u64)]) -> BigRational {
        terms.iter().fold(BigRational::zero(), |acc, &(neg, d)| {
            let t = BigRational::new(BigInt::one(), BigInt::from(d));
            if neg {
                acc - t
            } else {
                acc + t
            }
        })
    }

    fn unit(neg: bool, d: u64) -> UnitFraction {
        UnitFraction {
            negative: neg,
            den: factor(d),
        }
    }

    #[test]
    fn small_sums() {
        let terms = [unit(false, 1), unit(true, 6), unit(true, 12)];
        assert_eq!(
            sum_unit_fractions(&terms),
            BigRational::new(3.into(), 4.into())
        );
        assert_eq!(sum_unit_fractions(&[]), BigRational::zero());
        let cancel = [unit(false, 6), unit(true, 6)];
        assert_eq!(sum_unit_fractions(&cancel), BigRational::zero());
        let halves = [unit(false, 2), unit(false, 2)];
        assert_eq!(sum_unit_fractions(&halves), BigRational::one());
    }

    #[test]
    fn result_is_in_lowest_terms() {
        let terms: Vec<_> = (1..2000u64).map(|d| unit(d % 3 == 0, d)).collect();
        let got = sum_unit_fractions(&terms);
        let g = num_integer::Integer::gcd(got.numer(), got.denom());
        assert!(g.is_one());
        let signed: Vec<_> = (1..2000u64).map(|d| (d % 3 == 0, d)).collect();
        assert_eq!(got, naive(&signed));
    }

    #[test]
    fn product_of_large_powers() {
        let pps = [
            PrimePower {
                p: 4_294_967_291,
                e: 3,
            },
            PrimePower { p: 2, e: 70 },
        ];
        let expect = BigUint::from(4_294_967_291u64).pow(3) * (BigUint::one() << 70);
        assert_eq!(product(&pps), expect);
    }

    proptest! {
        #[test]
        fn matches_naive_rational_sum(terms in prop::collection::vec((any::<bool>(), 1u64..5_000_000), 0..700)) {
            let units: Vec<_> = terms.iter().map(|&(n, d)| unit(n, d)).collect();
            prop_assert_eq!(sum_unit_fractions(&units), naive(&terms));
        }
    }
}
