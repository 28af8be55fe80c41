//! Brute-force enumerations that the formulas in [`crate::density`] and
//! [`crate::rank`] are checked against.
//!
//! Every scan splits its range into fixed-size blocks and merges per-block
//! tallies in block order, so results are identical for any thread count.

use crate::arith::{self, Sieve};
use crate::density::{self, GeneratorSet};
use crate::error::{Error, ErrorKind, Result};
use crate::exact::{self, UnitFraction};
use crate::fib::{FibIndex, Sequence};
use crate::rank::RankCache;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

pub const MAX_COUNT_LIMIT: u64 = 100_000_000;
pub const MAX_SCAN_B_LIMIT: u64 = 100_000;
pub const MAX_STRUCTURE_LIMIT: u64 = 10_000_000;
/// Largest limit for scans that sieve up to their limit (low-rank primes, Σ 1/ℓ).
pub const MAX_SIEVE_LIMIT: u64 = 10_000_000;
/// Largest denominator accepted for γ.
pub const MAX_GAMMA_DENOMINATOR: u64 = 10_000;

const BLOCK: u64 = 1 << 14;

/// #𝒜_k(x) at one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub k: u64,
    pub x: u64,
    pub count: u64,
    pub ratio: f64,
    /// Up to the requested number of smallest elements of 𝒜_k(x).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub x: u64,
    pub count: u64,
    pub ratio: f64,
    /// Count scaled by the growth rate the scan is probing: x / log x for
    /// ℬ(x), x^{2γ} for 𝒬_γ(x).
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanBReport {
    pub rows: Vec<ScanRow>,
    /// k ≤ x whose ℓ(k) does not fit 64 bits; excluded from every count.
    pub unknown: u64,
}

/// An exponent γ = num/den in lowest terms with 0 < γ < 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Gamma {
    num: u64,
    den: u64,
}

impl Gamma {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num == 0 || num >= den {
            return Err(Error::InvalidArgument(format!(
                "gamma must lie strictly between 0 and 1, got {num}/{den}"
            )));
        }
        let g = arith::gcd(num, den);
        let (num, den) = (num / g, den / g);
        if den > MAX_GAMMA_DENOMINATOR {
            return Err(Error::InvalidArgument(format!(
                "gamma denominator {den} exceeds {MAX_GAMMA_DENOMINATOR}"
            )));
        }
        Ok(Gamma { num, den })
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// z ≤ p^γ, decided exactly as z^den ≤ p^num.
    pub fn admits(&self, z: u64, p: u64) -> bool {
        let lhs = self.den as f64 * (z as f64).ln();
        let rhs = self.num as f64 * (p as f64).ln();
        if (lhs - rhs).abs() > 1e-9 * lhs.abs().max(rhs.abs()).max(1.0) {
            return lhs < rhs;
        }
        BigUint::from(z).pow(self.den as u32) <= BigUint::from(p).pow(self.num as u32)
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Gamma {
    type Err = Error;

    /// Accepts `a/q` or a decimal such as `0.25`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse gamma from {s:?}"));
        let s = s.trim();
        if let Some((a, q)) = s.split_once('/') {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let q: u64 = q.trim().parse().map_err(|_| bad())?;
            return Gamma::new(a, q);
        }
        let (int, frac) = s.split_once('.').ok_or_else(bad)?;
        if !(int.is_empty() || int == "0")
            || frac.is_empty()
            || !frac.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(bad());
        }
        let frac = frac.trim_end_matches('0');
        if frac.len() > 4 {
            return Err(bad());
        }
        let num: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        Gamma::new(num, 10u64.pow(frac.len() as u32))
    }
}

fn normalized_checkpoints(x: u64, checkpoints: &[u64]) -> Result<Vec<u64>> {
    if x == 0 {
        return Err(Error::InvalidArgument("limit must be at least 1".into()));
    }
    let mut cps: Vec<u64> = checkpoints.to_vec();
    if let Some(&bad) = cps.iter().find(|&&c| c == 0 || c > x) {
        return Err(Error::InvalidArgument(format!(
            "checkpoint {bad} outside [1, {x}]"
        )));
    }
    cps.push(x);
    cps.sort_unstable();
    cps.dedup();
    Ok(cps)
}

fn check_cap(limit: u64, cap: u64) -> Result<()> {
    if limit > cap {
        Err(Error::LimitAboveCap { limit, cap })
    } else {
        Ok(())
    }
}

fn blocks(x: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let count = usize::try_from(x.div_ceil(BLOCK)).expect("block count fits usize");
    (0..count).into_par_iter().map(move |b| {
        let b = b as u64;
        (b * BLOCK + 1, ((b + 1) * BLOCK).min(x))
    })
}

#[derive(Debug, Clone)]
struct BlockTally {
    /// counts[class][bucket], bucket = index of the first checkpoint ≥ n
    counts: Vec<Vec<u64>>,
    witnesses: Vec<Vec<u64>>,
}

/// #𝒜_k(c) for several k and checkpoints c in one pass over n ≤ x.
/// Returns one list of reports per requested k, in the order given.
pub fn count_classes(
    seq: &Sequence,
    ks: &[u64],
    x: u64,
    checkpoints: &[u64],
    max_witnesses: usize,
) -> Result<Vec<Vec<CountReport>>> {
    check_cap(x, MAX_COUNT_LIMIT)?;
    let cps = normalized_checkpoints(x, checkpoints)?;
    if ks.contains(&0) {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let slot: HashMap<u64, usize> = ks.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let tallies: Vec<BlockTally> = blocks(x)
        .map(|(lo, hi)| {
            let mut t = BlockTally {
                counts: vec![vec![0; cps.len()]; ks.len()],
                witnesses: vec![Vec::new(); ks.len()],
            };
            let mut bucket = cps.partition_point(|&c| c < lo);
            for n in lo..=hi {
                while cps[bucket] < n {
                    bucket += 1;
                }
                let g = seq.index_gcd(FibIndex::new(n).expect("n >= 1"));
                if let Some(&i) = slot.get(&g) {
                    t.counts[i][bucket] += 1;
                    if t.witnesses[i].len() < max_witnesses {
                        t.witnesses[i].push(n);
                    }
                }
            }
            t
        })
        .collect();

    let mut counts = vec![vec![0u64; cps.len()]; ks.len()];
    let mut witnesses = vec![Vec::new(); ks.len()];
    for t in tallies {
        for i in 0..ks.len() {
            for (acc, c) in counts[i].iter_mut().zip(&t.counts[i]) {
                *acc += c;
            }
            let room = max_witnesses - witnesses[i].len();
            witnesses[i].extend(t.witnesses[i].iter().take(room));
        }
    }
    Ok(ks
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let mut running = 0;
            cps.iter()
                .enumerate()
                .map(|(b, &c)| {
                    running += counts[i][b];
                    let w = (max_witnesses > 0)
                        .then(|| witnesses[i].iter().copied().filter(|&n| n <= c).collect());
                    CountReport {
                        k,
                        x: c,
                        count: running,
                        ratio: running as f64 / c as f64,
                        witnesses: w,
                    }
                })
                .collect()
        })
        .collect())
}

/// #𝒜_k(c) at each checkpoint c (and at x).
pub fn count_ak(
    seq: &Sequence,
    k: u64,
    x: u64,
    checkpoints: &[u64],
    max_witnesses: usize,
) -> Result<Vec<CountReport>> {
    Ok(count_classes(seq, &[k], x, checkpoints, max_witnesses)?.remove(0))
}

/// How many n ≤ x have each value of gcd(n, uₙ).
pub fn gcd_distribution(seq: &Sequence, x: u64) -> Result<BTreeMap<u64, u64>> {
    check_cap(x, MAX_COUNT_LIMIT)?;
    let parts: Vec<BTreeMap<u64, u64>> = blocks(x)
        .map(|(lo, hi)| {
            let mut m = BTreeMap::new();
            for n in lo..=hi {
                *m.entry(seq.index_gcd(FibIndex::new(n).expect("n >= 1")))
                    .or_insert(0) += 1;
            }
            m
        })
        .collect();
    let mut out = BTreeMap::new();
    for part in parts {
        for (g, c) in part {
            *out.entry(g).or_insert(0) += c;
        }
    }
    Ok(out)
}

/// The elements of 𝒜_k(x), by direct evaluation of gcd(n, uₙ) for all n ≤ x.
pub fn enumerate_class(seq: &Sequence, k: u64, x: u64) -> Result<Vec<u64>> {
    check_cap(x, MAX_COUNT_LIMIT)?;
    let parts: Vec<Vec<u64>> = blocks(x)
        .map(|(lo, hi)| {
            (lo..=hi)
                .filter(|&n| seq.index_gcd(FibIndex::new(n).expect("n >= 1")) == k)
                .collect()
        })
        .collect();
    Ok(parts.concat())
}

/// Checks 𝒜_k(x) = {ℓ(k)m ≤ x : m ∈ 𝒩(ℒ_k)} with both sides enumerated.
///
/// The generator set only needs primes p ≤ x: a generator dividing some
/// m ≤ x/ℓ(k) is at most x, and for p > x ≥ ℓ(k) the prime p cannot divide
/// ℓ(k), so it divides ℓ(kp)/ℓ(k), which therefore exceeds x.
pub fn verify_structure(cache: &RankCache, k: u64, x: u64) -> Result<bool> {
    check_cap(x, MAX_STRUCTURE_LIMIT)?;
    let verdict = density::membership(cache, k)?;
    if !verdict.member {
        return Err(Error::NotMember(k));
    }
    let ell = verdict.ell.expect("members have a rank");
    let direct = enumerate_class(&cache.sequence(), k, x)?;
    let structural = if ell > x {
        Vec::new()
    } else {
        let gens = density::generators(cache, k, x.max(2))?;
        let reach = x / ell;
        let mut excluded = vec![false; reach as usize + 1];
        for s in gens.elements().into_iter().take_while(|&s| s <= reach) {
            for multiple in (s..=reach).step_by(s as usize) {
                excluded[multiple as usize] = true;
            }
        }
        (1..=reach)
            .filter(|&m| !excluded[m as usize])
            .map(|m| ell * m)
            .collect()
    };
    Ok(direct == structural)
}

/// #ℬ(c) = #{k ≤ c : 𝒜_k ≠ ∅} at each checkpoint.
pub fn scan_b(cache: &RankCache, x: u64, checkpoints: &[u64]) -> Result<ScanBReport> {
    check_cap(x, MAX_SCAN_B_LIMIT)?;
    let cps = normalized_checkpoints(x, checkpoints)?;
    let verdicts: Vec<Option<bool>> = (1..=x)
        .into_par_iter()
        .map(|k| match density::membership(cache, k) {
            Ok(v) => Ok(Some(v.member)),
            Err(e) if e.kind() == ErrorKind::OutOfRange => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let unknown = verdicts.iter().filter(|v| v.is_none()).count() as u64;
    let rows = cps
        .iter()
        .map(|&c| {
            let count = verdicts[..c as usize]
                .iter()
                .filter(|v| **v == Some(true))
                .count() as u64;
            let ratio = count as f64 / c as f64;
            ScanRow {
                x: c,
                count,
                ratio,
                normalized: ratio * (c as f64).ln(),
            }
        })
        .collect();
    Ok(ScanBReport { rows, unknown })
}

/// #𝒬_γ(c) = #{p ≤ c : z(p) ≤ p^γ} at each checkpoint.
pub fn scan_low_rank_primes(
    cache: &RankCache,
    gamma: Gamma,
    x: u64,
    checkpoints: &[u64],
) -> Result<Vec<ScanRow>> {
    check_cap(x, MAX_SIEVE_LIMIT)?;
    let cps = normalized_checkpoints(x, checkpoints)?;
    let sieve = Sieve::new(x)?;
    let seq = cache.sequence();
    let hits: Vec<u64> = sieve
        .primes()
        .par_iter()
        .filter(|&&p| seq.has_rank(p))
        .map(|&p| Ok((p, cache.rank_prime(p)?)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&(p, z)| gamma.admits(z, p))
        .map(|(p, _)| p)
        .collect();
    Ok(cps
        .iter()
        .map(|&c| {
            let count = hits.partition_point(|&p| p <= c) as u64;
            ScanRow {
                x: c,
                count,
                ratio: count as f64 / c as f64,
                normalized: count as f64 / (c as f64).powf(2.0 * gamma.to_f64()),
            }
        })
        .collect())
}

/// Σ 1/ℓ(n) over lo < n ≤ hi (n coprime to a₂ for Lucas sequences).
pub fn ell_sum_range(cache: &RankCache, lo: u64, hi: u64) -> Result<BigRational> {
    if hi < lo {
        return Err(Error::InvalidArgument(format!("empty range ({lo}, {hi}]")));
    }
    check_cap(hi, MAX_SIEVE_LIMIT)?;
    let sieve = Sieve::new(hi)?;
    let seq = cache.sequence();
    let terms: Vec<UnitFraction> = (lo + 1..=hi)
        .into_par_iter()
        .filter(|&n| seq.has_rank(n))
        .map(|n| {
            Ok(UnitFraction {
                negative: false,
                den: cache.ell_factorization(&sieve.factor(n))?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(exact::sum_unit_fractions(&terms))
}

/// Σ_{n ≤ N} 1/ℓ(n).
pub fn partial_ell_sum(cache: &RankCache, n: u64) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    ell_sum_range(cache, 0, n)
}

/// #{m ≤ x : no element of g divides m} / x.
pub fn nonmultiple_density(g: &GeneratorSet, x: u64) -> Result<BigRational> {
    if x == 0 {
        return Err(Error::InvalidArgument("limit must be at least 1".into()));
    }
    check_cap(x, MAX_COUNT_LIMIT)?;
    let mut hit = vec![false; x as usize + 1];
    for s in g.elements().into_iter().take_while(|&s| s <= x) {
        for m in (s..=x).step_by(s as usize) {
            hit[m as usize] = true;
        }
    }
    let count = hit[1..].iter().filter(|h| !**h).count() as u64;
    Ok(BigRational::new(BigInt::from(count), BigInt::from(x)))
}

/// The `max` smallest elements of 𝒜_k not exceeding `limit`. Only multiples
/// of ℓ(k) are examined, since k | gcd(n, uₙ) forces ℓ(k) | n.
pub fn witnesses(cache: &RankCache, k: u64, max: usize, limit: u64) -> Result<Vec<u64>> {
    check_cap(limit, MAX_COUNT_LIMIT)?;
    let verdict = density::membership(cache, k)?;
    let Some(ell) = verdict.ell.filter(|_| verdict.member) else {
        return Ok(Vec::new());
    };
    let seq = cache.sequence();
    let mut out = Vec::new();
    let mut n = ell;
    while n <= limit && out.len() < max {
        if seq.index_gcd(FibIndex::new(n)?) == k {
            out.push(n);
        }
        n = match n.checked_add(ell) {
            Some(next) => next,
            None => break,
        };
    }
    Ok(out)
}
