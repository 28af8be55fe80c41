//! Parsers for command-line values. Each returns a one-line reason on failure.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

/// A non-negative count: `1000000`, `1_000_000` or `1e6`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let bad = || format!("expected a non-negative integer such as 1000 or 1e6, got {s:?}");
    if let Some((mantissa, exp)) = s.split_once(['e', 'E']) {
        let m = parse_digits(mantissa).ok_or_else(bad)?;
        let e: u32 = parse_digits(exp)
            .and_then(|e| u32::try_from(e).ok())
            .ok_or_else(bad)?;
        return 10u64
            .checked_pow(e)
            .and_then(|p| m.checked_mul(p))
            .ok_or_else(|| format!("{s} does not fit in 64 bits"));
    }
    parse_digits(s).ok_or_else(bad)
}

fn parse_digits(s: &str) -> Option<u64> {
    if s.is_empty()
        || s.starts_with('_')
        || s.ends_with('_')
        || !s.bytes().all(|b| b.is_ascii_digit() || b == b'_')
    {
        return None;
    }
    let digits: String = s.chars().filter(|&c| c != '_').collect();
    digits.parse().ok()
}

/// A comma-separated list of counts, e.g. `100,1000,1e4`. Order and
/// duplicates are preserved; the scans sort and deduplicate.
pub fn parse_checkpoints(s: &str) -> Result<Vec<u64>, String> {
    if s.trim().is_empty() {
        return Err("empty checkpoint list".into());
    }
    s.split(',').map(parse_count).collect()
}

/// `p/q` with q > 0, or a bare integer. The result is in lowest terms.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let bad = || format!("expected a fraction p/q, got {s:?}");
    let int = |t: &str| -> Option<BigInt> {
        let body = t.strip_prefix('-').unwrap_or(t);
        if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        t.parse().ok()
    };
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (int(n).ok_or_else(bad)?, int(d).ok_or_else(bad)?),
        None => (int(s).ok_or_else(bad)?, BigInt::from(1)),
    };
    if d.is_zero() || d < BigInt::zero() {
        return Err(format!("denominator must be positive in {s:?}"));
    }
    Ok(BigRational::new(n, d))
}

/// `p/q` in lowest terms; integers are written with denominator 1.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
