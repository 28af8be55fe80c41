use thiserror::Error;

/// Broad classes of failure, used by frontends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The arguments were malformed or outside an operation's domain of definition.
    Usage,
    /// Mathematically meaningful rejection: non-prime, undefined rank, non-member, ...
    Domain,
    /// A value would not fit the supported 64-bit width, or a configured cap was hit.
    OutOfRange,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("jacobi symbol requires an odd positive modulus, got {0}")]
    EvenModulus(u64),

    #[error("overflow computing {0}")]
    Overflow(&'static str),

    #[error("index {index} above cap {cap}")]
    IndexAboveCap { index: u64, cap: u64 },

    #[error("limit {limit} above cap {cap}")]
    LimitAboveCap { limit: u64, cap: u64 },

    #[error("{count} divisors exceeds the cap of {cap}")]
    TooManyDivisors { count: u64, cap: u64 },

    #[error("rank of appearance of {m} is undefined: gcd({m}, a2 = {a2}) > 1")]
    RankUndefined { m: u64, a2: i64 },

    #[error("{0} is not in B: the set of n with gcd(n, u_n) = {0} is empty")]
    NotMember(u64),

    #[error("degenerate lucas parameters (a1 = {a1}, a2 = {a2}): {reason}")]
    DegenerateLucas {
        a1: i64,
        a2: i64,
        reason: &'static str,
    },

    #[error("no zero of the sequence mod {m} within {limit} steps")]
    ScanCapExceeded { m: u64, limit: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidArgument(_) => ErrorKind::Usage,
            Error::Overflow(_)
            | Error::IndexAboveCap { .. }
            | Error::LimitAboveCap { .. }
            | Error::TooManyDivisors { .. } => ErrorKind::OutOfRange,
            Error::NotPrime(_)
            | Error::EvenModulus(_)
            | Error::RankUndefined { .. }
            | Error::NotMember(_)
            | Error::DegenerateLucas { .. }
            | Error::ScanCapExceeded { .. } => ErrorKind::Domain,
        }
    }

    /// Short stable tag for machine-readable error lines.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "not_prime",
            Error::EvenModulus(_) => "even_modulus",
            Error::Overflow(_) => "overflow",
            Error::IndexAboveCap { .. } => "index_above_cap",
            Error::LimitAboveCap { .. } => "limit_above_cap",
            Error::TooManyDivisors { .. } => "too_many_divisors",
            Error::RankUndefined { .. } => "rank_undefined",
            Error::NotMember(_) => "not_member",
            Error::DegenerateLucas { .. } => "degenerate_lucas",
            Error::ScanCapExceeded { .. } => "scan_cap_exceeded",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
