use crate::parse::{parse_checkpoints, parse_count};
use clap::{Args, Parser, Subcommand};
use fibrank_core::oracle::Gamma;

#[derive(Debug, Parser)]
#[command(
    name = "fibrank",
    version,
    about = "Ranks of appearance and gcd(n, F_n) densities for Fibonacci and Lucas sequences"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// First Lucas parameter: u(n+2) = a1 u(n+1) + a2 u(n). Defaults to 1.
    #[arg(long, global = true, allow_hyphen_values = true, value_name = "A")]
    pub a1: Option<i64>,

    /// Second Lucas parameter. Defaults to 1.
    #[arg(long, global = true, allow_hyphen_values = true, value_name = "B")]
    pub a2: Option<i64>,

    #[arg(long, global = true, conflicts_with_all = ["csv", "text"])]
    pub json: bool,

    #[arg(long, global = true, conflicts_with = "text")]
    pub csv: bool,

    #[arg(long, global = true)]
    pub text: bool,

    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, env = "FIBRANK_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Accepted for interface compatibility; every computation is deterministic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

fn count(s: &str) -> Result<u64, String> {
    parse_count(s)
}

/// A comma-separated checkpoint list, kept as one clap value.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Checkpoints(pub Vec<u64>);

fn checkpoints(s: &str) -> Result<Checkpoints, String> {
    parse_checkpoints(s).map(Checkpoints)
}

fn gamma(s: &str) -> Result<Gamma, String> {
    s.parse().map_err(|e: fibrank_core::Error| e.to_string())
}

fn small(s: &str) -> Result<usize, String> {
    let n = parse_count(s)?;
    usize::try_from(n).map_err(|_| format!("{n} is too large"))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank of appearance z(M) and ell(M) = lcm(M, z(M)).
    Rank {
        #[arg(value_parser = count)]
        m: u64,
    },
    /// ell(M) = lcm(M, z(M)).
    Ell {
        #[arg(value_parser = count)]
        m: u64,
    },
    /// Whether some n has gcd(n, u_n) = K.
    Member {
        #[arg(value_parser = count)]
        k: u64,
    },
    /// Truncated density series for {n : gcd(n, u_n) = K}.
    Density {
        #[arg(value_parser = count)]
        k: u64,
        #[arg(long, value_parser = count, default_value = "100000")]
        depth: u64,
    },
    /// Truncated density series for n with K | gcd(n, u_n) and no other primes in that gcd.
    DensityB {
        #[arg(value_parser = count)]
        k: u64,
        #[arg(long, value_parser = count, default_value = "100000")]
        depth: u64,
    },
    /// Checks the inclusion-exclusion identity between the two series.
    Iecheck {
        #[arg(value_parser = count)]
        k: u64,
        #[arg(long, value_parser = count, default_value = "1000")]
        depth: u64,
    },
    /// Counts n <= X with gcd(n, u_n) = K.
    Count {
        #[arg(value_parser = count)]
        k: u64,
        #[arg(long, value_parser = count)]
        limit: u64,
        #[arg(long, value_parser = checkpoints)]
        checkpoints: Option<Checkpoints>,
        /// Also report up to this many smallest elements.
        #[arg(long, value_parser = small, default_value = "0")]
        witnesses: usize,
    },
    /// Compares the class of K up to X with its description by generators.
    VerifyStructure {
        #[arg(value_parser = count)]
        k: u64,
        #[arg(long, value_parser = count)]
        limit: u64,
    },
    /// Counts the K <= X whose class is non-empty.
    ScanB {
        #[arg(long, value_parser = count)]
        limit: u64,
        #[arg(long, value_parser = checkpoints)]
        checkpoints: Option<Checkpoints>,
    },
    /// Counts primes p <= X with z(p) <= p^gamma.
    Lowrank {
        #[arg(long, value_parser = gamma)]
        gamma: Gamma,
        #[arg(long, value_parser = count)]
        limit: u64,
        #[arg(long, value_parser = checkpoints)]
        checkpoints: Option<Checkpoints>,
    },
    /// Exact sum of 1/ell(n) for n <= N.
    Ellsum {
        #[arg(long, value_parser = count)]
        limit: u64,
    },
    /// Density of integers not divisible by any generator of K's class.
    Nonmult {
        #[arg(value_parser = count)]
        k: u64,
        #[arg(long, value_parser = count)]
        pbound: u64,
        #[arg(long, value_parser = count)]
        limit: u64,
    },
    /// Smallest elements of K's class.
    Witnesses {
        #[arg(value_parser = count)]
        k: u64,
        #[arg(long, value_parser = small)]
        max: usize,
        #[arg(long, value_parser = count, default_value = "1e7")]
        limit: u64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Rank { .. } => "rank",
            Command::Ell { .. } => "ell",
            Command::Member { .. } => "member",
            Command::Density { .. } => "density",
            Command::DensityB { .. } => "density-b",
            Command::Iecheck { .. } => "iecheck",
            Command::Count { .. } => "count",
            Command::VerifyStructure { .. } => "verify-structure",
            Command::ScanB { .. } => "scan-b",
            Command::Lowrank { .. } => "lowrank",
            Command::Ellsum { .. } => "ellsum",
            Command::Nonmult { .. } => "nonmult",
            Command::Witnesses { .. } => "witnesses",
        }
    }
}
