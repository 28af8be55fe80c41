//! Runs one subcommand against the core library and builds its [`Outcome`].

use crate::args::Command;
use crate::output::{sig15, Outcome, OutputRecord, SCHEMA_VERSION};
use crate::parse::format_rational;
use fibrank_core::density::{self, SeriesApproximation};
use fibrank_core::oracle::{self, ScanRow};
use fibrank_core::rank::{fibonacci_cache, shared_cache};
use fibrank_core::{BigInt, BigRational, RankCache, Result, Sequence};
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

const TAIL_WARNING: &str =
    "tail_window sums |mu(d)|/ell(dk) over the next block of d; it is a heuristic size \
                            estimate for the neglected tail, not a rigorous error bound";

/// The sequence to run against and the (a1, a2) reported in params.
#[derive(Debug, Clone, Copy)]
pub struct Target {
    pub seq: Sequence,
    pub a1: i64,
    pub a2: i64,
}

struct Builder {
    command: &'static str,
    params: Map<String, Value>,
    warnings: Vec<String>,
}

impl Builder {
    fn new(command: &'static str, target: Target) -> Self {
        let mut params = Map::new();
        params.insert("a1".into(), target.a1.into());
        params.insert("a2".into(), target.a2.into());
        Builder {
            command,
            params,
            warnings: Vec::new(),
        }
    }

    fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }

    fn finish(
        self,
        result: Value,
        text: Vec<String>,
        header: Vec<&'static str>,
        rows: Vec<Vec<String>>,
    ) -> Outcome {
        Outcome {
            record: OutputRecord {
                schema_version: SCHEMA_VERSION.into(),
                command: self.command.into(),
                params: self.params,
                result,
                warnings: self.warnings,
            },
            text,
            header,
            rows,
        }
    }
}

fn ratio(count: u64, x: u64) -> String {
    format_rational(&BigRational::new(BigInt::from(count), BigInt::from(x)))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn digits(r: &BigRational) -> usize {
    r.denom().to_string().len()
}

pub fn execute(command: &Command, target: Target) -> Result<Outcome> {
    let owned;
    let cache: &RankCache = match target.seq {
        Sequence::Fibonacci => fibonacci_cache(),
        seq => {
            owned = shared_cache(seq);
            &owned
        }
    };
    let b = Builder::new(command.name(), target);
    let n = |v: u64| v.to_string();

    Ok(match *command {
        Command::Rank { m } => {
            let r = cache.rank(m)?;
            b.param("m", m).finish(
                json!({"m": r.m, "z": r.z, "ell": r.ell}),
                vec![format!("z({m}) = {}, ell({m}) = {}", r.z, r.ell)],
                vec!["m", "z", "ell"],
                vec![vec![n(m), n(r.z), n(r.ell)]],
            )
        }
        Command::Ell { m } => {
            let ell = cache.ell_of(m)?;
            b.param("m", m).finish(
                json!({"m": m, "ell": ell}),
                vec![format!("ell({m}) = {ell}")],
                vec!["m", "ell"],
                vec![vec![n(m), n(ell)]],
            )
        }
        Command::Member { k } => {
            let v = density::membership(cache, k)?;
            let opt = |x: Option<u64>| x.map_or_else(String::new, |x| x.to_string());
            let line = match (v.ell, v.gcd) {
                (Some(ell), Some(g)) => format!(
                    "k = {k}: ell = {ell}, gcd(ell, u_ell) = {g}, member = {}",
                    v.member
                ),
                _ => format!("k = {k}: rank undefined since gcd(k, a2) > 1, member = false"),
            };
            b.param("k", k).finish(
                json!({"k": v.k, "ell": v.ell, "gcd": v.gcd, "member": v.member}),
                vec![line],
                vec!["k", "ell", "gcd", "member"],
                vec![vec![n(k), opt(v.ell), opt(v.gcd), v.member.to_string()]],
            )
        }
        Command::Density { k, depth } => series_outcome(b, density::series(cache, k, depth)?),
        Command::DensityB { k, depth } => series_outcome(b, density::series_bk(cache, k, depth)?),
        Command::Iecheck { k, depth } => {
            let ie = density::inclusion_exclusion(cache, k, depth)?;
            let exact = ie.gap == BigRational::from_integer(0.into());
            b.param("k", k).param("depth", depth).finish(
                json!({
                    "k": k,
                    "depth": depth,
                    "lhs": format_rational(&ie.lhs),
                    "lhs_value": to_f64(&ie.lhs),
                    "rhs": format_rational(&ie.rhs),
                    "rhs_value": to_f64(&ie.rhs),
                    "gap": format_rational(&ie.gap),
                    "gap_is_zero": exact,
                }),
                vec![
                    format!("k = {k}, depth = {depth}"),
                    format!("lhs ~ {}", sig15(to_f64(&ie.lhs))),
                    format!("rhs ~ {}", sig15(to_f64(&ie.rhs))),
                    format!("gap = {}", format_rational(&ie.gap)),
                ],
                vec!["k", "depth", "lhs_value", "rhs_value", "gap", "gap_is_zero"],
                vec![vec![
                    n(k),
                    n(depth),
                    sig15(to_f64(&ie.lhs)),
                    sig15(to_f64(&ie.rhs)),
                    format_rational(&ie.gap),
                    exact.to_string(),
                ]],
            )
        }
        Command::Count {
            k,
            limit,
            ref checkpoints,
            witnesses,
        } => {
            let cps = checkpoints.clone().unwrap_or_default().0;
            let reports = oracle::count_ak(&target.seq, k, limit, &cps, witnesses)?;
            let rows: Vec<Value> = reports
                .iter()
                .map(|r| json!({"x": r.x, "count": r.count, "ratio": r.ratio, "ratio_exact": ratio(r.count, r.x)}))
                .collect();
            let mut result = json!({"k": k, "limit": limit, "rows": rows});
            let mut text: Vec<String> = reports
                .iter()
                .map(|r| format!("#A_{k}({}) = {}  ratio {}", r.x, r.count, sig15(r.ratio)))
                .collect();
            if witnesses > 0 {
                let w = reports
                    .last()
                    .and_then(|r| r.witnesses.clone())
                    .unwrap_or_default();
                text.push(format!("witnesses: {}", join(&w)));
                result["witnesses"] = json!(w);
            }
            let csv = reports
                .iter()
                .map(|r| {
                    vec![
                        n(k),
                        n(r.x),
                        n(r.count),
                        sig15(r.ratio),
                        ratio(r.count, r.x),
                    ]
                })
                .collect();
            b.param("k", k)
                .param("limit", limit)
                .param("checkpoints", cps)
                .param("witnesses", witnesses)
                .finish(
                    result,
                    text,
                    vec!["k", "x", "count", "ratio", "ratio_exact"],
                    csv,
                )
        }
        Command::VerifyStructure { k, limit } => {
            let holds = oracle::verify_structure(cache, k, limit)?;
            let ell = cache.ell_of(k)?;
            b.param("k", k).param("limit", limit).finish(
                json!({"k": k, "limit": limit, "ell": ell, "holds": holds}),
                vec![format!(
                    "k = {k}, ell = {ell}: structure {} up to {limit}",
                    if holds { "holds" } else { "FAILS" }
                )],
                vec!["k", "limit", "ell", "holds"],
                vec![vec![n(k), n(limit), n(ell), holds.to_string()]],
            )
        }
        Command::ScanB {
            limit,
            ref checkpoints,
        } => {
            let cps = checkpoints.clone().unwrap_or_default().0;
            let report = oracle::scan_b(cache, limit, &cps)?;
            let mut b = b.param("limit", limit).param("checkpoints", cps);
            if report.unknown > 0 {
                b.warnings.push(format!(
                    "{} values of k could not be decided and were not counted",
                    report.unknown
                ));
            }
            let (rows, text, csv) = scan_rows(&report.rows, "#B");
            b.finish(
                json!({"limit": limit, "unknown": report.unknown, "rows": rows}),
                text,
                vec!["x", "count", "ratio", "ratio_exact", "normalized"],
                csv,
            )
        }
        Command::Lowrank {
            gamma,
            limit,
            ref checkpoints,
        } => {
            let cps = checkpoints.clone().unwrap_or_default().0;
            let rows = oracle::scan_low_rank_primes(cache, gamma, limit, &cps)?;
            let (json_rows, text, csv) = scan_rows(&rows, &format!("#Q_{gamma}"));
            b.param("gamma", gamma.to_string())
                .param("limit", limit)
                .param("checkpoints", cps)
                .finish(
                    json!({"gamma": gamma.to_string(), "limit": limit, "rows": json_rows}),
                    text,
                    vec!["x", "count", "ratio", "ratio_exact", "normalized"],
                    csv,
                )
        }
        Command::Ellsum { limit } => {
            let sum = oracle::partial_ell_sum(cache, limit)?;
            let value = to_f64(&sum);
            b.param("limit", limit).finish(
                json!({"limit": limit, "sum": format_rational(&sum), "value": value}),
                vec![format!(
                    "sum of 1/ell(n), n <= {limit}: {} (exact denominator has {} digits)",
                    sig15(value),
                    digits(&sum)
                )],
                vec!["limit", "value", "sum"],
                vec![vec![n(limit), sig15(value), format_rational(&sum)]],
            )
        }
        Command::Nonmult { k, pbound, limit } => {
            let g = density::generators(cache, k, pbound)?;
            let measured = oracle::nonmultiple_density(&g, limit)?;
            let bound = density::heilbronn_lower_bound(&g);
            let size = g.elements().len();
            b.param("k", k)
                .param("pbound", pbound)
                .param("limit", limit)
                .finish(
                    json!({
                        "k": k,
                        "generators": size,
                        "density": format_rational(&measured),
                        "density_value": to_f64(&measured),
                        "lower_bound": format_rational(&bound),
                        "lower_bound_value": to_f64(&bound),
                    }),
                    vec![
                        format!("k = {k}: {size} generators from primes <= {pbound}"),
                        format!(
                            "nonmultiple density up to {limit} = {}",
                            sig15(to_f64(&measured))
                        ),
                        format!("product lower bound = {}", sig15(to_f64(&bound))),
                    ],
                    vec![
                        "k",
                        "generators",
                        "density_value",
                        "lower_bound_value",
                        "density",
                        "lower_bound",
                    ],
                    vec![vec![
                        n(k),
                        size.to_string(),
                        sig15(to_f64(&measured)),
                        sig15(to_f64(&bound)),
                        format_rational(&measured),
                        format_rational(&bound),
                    ]],
                )
        }
        Command::Witnesses { k, max, limit } => {
            let w = oracle::witnesses(cache, k, max, limit)?;
            b.param("k", k)
                .param("max", max)
                .param("limit", limit)
                .finish(
                    json!({"k": k, "witnesses": w}),
                    vec![format!(
                        "k = {k}: {}",
                        if w.is_empty() {
                            "none".to_string()
                        } else {
                            join(&w)
                        }
                    )],
                    vec!["k", "n"],
                    w.iter().map(|&x| vec![n(k), n(x)]).collect(),
                )
        }
    })
}

fn join(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")
}

fn scan_rows(rows: &[ScanRow], label: &str) -> (Vec<Value>, Vec<String>, Vec<Vec<String>>) {
    let json_rows = rows
        .iter()
        .map(|r| {
            json!({
                "x": r.x,
                "count": r.count,
                "ratio": r.ratio,
                "ratio_exact": ratio(r.count, r.x),
                "normalized": r.normalized,
            })
        })
        .collect();
    let text = rows
        .iter()
        .map(|r| {
            format!(
                "{label}({}) = {}  ratio {}  normalized {}",
                r.x,
                r.count,
                sig15(r.ratio),
                sig15(r.normalized)
            )
        })
        .collect();
    let csv = rows
        .iter()
        .map(|r| {
            vec![
                r.x.to_string(),
                r.count.to_string(),
                sig15(r.ratio),
                ratio(r.count, r.x),
                sig15(r.normalized),
            ]
        })
        .collect();
    (json_rows, text, csv)
}

fn series_outcome(mut b: Builder, s: SeriesApproximation) -> Outcome {
    b.warnings.push(TAIL_WARNING.into());
    let tail = s.tail_float();
    let text = vec![
        format!("k = {}, depth = {}", s.k, s.depth),
        format!("partial sum ~ {}", sig15(s.float_value)),
        format!("tail window ~ {} (heuristic)", sig15(tail)),
        format!(
            "exact partial sum has a {}-digit denominator; use --json for the fraction",
            digits(&s.partial_sum)
        ),
    ];
    let row = vec![
        s.k.to_string(),
        s.depth.to_string(),
        sig15(s.float_value),
        sig15(tail),
        format_rational(&s.partial_sum),
        format_rational(&s.tail_window),
    ];
    b.param("k", s.k).param("depth", s.depth).finish(
        json!({
            "k": s.k,
            "depth": s.depth,
            "partial_sum": format_rational(&s.partial_sum),
            "value": s.float_value,
            "tail_window": format_rational(&s.tail_window),
            "tail_window_value": tail,
        }),
        text,
        vec![
            "k",
            "depth",
            "value",
            "tail_window_value",
            "partial_sum",
            "tail_window",
        ],
        vec![row],
    )
}
