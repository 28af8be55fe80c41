//! Command-line frontend for `fibrank-core`.
//!
//! [`run`] parses arguments, executes one subcommand inside a rayon pool of
//! the requested size and writes the rendered result. Exit codes: 0 success,
//! 2 usage error, 3 domain error, 4 value out of range or above a cap.

pub mod args;
pub mod commands;
pub mod output;
pub mod parse;

use args::Cli;
use clap::Parser;
use commands::Target;
use fibrank_core::{Error, ErrorKind, LucasParams, Sequence};
use output::Format;
use std::ffi::OsString;
use std::io::Write;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DOMAIN: u8 = 3;
pub const EXIT_RANGE: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Usage => EXIT_USAGE,
        ErrorKind::Domain => EXIT_DOMAIN,
        ErrorKind::OutOfRange => EXIT_RANGE,
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn report(err: &mut dyn Write, code: &str, message: &str) {
    let _ = writeln!(err, "error: code={code} reason={}", one_line(message));
}

pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            report(err, "usage", first);
            return EXIT_USAGE;
        }
    };
    let g = &cli.global;
    let format = if g.json {
        Format::Json
    } else if g.csv {
        Format::Csv
    } else {
        Format::Text
    };

    let target = match (g.a1, g.a2) {
        (None, None) => Ok(Target {
            seq: Sequence::Fibonacci,
            a1: 1,
            a2: 1,
        }),
        (a1, a2) => {
            let (a1, a2) = (a1.unwrap_or(1), a2.unwrap_or(1));
            LucasParams::new(a1, a2).map(|u| Target {
                seq: Sequence::Lucas(u),
                a1,
                a2,
            })
        }
    };
    let target = match target {
        Ok(t) => t,
        Err(e) => {
            report(err, e.code(), &e.to_string());
            return exit_code(&e);
        }
    };

    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(g.threads)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            report(err, "thread_pool", &e.to_string());
            return EXIT_RANGE;
        }
    };
    match pool.install(|| commands::execute(&cli.command, target)) {
        Ok(outcome) => {
            if format != Format::Json {
                for w in &outcome.record.warnings {
                    let _ = writeln!(err, "warning: {}", one_line(w));
                }
            }
            let _ = out.write_all(outcome.render(format).as_bytes());
            EXIT_OK
        }
        Err(e) => {
            report(err, e.code(), &e.to_string());
            exit_code(&e)
        }
    }
}
