//! Replays the checked-in fuzz corpus through the properties the fuzz
//! targets assert, so the seeds stay meaningful without a nightly toolchain.

use fibrank_cli::output::OutputRecord;
use fibrank_cli::parse::{format_rational, parse_checkpoints, parse_rational};
use fibrank_core::oracle::Gamma;
use std::path::PathBuf;

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<String> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| std::fs::read_to_string(entry.unwrap().path()).unwrap())
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn gamma_seeds() {
    for s in seeds("parse_gamma") {
        let g: Gamma = s.parse().unwrap_or_else(|e| panic!("{s:?}: {e}"));
        assert_eq!(g.to_string().parse::<Gamma>().unwrap(), g);
    }
}

#[test]
fn checkpoint_seeds() {
    for s in seeds("parse_checkpoints") {
        let cps = parse_checkpoints(&s).unwrap();
        let joined = cps.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        assert_eq!(parse_checkpoints(&joined).unwrap(), cps);
    }
}

#[test]
fn rational_seeds() {
    for s in seeds("parse_rational") {
        let r = parse_rational(&s).unwrap();
        assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }
}

#[test]
fn record_seeds() {
    for s in seeds("output_record_json") {
        let rec = OutputRecord::from_json(s.trim_end()).unwrap();
        assert_eq!(rec.to_json(), s.trim_end());
    }
}
