#![no_main]

use fibrank_cli::parse::parse_checkpoints;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cps) = parse_checkpoints(s) {
        assert!(!cps.is_empty());
        let joined = cps.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        assert_eq!(parse_checkpoints(&joined).unwrap(), cps);
    }
});
