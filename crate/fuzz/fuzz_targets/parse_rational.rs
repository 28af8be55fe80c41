#![no_main]

use fibrank_cli::parse::{format_rational, parse_rational};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(r) = parse_rational(s) {
        let text = format_rational(&r);
        assert_eq!(parse_rational(&text).unwrap(), r);
        assert_eq!(format_rational(&parse_rational(&text).unwrap()), text);
    }
});
