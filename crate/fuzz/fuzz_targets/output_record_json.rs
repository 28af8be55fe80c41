#![no_main]

use fibrank_cli::output::OutputRecord;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rec) = OutputRecord::from_json(s) {
        let again = OutputRecord::from_json(&rec.to_json()).expect("re-encoded record parses");
        assert_eq!(again, rec);
    }
});
