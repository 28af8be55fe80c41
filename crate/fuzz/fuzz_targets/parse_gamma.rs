#![no_main]

use fibrank_core::oracle::{Gamma, MAX_GAMMA_DENOMINATOR};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = s.parse::<Gamma>() {
        assert!(0 < g.numer() && g.numer() < g.denom());
        assert!(g.denom() <= MAX_GAMMA_DENOMINATOR);
        assert_eq!(g.to_string().parse::<Gamma>().unwrap(), g);
    }
});
