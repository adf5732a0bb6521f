#![no_main]

use libfuzzer_sys::fuzz_target;
use remanlca_core::buyback::{parse_schemes, scheme_emissions};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(schemes) = parse_schemes(text) else { return };
    for spec in &schemes {
        let res = scheme_emissions(spec).expect("parsed schemes are valid");
        assert!(res.injection >= 1 && res.injection <= spec.uses);
    }
});
