#![no_main]

use libfuzzer_sys::fuzz_target;
use remanlca_core::fixtures;
use remanlca_core::scenario::{apply_location, LocationProfiles};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(profiles) = LocationProfiles::from_json(text) else { return };
    let reman = fixtures::remanufactured_system();
    let store = fixtures::factor_store();
    for profile in profiles.iter() {
        let _ = apply_location(&reman, profile, &store);
    }
});
