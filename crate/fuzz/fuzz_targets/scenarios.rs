#![no_main]

use libfuzzer_sys::fuzz_target;
use remanlca_core::engine::system_emissions;
use remanlca_core::fixtures;
use remanlca_core::scenario::{parse_scenarios, run_scenarios, Baseline};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(named) = parse_scenarios(text) else { return };
    let store = fixtures::factor_store();
    let reman = fixtures::remanufactured_system();
    let locations = fixtures::location_profiles();
    let virgin_emission = system_emissions(&fixtures::virgin_system(), &store).unwrap().total;
    let base = Baseline {
        virgin_emission,
        reman: &reman,
        store: &store,
        locations: &locations,
    };
    let _ = run_scenarios(&named, &base);
});
