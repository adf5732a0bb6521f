#![no_main]

use libfuzzer_sys::fuzz_target;
use remanlca_core::gwp::{gwp_aggregate, GwpTable};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = GwpTable::from_json(text) {
        let _ = gwp_aggregate(&[("CO2", 1.0), ("CH4", 0.5)], &table);
    }
});
