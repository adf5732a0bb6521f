#![no_main]

use libfuzzer_sys::fuzz_target;
use remanlca_core::factors::FactorStore;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(store) = FactorStore::from_json(text) {
        let again = FactorStore::from_json(&store.to_json()).expect("serialised store re-parses");
        assert_eq!(again.len(), store.len());
    }
});
