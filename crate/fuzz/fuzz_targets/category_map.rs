#![no_main]

use libfuzzer_sys::fuzz_target;
use remanlca_core::categories::CategoryMap;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(map) = CategoryMap::from_json(text) {
        for c in map.categories() {
            let _ = map.category_of(c);
        }
    }
});
