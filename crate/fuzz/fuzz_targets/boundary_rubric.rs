#![no_main]

use libfuzzer_sys::fuzz_target;
use remanlca_core::boundary::{classify_flow, BoundaryRubric};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rubric) = BoundaryRubric::from_json(text) {
        let _ = classify_flow("polysulfone", "raw-materials", &rubric);
    }
});
