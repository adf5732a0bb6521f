#![no_main]

use libfuzzer_sys::fuzz_target;
use remanlca_core::engine::system_emissions;
use remanlca_core::fixtures;
use remanlca_core::model::SystemDocument;
use remanlca_core::validate::{validate_factor_coverage, validate_system};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = SystemDocument::from_json(text) else { return };
    let rubric = fixtures::rubric();
    let report = validate_system(&doc, &rubric);
    let built = doc.into_system(&rubric);
    // a document that validates cleanly must build
    if report.is_valid() {
        assert!(built.is_ok(), "valid document failed to build: {:?}", built.err());
    }
    if let Ok(sys) = built {
        let store = fixtures::factor_store();
        let _ = validate_factor_coverage(&sys, &store);
        if let Ok(bd) = system_emissions(&sys, &store) {
            let by_stage: f64 = bd.per_stage.iter().map(|(_, v)| v).sum();
            assert!((by_stage - bd.total).abs() <= 1e-9 * bd.total.abs().max(1.0));
        }
    }
});
