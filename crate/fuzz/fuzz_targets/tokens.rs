#![no_main]

use libfuzzer_sys::fuzz_target;
use remanlca_core::scenario::{Location, RejectionMode, SweepParam};
use remanlca_core::units::Unit;

// Short string tokens accepted on the command line and in documents.
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(unit) = s.parse::<Unit>() {
        assert_eq!(unit.symbol().parse::<Unit>().unwrap(), unit);
    }
    if let Ok(loc) = s.parse::<Location>() {
        assert_eq!(loc.code().parse::<Location>().unwrap(), loc);
    }
    let _ = s.parse::<RejectionMode>();
    let _ = s.parse::<SweepParam>();
});
