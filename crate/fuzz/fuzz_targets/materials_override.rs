#![no_main]

use libfuzzer_sys::fuzz_target;

const BASE: &str = include_str!("../../crates/core/designs/hind_leg.json");

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(overrides) = flexokit::MaterialOverrides::parse(text) {
        let _ = flexokit::parse_design_with_overrides(BASE, &overrides);
    }
});
