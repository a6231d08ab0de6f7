#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(doc) = flexokit::parse_design(text) {
        // Anything accepted must survive its own serialization.
        let json = doc.to_json();
        let again = flexokit::parse_design(&json).expect("serialized design must parse");
        assert_eq!(again.to_json(), json, "design round trip is not idempotent");
    }
});
