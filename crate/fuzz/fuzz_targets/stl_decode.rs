#![no_main]

use flexokit::geometry::{decode, stl};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(file) = decode(data) {
        assert_eq!(data.len(), stl::encoded_len(file.facets.len()));
    }
});
