#![no_main]

use flexokit::sweep::SweepSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = SweepSpec::parse(text) {
        let values = spec.values();
        assert_eq!(values.len(), spec.count().expect("parsed sweeps have a count"));
        assert!(values.iter().all(|v| v.is_finite()));
        let again = SweepSpec::parse(&spec.to_string()).expect("displayed sweep must parse");
        assert_eq!((again.start, again.stop, again.step), (spec.start, spec.stop, spec.step));
        assert_eq!(again.count().ok(), Some(values.len()));
    }
});
