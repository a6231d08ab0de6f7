//! Replays the fuzz corpus seeds through the fuzz-target invariants.

use std::path::PathBuf;

use flexokit::geometry::{decode, stl};
use flexokit::sweep::SweepSpec;
use flexokit::MaterialOverrides;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn parse_design_seeds() {
    let mut accepted = 0;
    for (name, data) in seeds("parse_design") {
        let Ok(text) = std::str::from_utf8(&data) else { continue };
        if let Ok(doc) = flexokit::parse_design(text) {
            let json = doc.to_json();
            let again = flexokit::parse_design(&json).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(again.to_json(), json, "{name}");
            accepted += 1;
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn materials_override_seeds() {
    let base = include_str!("../designs/hind_leg.json");
    for (_, data) in seeds("materials_override") {
        if let Ok(o) = MaterialOverrides::parse(std::str::from_utf8(&data).unwrap()) {
            let _ = flexokit::parse_design_with_overrides(base, &o);
        }
    }
}

#[test]
fn sweep_spec_seeds() {
    for (name, data) in seeds("sweep_spec") {
        if let Ok(spec) = SweepSpec::parse(std::str::from_utf8(&data).unwrap()) {
            let values = spec.values();
            assert_eq!(values.len(), spec.count().unwrap(), "{name}");
            let again = SweepSpec::parse(&spec.to_string()).unwrap();
            assert_eq!((again.start, again.stop, again.step), (spec.start, spec.stop, spec.step));
            assert_eq!(again.count().ok(), Some(values.len()), "{name}");
        }
    }
}

#[test]
fn stl_decode_seeds() {
    let mut accepted = 0;
    for (_, data) in seeds("stl_decode") {
        if let Ok(file) = decode(&data) {
            assert_eq!(data.len(), stl::encoded_len(file.facets.len()));
            accepted += 1;
        }
    }
    assert_eq!(accepted, 3);
}
