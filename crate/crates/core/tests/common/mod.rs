//! Helpers shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use flexokit::DesignDoc;

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn design_path(name: &str) -> PathBuf {
    crate_dir().join("designs").join(name)
}

pub fn load(name: &str) -> DesignDoc {
    let text = std::fs::read_to_string(design_path(name)).expect("bundled design");
    flexokit::parse_design(&text).expect("bundled design parses")
}

pub fn golden_dir() -> PathBuf {
    crate_dir().join("tests").join("golden")
}

/// Run the CLI with `args` (`{designs}` expands to the bundled design dir)
/// writing into `out_dir`.
pub fn run_cli(args: &[&str], out_dir: &Path) -> Output {
    let designs = crate_dir().join("designs");
    let designs = designs.to_str().expect("utf-8 path");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_flexokit"));
    for a in args {
        cmd.arg(a.replace("{designs}", designs));
    }
    cmd.arg("--out-dir").arg(out_dir);
    cmd.env_remove("FLEXOKIT_MATERIALS");
    cmd.output().expect("spawn flexokit")
}

pub struct GoldenCase {
    pub name: &'static str,
    pub args: &'static [&'static str],
    /// Files compared against `tests/golden/<name>/`.
    pub golden: &'static [&'static str],
    /// Files only required to be byte-stable across runs.
    pub stable: &'static [&'static str],
}

pub const GOLDEN_CASES: &[GoldenCase] = &[
    GoldenCase {
        name: "validate_hind_leg",
        args: &["validate", "{designs}/hind_leg.json"],
        golden: &["validation_report.json"],
        stable: &[],
    },
    GoldenCase {
        name: "extensional_sweep",
        args: &["solve-limit", "--extensional", "--sweep", "L=6.5:7.5:0.25"],
        golden: &["limit_sweep.csv"],
        stable: &[],
    },
    GoldenCase {
        name: "flexional_sweep",
        args: &["solve-limit", "--flexional", "--sweep", "h=4:12:2"],
        golden: &["limit_sweep.csv"],
        stable: &[],
    },
    GoldenCase {
        name: "width_ratio_sweep",
        args: &["predict-stiffness", "-i", "{designs}/reference_sample.json", "--sweep", "width_ratio=0:0.8:0.1"],
        golden: &["stiffness.csv"],
        stable: &[],
    },
    GoldenCase {
        name: "design_width_ratio",
        args: &["design", "-i", "{designs}/reference_sample.json", "--target", "width-ratio", "--value", "50"],
        golden: &["design.json"],
        stable: &[],
    },
    GoldenCase {
        name: "simulate_hind_leg",
        args: &["simulate-limb", "-i", "{designs}/hind_leg.json"],
        golden: &["hind_leg_metrics.json", "hind_leg_trajectory.csv"],
        stable: &["hind_leg_curvature.csv"],
    },
    GoldenCase {
        name: "gait_quadruped",
        args: &["simulate-gait", "-i", "{designs}/quadruped.json"],
        golden: &["gait_speed.csv"],
        stable: &[],
    },
    GoldenCase {
        name: "export_reference_sample",
        args: &["export-geometry", "-i", "{designs}/reference_sample.json"],
        golden: &[
            "flexure_sample.manifest.json",
            "flexional_pillars_h4.manifest.json",
            "extensional_standoffs_l7.manifest.json",
        ],
        stable: &["flexure_sample.stl", "flexional_pillars_h4.stl", "extensional_standoffs_l7.stl"],
    },
];

/// Run a case twice and compare with the checked-in golden files. Set
/// `FLEXOKIT_BLESS=1` to rewrite the golden files instead.
pub fn check_golden(case: &GoldenCase) -> Result<(), String> {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    for dir in [a.path(), b.path()] {
        let out = run_cli(case.args, dir);
        if !out.status.success() {
            return Err(format!(
                "{}: exit {:?}: {}",
                case.name,
                out.status.code(),
                String::from_utf8_lossy(&out.stderr)
            ));
        }
    }
    let bless = std::env::var_os("FLEXOKIT_BLESS").is_some();
    let golden = golden_dir().join(case.name);
    for file in case.golden.iter().chain(case.stable) {
        let first = std::fs::read(a.path().join(file)).map_err(|e| format!("{}/{file}: {e}", case.name))?;
        let second = std::fs::read(b.path().join(file)).map_err(|e| format!("{}/{file}: {e}", case.name))?;
        if first != second {
            return Err(format!("{}/{file}: differs between identical runs", case.name));
        }
    }
    for file in case.golden {
        let produced = std::fs::read(a.path().join(file)).expect("read above");
        let path = golden.join(file);
        if bless {
            std::fs::create_dir_all(&golden).map_err(|e| e.to_string())?;
            std::fs::write(&path, &produced).map_err(|e| e.to_string())?;
            continue;
        }
        let expected = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        if expected != produced {
            return Err(format!("{}/{file}: differs from {}", case.name, path.display()));
        }
    }
    Ok(())
}
