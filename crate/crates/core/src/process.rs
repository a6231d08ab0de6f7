//! Print-process parameter checks for printing filament onto a heated base film.
//!
//! Validation never fails: every finding is a report entry with a stable code.

use std::fmt;

use serde::Serialize;

use crate::material::{Material, MaterialKind};

/// Recommended bed temperature range for film adhesion, °C.
pub const BED_TEMP_RANGE: (f64, f64) = (80.0, 100.0);
/// Bed temperatures with the highest observed peel strength, °C.
pub const PEAK_PEEL_BAND: (f64, f64) = (90.0, 100.0);
/// First-layer Z-offset above the film, mm. Shared by all filaments.
pub const Z_OFFSET_RANGE: (f64, f64) = (0.01, 0.03);
/// Film thicknesses the process has been demonstrated with, mm.
pub const FILM_THICKNESS_RANGE: (f64, f64) = (0.1, 0.2);
/// Peel strength of a commercial acrylic adhesive on ABS, N/cm.
pub const REFERENCE_PEEL_STRENGTH_N_PER_CM: f64 = 11.2;

#[derive(Debug, Clone, PartialEq)]
pub struct PrintProcessConfig {
    /// °C.
    pub bed_temp: f64,
    /// mm.
    pub z_offset: f64,
    pub material: Material,
    /// mm.
    pub pc_thickness: f64,
    /// °C; when absent the material's declared nozzle temperature is used.
    pub nozzle_temp: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Ok,
    Warning,
    Error,
}

/// Closed set of report codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReportCode {
    NonFiniteParameter,
    BedTempInRange,
    BedTempPeakBand,
    BedTempLow,
    BedTempHigh,
    ZOffsetInRange,
    ZOffsetLow,
    ZOffsetHigh,
    NozzleTempMatch,
    NozzleTempDefault,
    NozzleTempMismatch,
    PrintMaterialNotFilament,
    PcThicknessInRange,
    PcThicknessUntested,
    PeelStrengthReference,
}

impl ReportCode {
    pub const ALL: [ReportCode; 15] = [
        ReportCode::NonFiniteParameter,
        ReportCode::BedTempInRange,
        ReportCode::BedTempPeakBand,
        ReportCode::BedTempLow,
        ReportCode::BedTempHigh,
        ReportCode::ZOffsetInRange,
        ReportCode::ZOffsetLow,
        ReportCode::ZOffsetHigh,
        ReportCode::NozzleTempMatch,
        ReportCode::NozzleTempDefault,
        ReportCode::NozzleTempMismatch,
        ReportCode::PrintMaterialNotFilament,
        ReportCode::PcThicknessInRange,
        ReportCode::PcThicknessUntested,
        ReportCode::PeelStrengthReference,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ReportCode::NonFiniteParameter => "NON_FINITE_PARAMETER",
            ReportCode::BedTempInRange => "BED_TEMP_IN_RANGE",
            ReportCode::BedTempPeakBand => "BED_TEMP_PEAK_BAND",
            ReportCode::BedTempLow => "BED_TEMP_LOW",
            ReportCode::BedTempHigh => "BED_TEMP_HIGH",
            ReportCode::ZOffsetInRange => "Z_OFFSET_IN_RANGE",
            ReportCode::ZOffsetLow => "Z_OFFSET_LOW",
            ReportCode::ZOffsetHigh => "Z_OFFSET_HIGH",
            ReportCode::NozzleTempMatch => "NOZZLE_TEMP_MATCH",
            ReportCode::NozzleTempDefault => "NOZZLE_TEMP_DEFAULT",
            ReportCode::NozzleTempMismatch => "NOZZLE_TEMP_MISMATCH",
            ReportCode::PrintMaterialNotFilament => "PRINT_MATERIAL_NOT_FILAMENT",
            ReportCode::PcThicknessInRange => "PC_THICKNESS_IN_RANGE",
            ReportCode::PcThicknessUntested => "PC_THICKNESS_UNTESTED",
            ReportCode::PeelStrengthReference => "PEEL_STRENGTH_REFERENCE",
        }
    }
}

impl fmt::Display for ReportCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportEntry {
    pub level: Level,
    pub code: ReportCode,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub entries: Vec<ReportEntry>,
    pub reference_peel_strength_n_per_cm: f64,
}

impl ValidationReport {
    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
            reference_peel_strength_n_per_cm: REFERENCE_PEEL_STRENGTH_N_PER_CM,
        }
    }

    pub fn has(&self, code: ReportCode) -> bool {
        self.entries.iter().any(|e| e.code == code)
    }

    pub fn count(&self, level: Level) -> usize {
        self.entries.iter().filter(|e| e.level == level).count()
    }

    pub fn has_warnings(&self) -> bool {
        self.count(Level::Warning) > 0
    }

    pub fn has_errors(&self) -> bool {
        self.count(Level::Error) > 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let level = match e.level {
                Level::Ok => "ok",
                Level::Warning => "warning",
                Level::Error => "error",
            };
            out.push_str(&format!("[{level:<7}] {}: {}\n", e.code, e.message));
        }
        out.push_str(&format!(
            "{} ok, {} warning(s), {} error(s)\n",
            self.count(Level::Ok),
            self.count(Level::Warning),
            self.count(Level::Error)
        ));
        out
    }

    fn push(&mut self, level: Level, code: ReportCode, message: String) {
        self.entries.push(ReportEntry { level, code, message });
    }
}

pub fn validate_process(config: &PrintProcessConfig) -> ValidationReport {
    let mut report = ValidationReport::empty();
    let fields = [
        ("bed_temp", config.bed_temp),
        ("z_offset", config.z_offset),
        ("pc_thickness", config.pc_thickness),
    ];
    for (name, value) in fields {
        if !value.is_finite() {
            report.push(
                Level::Error,
                ReportCode::NonFiniteParameter,
                format!("{name} is not a finite number"),
            );
        }
    }
    if let Some(t) = config.nozzle_temp.filter(|t| !t.is_finite()) {
        report.push(
            Level::Error,
            ReportCode::NonFiniteParameter,
            format!("nozzle_temp {t} is not a finite number"),
        );
    }

    let bed = config.bed_temp;
    if bed.is_finite() {
        let (lo, hi) = BED_TEMP_RANGE;
        if bed < lo {
            report.push(
                Level::Warning,
                ReportCode::BedTempLow,
                format!("bed temperature {bed} °C below {lo} °C: outside recommended adhesion range, low peel strength expected"),
            );
        } else if bed > hi {
            report.push(
                Level::Warning,
                ReportCode::BedTempHigh,
                format!("bed temperature {bed} °C above {hi} °C: outside recommended adhesion range"),
            );
        } else if bed >= PEAK_PEEL_BAND.0 {
            report.push(
                Level::Ok,
                ReportCode::BedTempPeakBand,
                format!(
                    "bed temperature {bed} °C in peak peel-strength band [{}, {}] °C",
                    PEAK_PEEL_BAND.0, PEAK_PEEL_BAND.1
                ),
            );
        } else {
            report.push(
                Level::Ok,
                ReportCode::BedTempInRange,
                format!("bed temperature {bed} °C within [{lo}, {hi}] °C"),
            );
        }
    }

    let z = config.z_offset;
    if z.is_finite() {
        let (lo, hi) = Z_OFFSET_RANGE;
        if z < lo {
            report.push(
                Level::Warning,
                ReportCode::ZOffsetLow,
                format!("Z-offset {z} mm below {lo} mm: nozzle may drag on the film"),
            );
        } else if z > hi {
            report.push(
                Level::Warning,
                ReportCode::ZOffsetHigh,
                format!("Z-offset {z} mm above {hi} mm: insufficient first-layer contact pressure on the film"),
            );
        } else {
            report.push(
                Level::Ok,
                ReportCode::ZOffsetInRange,
                format!("Z-offset {z} mm within [{lo}, {hi}] mm"),
            );
        }
    }

    let material = &config.material;
    if material.kind != MaterialKind::Filament {
        report.push(
            Level::Error,
            ReportCode::PrintMaterialNotFilament,
            format!("print material {} is a base film, not a filament", material.name),
        );
    }
    match (config.nozzle_temp, material.nozzle_temp) {
        (Some(set), Some(declared)) if set.is_finite() && set != declared => report.push(
            Level::Warning,
            ReportCode::NozzleTempMismatch,
            format!(
                "nozzle temperature {set} °C differs from {} declared {declared} °C",
                material.name
            ),
        ),
        (Some(set), Some(_)) if set.is_finite() => report.push(
            Level::Ok,
            ReportCode::NozzleTempMatch,
            format!("nozzle temperature {set} °C matches {}", material.name),
        ),
        (None, Some(declared)) => report.push(
            Level::Ok,
            ReportCode::NozzleTempDefault,
            format!("nozzle temperature {declared} °C taken from {}", material.name),
        ),
        _ => {}
    }

    let film = config.pc_thickness;
    if film.is_finite() {
        let (lo, hi) = FILM_THICKNESS_RANGE;
        if film < lo || film > hi {
            report.push(
                Level::Warning,
                ReportCode::PcThicknessUntested,
                format!("base film thickness {film} mm outside demonstrated [{lo}, {hi}] mm"),
            );
        } else {
            report.push(
                Level::Ok,
                ReportCode::PcThicknessInRange,
                format!("base film thickness {film} mm within [{lo}, {hi}] mm"),
            );
        }
    }

    report.push(
        Level::Ok,
        ReportCode::PeelStrengthReference,
        format!(
            "reference: commercial acrylic adhesive on ABS peels at {REFERENCE_PEEL_STRENGTH_N_PER_CM} N/cm"
        ),
    );
    report
}
