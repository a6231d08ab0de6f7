//! Serialized form of a design document, in document units (mm, GPa, °C,
//! degrees). Field names are part of the file format.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentSchema {
    pub schema_version: i64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub materials: Vec<MaterialEntry>,
    #[serde(default)]
    pub flexures: Vec<FlexureEntry>,
    #[serde(default)]
    pub flexional_limits: Vec<FlexionalLimitEntry>,
    #[serde(default)]
    pub extensional_limits: Vec<ExtensionalLimitEntry>,
    #[serde(default)]
    pub limbs: Vec<LimbEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gait: Option<GaitEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process: Option<ProcessEntry>,
    #[serde(default)]
    pub export: ExportEntry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaterialKindEntry {
    Filament,
    BaseFilm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialEntry {
    pub name: String,
    pub kind: MaterialKindEntry,
    /// Defaults to the built-in datasheet value for PLA, ABS and PC.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub youngs_modulus_gpa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nozzle_temp_c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerEntry {
    pub material: String,
    pub thickness_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RibEntry {
    pub period_mm: f64,
    pub width_ratio: f64,
    pub feature_height_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlexureEntry {
    pub name: String,
    pub length_mm: f64,
    pub width_mm: f64,
    /// Bottom-first.
    pub base: Vec<LayerEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ribs: Option<RibEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rib_material: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlexionalLimitEntry {
    pub name: String,
    /// Arc spacing between adjacent features (D).
    pub spacing_mm: f64,
    /// Head radius (r).
    pub head_radius_mm: f64,
    /// Stem height (h).
    pub feature_height_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionalLimitEntry {
    pub name: String,
    /// Diagonal length of a standoff (L).
    pub feature_length_mm: f64,
    /// b.
    pub base_width_mm: f64,
    /// r.
    pub head_radius_mm: f64,
    /// h.
    pub height_mm: f64,
    /// γ.
    pub feature_angle_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseEntry {
    #[serde(default)]
    pub x_mm: f64,
    #[serde(default)]
    pub y_mm: f64,
    #[serde(default)]
    pub angle_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub joint_length_mm: f64,
    /// Flexure the joint is cut from; its stiffness follows from the laminate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flexure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsional_stiffness_nm_per_rad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flexional_limit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extensional_limit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jam_angle_deg: Option<f64>,
    /// +1 when positive rotation shortens the tendon, -1 otherwise.
    pub sense: i64,
    pub routing_offset_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SegmentEntry {
    Link { length_mm: f64 },
    Joint(JointEntry),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimbEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_pose: Option<PoseEntry>,
    pub segments: Vec<SegmentEntry>,
    /// Defaults to the full jam capacity of the limb.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_pull_mm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegEntry {
    pub name: String,
    pub limb: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaitEntry {
    pub legs: Vec<LegEntry>,
    pub pair_a: Vec<String>,
    pub pair_b: Vec<String>,
    #[serde(default)]
    pub frequencies_hz: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessEntry {
    pub bed_temp_c: f64,
    pub z_offset_mm: f64,
    pub material: String,
    pub pc_thickness_mm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nozzle_temp_c: Option<f64>,
}

fn default_facets() -> usize {
    16
}

fn default_feature_count() -> usize {
    4
}

fn default_head_thickness() -> f64 {
    1.0
}

fn default_stem_radius_ratio() -> f64 {
    0.5
}

fn default_feature_width() -> f64 {
    8.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportEntry {
    #[serde(default = "default_facets")]
    pub facets: usize,
    #[serde(default = "default_feature_count")]
    pub feature_count: usize,
    #[serde(default = "default_head_thickness")]
    pub head_thickness_mm: f64,
    #[serde(default = "default_stem_radius_ratio")]
    pub stem_radius_ratio: f64,
    /// Width of the extensional standoff strip (both lanes together).
    #[serde(default = "default_feature_width")]
    pub feature_width_mm: f64,
}

impl Default for ExportEntry {
    fn default() -> Self {
        Self {
            facets: default_facets(),
            feature_count: default_feature_count(),
            head_thickness_mm: default_head_thickness(),
            stem_radius_ratio: default_stem_radius_ratio(),
            feature_width_mm: default_feature_width(),
        }
    }
}
