//! Printable geometry for flexures and jamming features, and binary STL export.
//!
//! Meshes are in millimeters. The base film is stock material and is never
//! meshed; export manifests record its thickness instead.

pub mod mesh;
pub mod solids;
pub mod stl;

use serde::Serialize;

pub use mesh::{BoundingBox, Triangle, TriangleMesh, Vec3};
pub use solids::{
    build_extensional_features, build_flexional_features, build_flexure_solid, extensional_recipe,
    flexional_recipe, flexure_recipe, Primitive, SolidRecipe, StandoffPlacement,
};
pub use stl::{decode, encode, export_stl};

use crate::design::schema::ProcessEntry;
use crate::units::mm_to_m;

/// Meshing options for jamming features. Lengths in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureOptions {
    /// Polygon sides for round stems and heads.
    pub facets: usize,
    /// Pillar head disk thickness.
    pub head_thickness: f64,
    /// Stem radius as a fraction of the head radius.
    pub stem_radius_ratio: f64,
    /// Width of the extensional standoff strip.
    pub feature_width: f64,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        Self {
            facets: 16,
            head_thickness: mm_to_m(1.0),
            stem_radius_ratio: 0.5,
            feature_width: mm_to_m(8.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BboxMm {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

/// Sidecar metadata written next to each STL.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExportManifest {
    pub part_name: String,
    pub stl_file: String,
    pub triangle_count: usize,
    pub stl_bytes: u64,
    pub volume_mm3: f64,
    pub bbox_mm: Option<BboxMm>,
    /// Film the part must be printed onto; `None` when the part does not set it.
    pub pc_film_thickness_mm: Option<f64>,
    pub process_config: Option<ProcessEntry>,
}

impl ExportManifest {
    pub fn new(
        part_name: &str,
        stl_file: &str,
        mesh: &TriangleMesh,
        pc_film_thickness_mm: Option<f64>,
        process_config: Option<ProcessEntry>,
    ) -> Self {
        Self {
            part_name: part_name.to_string(),
            stl_file: stl_file.to_string(),
            triangle_count: mesh.len(),
            stl_bytes: stl::encoded_len(mesh.len()) as u64,
            volume_mm3: mesh.signed_volume(),
            bbox_mm: mesh.bounding_box().map(|b| BboxMm { min: b.min, max: b.max }),
            pc_film_thickness_mm,
            process_config,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}
