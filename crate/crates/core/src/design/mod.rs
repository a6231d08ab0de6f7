//! Design documents: parsing, cross-reference resolution and re-serialization.
//!
//! A document is JSON with `schema_version: 1`. Lengths are given in mm,
//! moduli in GPa, temperatures in °C and angles in degrees; the resolved
//! [`DesignDoc`] holds SI values.

pub mod schema;

use std::collections::HashSet;

use indexmap::IndexMap;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gait::{GaitLeg, GaitSpec};
use crate::geometry::FeatureOptions;
use crate::joint_limits::{
    extensional_jam_angle, flexional_jam_angle, ExtensionalLimitSpec, FlexionalLimitSpec,
};
use crate::limb::{BasePose, JointDef, LimbSpec, Segment, Sense};
use crate::material::{FlexureSpec, LaminateStack, Layer, Material, MaterialKind, RibPattern};
use crate::process::PrintProcessConfig;
use crate::stiffness::torsional_stiffness;
use crate::units::{deg_to_rad, gpa_to_pa, mm_to_m};

use schema::*;

pub const SCHEMA_VERSION: i64 = 1;
/// Pull steps per half cycle when a limb does not set its own.
pub const DEFAULT_STEPS: usize = 101;

/// Where a joint's jam cap comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum LimitSource {
    Flexional(String),
    Extensional(String),
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointInfo {
    pub name: String,
    pub flexure: Option<String>,
    pub limit: LimitSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimbDesign {
    pub spec: LimbSpec,
    /// m; `None` means the full jam capacity.
    pub max_pull: Option<f64>,
    pub steps: usize,
    /// One per joint, in joint order.
    pub joints: Vec<JointInfo>,
}

impl LimbDesign {
    pub fn max_pull(&self) -> f64 {
        self.max_pull.unwrap_or_else(|| self.spec.capacity())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExportOptions {
    pub feature_count: usize,
    pub features: FeatureOptions,
}

/// A fully resolved, validated design document.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignDoc {
    pub schema_version: i64,
    pub materials: IndexMap<String, Material>,
    pub flexures: IndexMap<String, FlexureSpec>,
    pub flexional_limits: IndexMap<String, FlexionalLimitSpec>,
    pub extensional_limits: IndexMap<String, ExtensionalLimitSpec>,
    pub limbs: IndexMap<String, LimbDesign>,
    pub gait: Option<GaitSpec>,
    pub process: Option<PrintProcessConfig>,
    pub export: ExportOptions,
    source: DocumentSchema,
}

impl DesignDoc {
    /// The normalized document this design was resolved from.
    pub fn source(&self) -> &DocumentSchema {
        &self.source
    }

    /// Pretty JSON in document units; parses back to an identical `DesignDoc`.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.source).expect("schema serializes");
        s.push('\n');
        s
    }

    pub fn flexure(&self, name: &str) -> Result<&FlexureSpec> {
        self.flexures.get(name).ok_or_else(|| dangling("flexure", name, "flexures"))
    }

    pub fn limb(&self, name: &str) -> Result<&LimbDesign> {
        self.limbs.get(name).ok_or_else(|| dangling("limb", name, "limbs"))
    }
}

/// Material entries that replace (or add to) a document's materials table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MaterialOverrides(pub Vec<MaterialEntry>);

impl MaterialOverrides {
    /// Accepts either a JSON list of material entries or `{"materials": [...]}`.
    pub fn parse(text: &str) -> Result<Self> {
        let value = parse_value(text)?;
        let list = match value {
            Value::Object(mut map) if map.contains_key("materials") => {
                if map.len() != 1 {
                    return Err(schema_err("", "override file may only contain `materials`"));
                }
                map.remove("materials").expect("checked")
            }
            other => other,
        };
        let entries: Vec<MaterialEntry> = deserialize_at(list, "materials")?;
        Ok(Self(entries))
    }

    fn apply(&self, materials: &mut Vec<MaterialEntry>) {
        for entry in &self.0 {
            match materials.iter_mut().find(|m| m.name == entry.name) {
                Some(slot) => *slot = entry.clone(),
                None => materials.push(entry.clone()),
            }
        }
    }
}

pub fn parse_design(text: &str) -> Result<DesignDoc> {
    parse_design_with_overrides(text, &MaterialOverrides::default())
}

pub fn parse_design_with_overrides(text: &str, overrides: &MaterialOverrides) -> Result<DesignDoc> {
    let value = parse_value(text)?;
    check_version(&value)?;
    let mut source: DocumentSchema = deserialize_at(value, "")?;
    overrides.apply(&mut source.materials);
    resolve(source)
}

fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn check_version(value: &Value) -> Result<()> {
    let Value::Object(map) = value else {
        return Err(schema_err("", "document must be a JSON object"));
    };
    match map.get("schema_version") {
        None => Err(schema_err("schema_version", "missing field")),
        Some(v) => match v.as_i64() {
            Some(SCHEMA_VERSION) => Ok(()),
            Some(other) => Err(Error::UnsupportedVersion(other)),
            None => Err(schema_err("schema_version", "expected an integer")),
        },
    }
}

fn deserialize_at<T: serde::de::DeserializeOwned>(value: Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix.is_empty(), inner.as_str()) {
            (true, _) => inner.clone(),
            (false, ".") => prefix.to_string(),
            (false, _) if inner.starts_with('[') => format!("{prefix}{inner}"),
            (false, _) => format!("{prefix}.{inner}"),
        };
        Error::Schema {
            path,
            message: e.into_inner().to_string(),
        }
    })
}

fn schema_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn dangling(kind: &'static str, name: &str, path: impl Into<String>) -> Error {
    Error::DanglingReference {
        kind,
        name: name.to_string(),
        path: path.into(),
    }
}

/// Re-tag a domain validation failure with the document path it came from.
fn at(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::InvalidParameter(message) => schema_err(path, message),
        Error::Schema { .. } | Error::DanglingReference { .. } => e,
        other => schema_err(path, other.to_string()),
    }
}

fn finite(path: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(schema_err(path, "expected a finite number"))
    }
}

fn unique_names<'a>(section: &str, names: impl Iterator<Item = &'a String>) -> Result<()> {
    let mut seen = HashSet::new();
    for (i, name) in names.enumerate() {
        if name.is_empty() {
            return Err(schema_err(format!("{section}[{i}].name"), "name must not be empty"));
        }
        if !seen.insert(name.as_str()) {
            return Err(schema_err(format!("{section}[{i}].name"), format!("duplicate name \"{name}\"")));
        }
    }
    Ok(())
}

fn resolve_material(entry: &MaterialEntry, path: &str) -> Result<Material> {
    let modulus = match entry.youngs_modulus_gpa {
        Some(gpa) => gpa_to_pa(finite(&format!("{path}.youngs_modulus_gpa"), gpa)?),
        None => Material::default_modulus(&entry.name).ok_or_else(|| {
            schema_err(
                format!("{path}.youngs_modulus_gpa"),
                format!("required: no default modulus for \"{}\"", entry.name),
            )
        })?,
    };
    let (kind, nozzle) = match entry.kind {
        MaterialKindEntry::Filament => {
            let t = match entry.nozzle_temp_c {
                Some(t) => t,
                None => Material::default_nozzle_temp(&entry.name).ok_or_else(|| {
                    schema_err(
                        format!("{path}.nozzle_temp_c"),
                        format!("required for filament \"{}\"", entry.name),
                    )
                })?,
            };
            (MaterialKind::Filament, Some(t))
        }
        MaterialKindEntry::BaseFilm => {
            if entry.nozzle_temp_c.is_some() {
                return Err(schema_err(
                    format!("{path}.nozzle_temp_c"),
                    "base films are not extruded and take no nozzle temperature",
                ));
            }
            (MaterialKind::BaseFilm, None)
        }
    };
    Material::new(entry.name.clone(), modulus, nozzle, kind).map_err(at(path))
}

struct Resolver<'a> {
    materials: &'a IndexMap<String, Material>,
}

impl Resolver<'_> {
    fn material(&self, name: &str, path: impl Into<String>) -> Result<Material> {
        self.materials
            .get(name)
            .cloned()
            .ok_or_else(|| dangling("material", name, path))
    }

    fn flexure(&self, entry: &FlexureEntry, path: &str) -> Result<FlexureSpec> {
        let layers = entry
            .base
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let lp = format!("{path}.base[{i}]");
                let material = self.material(&l.material, format!("{lp}.material"))?;
                let t = finite(&format!("{lp}.thickness_mm"), l.thickness_mm)?;
                Ok(Layer::new(material, mm_to_m(t)))
            })
            .collect::<Result<Vec<_>>>()?;
        let base = LaminateStack::new(layers).map_err(at(&format!("{path}.base")))?;
        let ribs = entry
            .ribs
            .as_ref()
            .map(|r| {
                RibPattern::new(
                    mm_to_m(r.period_mm),
                    r.width_ratio,
                    mm_to_m(r.feature_height_mm),
                )
                .map_err(at(&format!("{path}.ribs")))
            })
            .transpose()?;
        let rib_material = match &entry.rib_material {
            Some(name) => self.material(name, format!("{path}.rib_material"))?,
            None => base.top_filament().cloned().ok_or_else(|| {
                schema_err(
                    format!("{path}.rib_material"),
                    "required when the base stack has no filament layer",
                )
            })?,
        };
        FlexureSpec::new(
            mm_to_m(entry.length_mm),
            mm_to_m(entry.width_mm),
            base,
            ribs,
            rib_material,
        )
        .map_err(at(path))
    }
}

fn resolve(source: DocumentSchema) -> Result<DesignDoc> {
    unique_names("materials", source.materials.iter().map(|m| &m.name))?;
    unique_names("flexures", source.flexures.iter().map(|m| &m.name))?;
    unique_names("flexional_limits", source.flexional_limits.iter().map(|m| &m.name))?;
    unique_names("extensional_limits", source.extensional_limits.iter().map(|m| &m.name))?;
    unique_names("limbs", source.limbs.iter().map(|m| &m.name))?;
    if source.materials.is_empty() {
        return Err(schema_err("materials", "at least one material is required"));
    }

    let mut materials = IndexMap::new();
    for (i, entry) in source.materials.iter().enumerate() {
        let m = resolve_material(entry, &format!("materials[{i}]"))?;
        materials.insert(entry.name.clone(), m);
    }
    let resolver = Resolver {
        materials: &materials,
    };

    let mut flexures = IndexMap::new();
    for (i, entry) in source.flexures.iter().enumerate() {
        let f = resolver.flexure(entry, &format!("flexures[{i}]"))?;
        flexures.insert(entry.name.clone(), f);
    }

    let mut flexional_limits = IndexMap::new();
    for (i, e) in source.flexional_limits.iter().enumerate() {
        let spec = FlexionalLimitSpec::new(
            mm_to_m(e.spacing_mm),
            mm_to_m(e.head_radius_mm),
            mm_to_m(e.feature_height_mm),
        )
        .map_err(at(&format!("flexional_limits[{i}]")))?;
        flexional_limits.insert(e.name.clone(), spec);
    }

    let mut extensional_limits = IndexMap::new();
    for (i, e) in source.extensional_limits.iter().enumerate() {
        let spec = ExtensionalLimitSpec::new(
            mm_to_m(e.feature_length_mm),
            mm_to_m(e.base_width_mm),
            mm_to_m(e.head_radius_mm),
            mm_to_m(e.height_mm),
            deg_to_rad(e.feature_angle_deg),
        )
        .map_err(at(&format!("extensional_limits[{i}]")))?;
        extensional_limits.insert(e.name.clone(), spec);
    }

    let mut limbs = IndexMap::new();
    for (i, entry) in source.limbs.iter().enumerate() {
        let path = format!("limbs[{i}]");
        let limb = resolve_limb(entry, &path, &flexures, &flexional_limits, &extensional_limits)?;
        limbs.insert(entry.name.clone(), limb);
    }

    let gait = source
        .gait
        .as_ref()
        .map(|g| resolve_gait(g, &limbs))
        .transpose()?;

    let process = source
        .process
        .as_ref()
        .map(|p| -> Result<PrintProcessConfig> {
            Ok(PrintProcessConfig {
                bed_temp: p.bed_temp_c,
                z_offset: p.z_offset_mm,
                material: resolver.material(&p.material, "process.material")?,
                pc_thickness: p.pc_thickness_mm,
                nozzle_temp: p.nozzle_temp_c,
            })
        })
        .transpose()?;

    let export = resolve_export(&source.export)?;

    Ok(DesignDoc {
        schema_version: source.schema_version,
        materials,
        flexures,
        flexional_limits,
        extensional_limits,
        limbs,
        gait,
        process,
        export,
        source,
    })
}

fn resolve_limb(
    entry: &LimbEntry,
    path: &str,
    flexures: &IndexMap<String, FlexureSpec>,
    flexional: &IndexMap<String, FlexionalLimitSpec>,
    extensional: &IndexMap<String, ExtensionalLimitSpec>,
) -> Result<LimbDesign> {
    let mut segments = Vec::with_capacity(entry.segments.len());
    let mut joints = Vec::new();
    for (i, seg) in entry.segments.iter().enumerate() {
        let sp = format!("{path}.segments[{i}]");
        match seg {
            SegmentEntry::Link { length_mm } => {
                segments.push(Segment::Link(mm_to_m(finite(&sp, *length_mm)?)));
            }
            SegmentEntry::Joint(j) => {
                let jp = format!("{sp}.joint");
                let joint_length = mm_to_m(finite(&jp, j.joint_length_mm)?);
                let stiffness = match (&j.flexure, j.torsional_stiffness_nm_per_rad) {
                    (Some(name), None) => {
                        let flex = flexures
                            .get(name)
                            .ok_or_else(|| dangling("flexure", name, format!("{jp}.flexure")))?;
                        torsional_stiffness(flex, joint_length).map_err(at(&jp))?
                    }
                    (None, Some(k)) => k,
                    _ => {
                        return Err(schema_err(
                            &jp,
                            "exactly one of `flexure` or `torsional_stiffness_nm_per_rad` is required",
                        ))
                    }
                };
                let (jam_angle, limit) =
                    match (&j.flexional_limit, &j.extensional_limit, j.jam_angle_deg) {
                        (Some(name), None, None) => {
                            let spec = flexional.get(name).ok_or_else(|| {
                                dangling("flexional limit", name, format!("{jp}.flexional_limit"))
                            })?;
                            let a = flexional_jam_angle(spec).map_err(at(&format!("{jp}.flexional_limit")))?;
                            (a, LimitSource::Flexional(name.clone()))
                        }
                        (None, Some(name), None) => {
                            let spec = extensional.get(name).ok_or_else(|| {
                                dangling("extensional limit", name, format!("{jp}.extensional_limit"))
                            })?;
                            let a = extensional_jam_angle(spec)
                                .map_err(at(&format!("{jp}.extensional_limit")))?;
                            (a, LimitSource::Extensional(name.clone()))
                        }
                        (None, None, Some(deg)) => (deg_to_rad(finite(&jp, deg)?), LimitSource::Explicit),
                        _ => {
                            return Err(schema_err(
                                &jp,
                                "exactly one of `flexional_limit`, `extensional_limit` or `jam_angle_deg` is required",
                            ))
                        }
                    };
                let sense = Sense::from_sign(j.sense).map_err(at(&format!("{jp}.sense")))?;
                let def = JointDef::new(
                    stiffness,
                    joint_length,
                    jam_angle,
                    sense,
                    mm_to_m(j.routing_offset_mm),
                )
                .map_err(at(&jp))?;
                segments.push(Segment::Joint(def));
                joints.push(JointInfo {
                    name: j
                        .name
                        .clone()
                        .unwrap_or_else(|| format!("joint_{}", joints.len() + 1)),
                    flexure: j.flexure.clone(),
                    limit,
                });
            }
        }
    }
    let pose = entry.base_pose.as_ref().map_or_else(BasePose::default, |p| BasePose {
        x: mm_to_m(p.x_mm),
        y: mm_to_m(p.y_mm),
        angle: deg_to_rad(p.angle_deg),
    });
    let spec = LimbSpec::new(segments, pose).map_err(at(path))?;
    let max_pull = entry.max_pull_mm.map(mm_to_m);
    if let Some(p) = max_pull {
        if !(p.is_finite() && p >= 0.0) {
            return Err(schema_err(format!("{path}.max_pull_mm"), "must be non-negative"));
        }
        if p > spec.capacity() * (1.0 + 1e-12) {
            return Err(schema_err(
                format!("{path}.max_pull_mm"),
                format!(
                    "exceeds the limb's jam capacity of {} mm",
                    crate::units::m_to_mm(spec.capacity())
                ),
            ));
        }
    }
    let steps = entry.steps.unwrap_or(DEFAULT_STEPS);
    if steps < 2 {
        return Err(schema_err(format!("{path}.steps"), "at least 2 steps are required"));
    }
    Ok(LimbDesign {
        spec,
        max_pull,
        steps,
        joints,
    })
}

fn resolve_gait(g: &GaitEntry, limbs: &IndexMap<String, LimbDesign>) -> Result<GaitSpec> {
    unique_names("gait.legs", g.legs.iter().map(|l| &l.name))?;
    if g.legs.len() != 4 {
        return Err(schema_err("gait.legs", format!("exactly four legs required, got {}", g.legs.len())));
    }
    let mut legs = Vec::with_capacity(4);
    for (i, leg) in g.legs.iter().enumerate() {
        if !limbs.contains_key(&leg.limb) {
            return Err(dangling("limb", &leg.limb, format!("gait.legs[{i}].limb")));
        }
        legs.push(GaitLeg {
            name: leg.name.clone(),
            limb: leg.limb.clone(),
            stroke: None,
        });
    }
    let pair = |names: &[String], field: &str| -> Result<[usize; 2]> {
        if names.len() != 2 {
            return Err(schema_err(format!("gait.{field}"), "a diagonal pair has exactly two legs"));
        }
        let mut out = [0; 2];
        for (k, n) in names.iter().enumerate() {
            out[k] = g
                .legs
                .iter()
                .position(|l| &l.name == n)
                .ok_or_else(|| dangling("leg", n, format!("gait.{field}[{k}]")))?;
        }
        Ok(out)
    };
    let a = pair(&g.pair_a, "pair_a")?;
    let b = pair(&g.pair_b, "pair_b")?;
    for (i, f) in g.frequencies_hz.iter().enumerate() {
        finite(&format!("gait.frequencies_hz[{i}]"), *f)?;
    }
    GaitSpec::new(legs, a, b, g.frequencies_hz.clone()).map_err(at("gait"))
}

fn resolve_export(e: &ExportEntry) -> Result<ExportOptions> {
    if e.facets < 8 {
        return Err(schema_err("export.facets", "at least 8 facets are required"));
    }
    if e.feature_count < 2 {
        return Err(schema_err("export.feature_count", "at least 2 features are required"));
    }
    if !(e.head_thickness_mm.is_finite() && e.head_thickness_mm > 0.0) {
        return Err(schema_err("export.head_thickness_mm", "must be positive"));
    }
    if !(e.stem_radius_ratio > 0.0 && e.stem_radius_ratio < 1.0) {
        return Err(schema_err("export.stem_radius_ratio", "must lie in (0, 1)"));
    }
    if !(e.feature_width_mm.is_finite() && e.feature_width_mm > 0.0) {
        return Err(schema_err("export.feature_width_mm", "must be positive"));
    }
    Ok(ExportOptions {
        feature_count: e.feature_count,
        features: FeatureOptions {
            facets: e.facets,
            head_thickness: mm_to_m(e.head_thickness_mm),
            stem_radius_ratio: e.stem_radius_ratio,
            feature_width: mm_to_m(e.feature_width_mm),
        },
    })
}
