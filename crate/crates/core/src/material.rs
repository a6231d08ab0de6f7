//! Materials, laminate stacks and ribbed flexure geometry.
//!
//! All quantities are SI: meters, pascals, degrees Celsius for temperatures.

use crate::error::{invalid, Result};

/// Relative slack used when deciding whether a rib reaches past the flexure end.
const END_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaterialKind {
    /// Extruded filament (PLA, ABS, ...).
    Filament,
    /// Stock base film the filament is printed onto (PC).
    BaseFilm,
}

impl MaterialKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MaterialKind::Filament => "filament",
            MaterialKind::BaseFilm => "base_film",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub name: String,
    /// Pa.
    pub youngs_modulus: f64,
    /// °C; present exactly for filaments.
    pub nozzle_temp: Option<f64>,
    pub kind: MaterialKind,
}

impl Material {
    pub fn new(
        name: impl Into<String>,
        youngs_modulus: f64,
        nozzle_temp: Option<f64>,
        kind: MaterialKind,
    ) -> Result<Self> {
        let name = name.into();
        if !(youngs_modulus.is_finite() && youngs_modulus > 0.0) {
            return Err(invalid(format!(
                "material {name}: Young's modulus must be positive, got {youngs_modulus}"
            )));
        }
        match (kind, nozzle_temp) {
            (MaterialKind::Filament, None) => {
                return Err(invalid(format!("filament {name} needs a nozzle temperature")))
            }
            (MaterialKind::BaseFilm, Some(_)) => {
                return Err(invalid(format!("base film {name} cannot carry a nozzle temperature")))
            }
            (_, Some(t)) if !t.is_finite() => {
                return Err(invalid(format!("material {name}: nozzle temperature not finite")))
            }
            _ => {}
        }
        Ok(Self {
            name,
            youngs_modulus,
            nozzle_temp,
            kind,
        })
    }

    pub fn filament(name: &str, youngs_modulus: f64, nozzle_temp: f64) -> Result<Self> {
        Self::new(name, youngs_modulus, Some(nozzle_temp), MaterialKind::Filament)
    }

    pub fn base_film(name: &str, youngs_modulus: f64) -> Result<Self> {
        Self::new(name, youngs_modulus, None, MaterialKind::BaseFilm)
    }

    /// Typical datasheet value for a known material name, in Pa.
    ///
    /// These are configuration defaults, not measured values; every stiffness
    /// output is traceable to whatever modulus the document finally carries.
    pub fn default_modulus(name: &str) -> Option<f64> {
        match name.to_ascii_uppercase().as_str() {
            "PLA" => Some(3.5e9),
            "ABS" => Some(2.2e9),
            "PC" => Some(2.4e9),
            _ => None,
        }
    }

    /// Nozzle temperature used for the filaments the process was demonstrated with.
    pub fn default_nozzle_temp(name: &str) -> Option<f64> {
        match name.to_ascii_uppercase().as_str() {
            "PLA" => Some(215.0),
            "ABS" => Some(240.0),
            _ => None,
        }
    }

    pub fn pla() -> Self {
        Self::filament("PLA", 3.5e9, 215.0).expect("valid default")
    }

    pub fn abs() -> Self {
        Self::filament("ABS", 2.2e9, 240.0).expect("valid default")
    }

    pub fn pc() -> Self {
        Self::base_film("PC", 2.4e9).expect("valid default")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub material: Material,
    /// m.
    pub thickness: f64,
}

impl Layer {
    pub fn new(material: Material, thickness: f64) -> Self {
        Self { material, thickness }
    }
}

/// Bottom-first list of bonded layers.
#[derive(Debug, Clone, PartialEq)]
pub struct LaminateStack {
    layers: Vec<Layer>,
}

impl LaminateStack {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(invalid("laminate stack needs at least one layer"));
        }
        for (i, layer) in layers.iter().enumerate() {
            if !(layer.thickness.is_finite() && layer.thickness > 0.0) {
                return Err(invalid(format!(
                    "layer {i}: thickness must be positive, got {}",
                    layer.thickness
                )));
            }
            if layer.material.kind == MaterialKind::BaseFilm && i != 0 {
                return Err(invalid(format!(
                    "layer {i}: base film {} must be the bottom layer",
                    layer.material.name
                )));
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }

    /// Thickness of the printed (filament) layers; the film is stock material.
    pub fn printed_thickness(&self) -> f64 {
        self.layers
            .iter()
            .filter(|l| l.material.kind == MaterialKind::Filament)
            .map(|l| l.thickness)
            .sum()
    }

    pub fn film_thickness(&self) -> f64 {
        self.layers
            .iter()
            .filter(|l| l.material.kind == MaterialKind::BaseFilm)
            .map(|l| l.thickness)
            .sum()
    }

    /// Topmost filament layer's material, if any.
    pub fn top_filament(&self) -> Option<&Material> {
        self.layers
            .iter()
            .rev()
            .map(|l| &l.material)
            .find(|m| m.kind == MaterialKind::Filament)
    }

    /// A copy of this stack with one more layer on top.
    pub fn with_top_layer(&self, layer: Layer) -> Result<Self> {
        let mut layers = self.layers.clone();
        layers.push(layer);
        Self::new(layers)
    }
}

/// Linear pattern of raised rib segments across a flexure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RibPattern {
    /// m.
    pub period: f64,
    /// Raised width over period, in [0, 1].
    pub width_ratio: f64,
    /// m.
    pub feature_height: f64,
}

impl RibPattern {
    pub fn new(period: f64, width_ratio: f64, feature_height: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(invalid(format!("rib period must be positive, got {period}")));
        }
        if !(0.0..=1.0).contains(&width_ratio) {
            return Err(invalid(format!("width ratio must lie in [0, 1], got {width_ratio}")));
        }
        if !(feature_height.is_finite() && feature_height >= 0.0) {
            return Err(invalid(format!(
                "feature height must be non-negative, got {feature_height}"
            )));
        }
        Ok(Self {
            period,
            width_ratio,
            feature_height,
        })
    }

    pub fn rib_width(&self) -> f64 {
        self.width_ratio * self.period
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlexureSpec {
    /// m, along the bending direction.
    pub length: f64,
    /// m, across the flexure.
    pub width: f64,
    pub base: LaminateStack,
    pub ribs: Option<RibPattern>,
    pub rib_material: Material,
}

impl FlexureSpec {
    pub fn new(
        length: f64,
        width: f64,
        base: LaminateStack,
        ribs: Option<RibPattern>,
        rib_material: Material,
    ) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(invalid(format!("flexure length must be positive, got {length}")));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(invalid(format!("flexure width must be positive, got {width}")));
        }
        if let Some(r) = &ribs {
            if r.period > length {
                return Err(invalid(format!(
                    "rib period {} exceeds flexure length {length}",
                    r.period
                )));
            }
        }
        if rib_material.kind != MaterialKind::Filament {
            return Err(invalid(format!(
                "rib material {} must be a filament",
                rib_material.name
            )));
        }
        Ok(Self {
            length,
            width,
            base,
            ribs,
            rib_material,
        })
    }

    /// True when the ribs change the cross-section anywhere.
    pub fn has_effective_ribs(&self) -> bool {
        matches!(self.ribs, Some(r) if r.width_ratio > 0.0 && r.feature_height > 0.0)
    }

    pub fn width_ratio(&self) -> f64 {
        self.ribs.map_or(0.0, |r| r.width_ratio)
    }

    pub fn feature_height(&self) -> f64 {
        self.ribs.map_or(0.0, |r| r.feature_height)
    }

    /// Stack of the raised sections: base plus a rib layer of `feature_height`.
    /// Equal to the base for zero-height ribs.
    pub fn ribbed_stack(&self) -> LaminateStack {
        match self.ribs {
            Some(r) if r.feature_height > 0.0 => self
                .base
                .with_top_layer(Layer::new(self.rib_material.clone(), r.feature_height))
                .expect("filament layer on a valid stack"),
            _ => self.base.clone(),
        }
    }

    /// Rib spans along the length, one centered in each period, without
    /// clipping at the flexure end.
    pub fn rib_spans_unclipped(&self) -> Vec<(f64, f64)> {
        let Some(r) = self.ribs else {
            return Vec::new();
        };
        if r.width_ratio <= 0.0 || r.feature_height <= 0.0 {
            return Vec::new();
        }
        let half = 0.5 * r.rib_width();
        let periods = (self.length / r.period).ceil() as usize;
        let mut spans = Vec::with_capacity(periods);
        for k in 0..periods {
            let center = (k as f64 + 0.5) * r.period;
            let start = (center - half).max(0.0);
            if start >= self.length * (1.0 - END_SLACK) {
                break;
            }
            let mut end = center + half;
            if (end - self.length).abs() <= END_SLACK * self.length {
                end = self.length;
            }
            spans.push((start, end));
        }
        spans
    }

    /// Rib spans clipped to `[0, length]`.
    pub fn rib_spans(&self) -> Vec<(f64, f64)> {
        self.rib_spans_unclipped()
            .into_iter()
            .map(|(a, b)| (a, b.min(self.length)))
            .collect()
    }

    pub fn with_width_ratio(&self, width_ratio: f64) -> Result<Self> {
        let r = self
            .ribs
            .ok_or_else(|| invalid("flexure has no rib pattern"))?;
        let mut out = self.clone();
        out.ribs = Some(RibPattern::new(r.period, width_ratio, r.feature_height)?);
        Ok(out)
    }

    pub fn with_feature_height(&self, feature_height: f64) -> Result<Self> {
        let r = self
            .ribs
            .ok_or_else(|| invalid("flexure has no rib pattern"))?;
        let mut out = self.clone();
        out.ribs = Some(RibPattern::new(r.period, r.width_ratio, feature_height)?);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(w: f64) -> FlexureSpec {
        let base = LaminateStack::new(vec![
            Layer::new(Material::pc(), 0.1e-3),
            Layer::new(Material::pla(), 0.2e-3),
        ])
        .unwrap();
        FlexureSpec::new(
            30e-3,
            44e-3,
            base,
            Some(RibPattern::new(5e-3, w, 1e-3).unwrap()),
            Material::pla(),
        )
        .unwrap()
    }

    #[test]
    fn filament_requires_nozzle_temp() {
        assert!(Material::new("PLA", 3.5e9, None, MaterialKind::Filament).is_err());
        assert!(Material::new("PC", 2.4e9, Some(200.0), MaterialKind::BaseFilm).is_err());
        assert!(Material::new("X", 0.0, None, MaterialKind::BaseFilm).is_err());
    }

    #[test]
    fn film_must_be_bottom_layer() {
        let err = LaminateStack::new(vec![
            Layer::new(Material::pla(), 0.2e-3),
            Layer::new(Material::pc(), 0.1e-3),
        ]);
        assert!(err.is_err());
        assert!(LaminateStack::new(vec![]).is_err());
        assert!(LaminateStack::new(vec![Layer::new(Material::pla(), -1.0)]).is_err());
    }

    #[test]
    fn ribs_are_centered_per_period() {
        let spans = sample(0.5).rib_spans();
        assert_eq!(spans.len(), 6);
        assert!((spans[0].0 - 1.25e-3).abs() < 1e-15);
        assert!((spans[0].1 - 3.75e-3).abs() < 1e-15);
        assert!(spans.iter().all(|&(a, b)| b <= 30e-3 && a < b));
    }

    #[test]
    fn full_width_ratio_reaches_both_ends() {
        let spans = sample(1.0).rib_spans_unclipped();
        assert_eq!(spans.first().unwrap().0, 0.0);
        assert_eq!(spans.last().unwrap().1, 30e-3);
    }

    #[test]
    fn zero_ratio_has_no_spans() {
        assert!(sample(0.0).rib_spans().is_empty());
    }

    #[test]
    fn period_longer_than_flexure_rejected() {
        let f = sample(0.5);
        let r = RibPattern::new(40e-3, 0.5, 1e-3).unwrap();
        assert!(FlexureSpec::new(f.length, f.width, f.base.clone(), Some(r), Material::pla()).is_err());
    }
}
