//! Primitive solids and the recipes that place them for each printable part.
//!
//! Primitives are meshed independently and never overlap, so the mesh volume
//! of a recipe equals the sum of the analytic primitive volumes. Circular
//! features are regular polygons; the analytic volumes use the faceted areas.

use std::f64::consts::PI;

use super::mesh::{TriangleMesh, Vec3};
use super::FeatureOptions;
use crate::error::{Error, Result};
use crate::joint_limits::{extensional_jam_angle, ExtensionalLimitSpec, FlexionalLimitSpec};
use crate::material::FlexureSpec;
use crate::units::m_to_mm;

/// Share of the standoff strip width left empty between the two lanes.
pub const LANE_GAP_FRACTION: f64 = 0.125;
/// Relative slack when deciding that a rib crosses the flexure end.
const END_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    /// Side profile of vertical strips `(x0, x1, top)` on `z = 0`, extruded
    /// over `y0..y1`. Consecutive strips share their boundary `x`.
    StripProfile { strips: Vec<(f64, f64, f64)>, y0: f64, y1: f64 },
    /// Faceted stem topped by a coaxial faceted disk head, standing on `z = 0`.
    Pillar {
        center: [f64; 2],
        stem_radius: f64,
        stem_height: f64,
        head_radius: f64,
        head_thickness: f64,
        facets: usize,
    },
    /// Convex polygon in the x-z plane extruded over `y0..y1`.
    ConvexPrism { polygon: Vec<[f64; 2]>, y0: f64, y1: f64 },
}

/// Area of a regular `n`-gon with circumradius `r`.
pub fn faceted_area(r: f64, n: usize) -> f64 {
    0.5 * n as f64 * r * r * (2.0 * PI / n as f64).sin()
}

fn shoelace(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    0.5 * (0..n)
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
}

impl Primitive {
    pub fn analytic_volume(&self) -> f64 {
        match self {
            Primitive::StripProfile { strips, y0, y1 } => {
                strips.iter().map(|&(a, b, top)| (b - a) * top).sum::<f64>() * (y1 - y0)
            }
            Primitive::Pillar {
                stem_radius,
                stem_height,
                head_radius,
                head_thickness,
                facets,
                ..
            } => {
                faceted_area(*stem_radius, *facets) * stem_height
                    + faceted_area(*head_radius, *facets) * head_thickness
            }
            Primitive::ConvexPrism { polygon, y0, y1 } => shoelace(polygon).abs() * (y1 - y0),
        }
    }

    pub fn mesh(&self) -> TriangleMesh {
        let mut m = TriangleMesh::new();
        match self {
            Primitive::StripProfile { strips, y0, y1 } => mesh_strips(&mut m, strips, *y0, *y1),
            Primitive::Pillar {
                center,
                stem_radius,
                stem_height,
                head_radius,
                head_thickness,
                facets,
            } => mesh_pillar(
                &mut m,
                *center,
                *stem_radius,
                *stem_height,
                *head_radius,
                *head_thickness,
                *facets,
            ),
            Primitive::ConvexPrism { polygon, y0, y1 } => mesh_convex_prism(&mut m, polygon, *y0, *y1),
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolidRecipe {
    pub primitives: Vec<Primitive>,
}

impl SolidRecipe {
    pub fn analytic_volume(&self) -> f64 {
        self.primitives.iter().map(Primitive::analytic_volume).sum()
    }

    /// Mesh every primitive in declaration order and validate the result.
    pub fn mesh(&self) -> Result<TriangleMesh> {
        let mut out = TriangleMesh::new();
        for p in &self.primitives {
            out.append(p.mesh());
        }
        out.validate()?;
        Ok(out)
    }
}

fn xz(x: f64, y: f64, z: f64) -> Vec3 {
    [x, y, z]
}

/// Triangulate one face of a strip: left chain at `x0`, right chain at `x1`,
/// both sorted by `z`. Zips the chains so no triangle has collinear corners.
fn zip_chains(m: &mut TriangleMesh, x0: f64, left: &[f64], x1: f64, right: &[f64], y: f64, outward: Vec3) {
    let (mut i, mut j) = (0, 0);
    while i + 1 < left.len() || j + 1 < right.len() {
        let advance_left = if i + 1 >= left.len() {
            false
        } else if j + 1 >= right.len() {
            true
        } else {
            left[i + 1] <= right[j + 1]
        };
        let a = xz(x0, y, left[i]);
        let b = xz(x1, y, right[j]);
        let c = if advance_left {
            i += 1;
            xz(x0, y, left[i])
        } else {
            j += 1;
            xz(x1, y, right[j])
        };
        m.push_oriented(a, b, c, outward);
    }
}

fn mesh_strips(m: &mut TriangleMesh, strips: &[(f64, f64, f64)], y0: f64, y1: f64) {
    let n = strips.len();
    for (k, &(x0, x1, top)) in strips.iter().enumerate() {
        let prev = (k > 0).then(|| strips[k - 1].2);
        let next = (k + 1 < n).then(|| strips[k + 1].2);
        let chain = |neighbor: Option<f64>| {
            let mut c = vec![0.0];
            if let Some(h) = neighbor {
                if h > 0.0 && h < top {
                    c.push(h);
                }
            }
            c.push(top);
            c
        };
        let left = chain(prev);
        let right = chain(next);
        zip_chains(m, x0, &left, x1, &right, y0, [0.0, -1.0, 0.0]);
        zip_chains(m, x0, &left, x1, &right, y1, [0.0, 1.0, 0.0]);

        // Bottom and top walls of this strip.
        m.push_quad(xz(x0, y0, 0.0), xz(x1, y0, 0.0), xz(x1, y1, 0.0), xz(x0, y1, 0.0), [0.0, 0.0, -1.0]);
        m.push_quad(xz(x0, y0, top), xz(x1, y0, top), xz(x1, y1, top), xz(x0, y1, top), [0.0, 0.0, 1.0]);

        // Left wall: full height at the profile start, otherwise the step up
        // from a lower neighbor.
        let (lo, dir) = match prev {
            None => (0.0, -1.0),
            Some(h) => (h, -1.0),
        };
        if lo < top {
            m.push_quad(xz(x0, y0, lo), xz(x0, y0, top), xz(x0, y1, top), xz(x0, y1, lo), [dir, 0.0, 0.0]);
        }
        let lo = next.unwrap_or(0.0);
        if lo < top {
            m.push_quad(xz(x1, y0, lo), xz(x1, y0, top), xz(x1, y1, top), xz(x1, y1, lo), [1.0, 0.0, 0.0]);
        }
    }
}

fn ring(center: [f64; 2], radius: f64, z: f64, cos_sin: &[(f64, f64)]) -> Vec<Vec3> {
    cos_sin
        .iter()
        .map(|&(c, s)| [center[0] + radius * c, center[1] + radius * s, z])
        .collect()
}

fn mesh_pillar(
    m: &mut TriangleMesh,
    center: [f64; 2],
    stem_radius: f64,
    stem_height: f64,
    head_radius: f64,
    head_thickness: f64,
    facets: usize,
) {
    let cos_sin: Vec<(f64, f64)> = (0..facets)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / facets as f64;
            (a.cos(), a.sin())
        })
        .collect();
    let radial = |k: usize| {
        let a = 2.0 * PI * (k as f64 + 0.5) / facets as f64;
        [a.cos(), a.sin(), 0.0]
    };
    let top_z = stem_height + head_thickness;
    let (bottom_r, bottom_ring) = if stem_height > 0.0 {
        (stem_radius, ring(center, stem_radius, 0.0, &cos_sin))
    } else {
        (head_radius, ring(center, head_radius, 0.0, &cos_sin))
    };
    let _ = bottom_r;
    let bottom_center = [center[0], center[1], 0.0];
    let top_center = [center[0], center[1], top_z];
    let head_low = ring(center, head_radius, stem_height, &cos_sin);
    let head_top = ring(center, head_radius, top_z, &cos_sin);

    for k in 0..facets {
        let k1 = (k + 1) % facets;
        m.push_oriented(bottom_center, bottom_ring[k], bottom_ring[k1], [0.0, 0.0, -1.0]);
        m.push_oriented(top_center, head_top[k], head_top[k1], [0.0, 0.0, 1.0]);
        m.push_quad(head_low[k], head_low[k1], head_top[k1], head_top[k], radial(k));
    }
    if stem_height > 0.0 {
        let stem_top = ring(center, stem_radius, stem_height, &cos_sin);
        for k in 0..facets {
            let k1 = (k + 1) % facets;
            m.push_quad(bottom_ring[k], bottom_ring[k1], stem_top[k1], stem_top[k], radial(k));
            // Underside of the head.
            m.push_quad(stem_top[k], stem_top[k1], head_low[k1], head_low[k], [0.0, 0.0, -1.0]);
        }
    }
}

fn mesh_convex_prism(m: &mut TriangleMesh, polygon: &[[f64; 2]], y0: f64, y1: f64) {
    let n = polygon.len();
    let cx = polygon.iter().map(|p| p[0]).sum::<f64>() / n as f64;
    let cz = polygon.iter().map(|p| p[1]).sum::<f64>() / n as f64;
    let p = |i: usize, y: f64| xz(polygon[i][0], y, polygon[i][1]);
    for i in 1..n - 1 {
        m.push_oriented(p(0, y0), p(i, y0), p(i + 1, y0), [0.0, -1.0, 0.0]);
        m.push_oriented(p(0, y1), p(i, y1), p(i + 1, y1), [0.0, 1.0, 0.0]);
    }
    for i in 0..n {
        let j = (i + 1) % n;
        let mx = 0.5 * (polygon[i][0] + polygon[j][0]) - cx;
        let mz = 0.5 * (polygon[i][1] + polygon[j][1]) - cz;
        m.push_quad(p(i, y0), p(j, y0), p(j, y1), p(i, y1), [mx, 0.0, mz]);
    }
}

/// Printed plate plus ribs for a flexure, mm. The base film is not included.
pub fn flexure_recipe(flex: &FlexureSpec) -> Result<SolidRecipe> {
    let plate = m_to_mm(flex.base.printed_thickness());
    if !(plate > 0.0) {
        return Err(Error::Geometry(
            "flexure has no printed base layer to mesh".into(),
        ));
    }
    let length = m_to_mm(flex.length);
    let width = m_to_mm(flex.width);
    let spans = flex.rib_spans_unclipped();
    if let Some(&(_, end)) = spans.last() {
        if end > flex.length * (1.0 + END_SLACK) {
            return Err(Error::Geometry(format!(
                "rib ends at {} mm, past the flexure length {length} mm",
                m_to_mm(end)
            )));
        }
    }
    let rib_top = plate + m_to_mm(flex.feature_height());
    let mut strips = Vec::with_capacity(2 * spans.len() + 1);
    let mut cursor = 0.0;
    for (a, b) in spans {
        let (a, b) = (m_to_mm(a), m_to_mm(b).min(length));
        if a > cursor {
            strips.push((cursor, a, plate));
        }
        if b > a {
            strips.push((a.max(cursor), b, rib_top));
        }
        cursor = b;
    }
    if cursor < length {
        strips.push((cursor, length, plate));
    }
    Ok(SolidRecipe {
        primitives: vec![Primitive::StripProfile {
            strips,
            y0: 0.0,
            y1: width,
        }],
    })
}

pub fn build_flexure_solid(flex: &FlexureSpec) -> Result<TriangleMesh> {
    flexure_recipe(flex)?.mesh()
}

fn check_feature_options(count: usize, opts: &FeatureOptions) -> Result<()> {
    if count < 2 {
        return Err(Error::Geometry(format!("at least 2 features are required, got {count}")));
    }
    if opts.facets < 8 {
        return Err(Error::Geometry(format!("at least 8 facets are required, got {}", opts.facets)));
    }
    Ok(())
}

/// Row of mushroom pillars spaced `D` apart along x, mm.
pub fn flexional_recipe(spec: &FlexionalLimitSpec, count: usize, opts: &FeatureOptions) -> Result<SolidRecipe> {
    check_feature_options(count, opts)?;
    if spec.spacing <= 2.0 * spec.head_radius {
        return Err(Error::Geometry(format!(
            "adjacent heads intersect at rest: spacing {} mm <= head diameter {} mm",
            m_to_mm(spec.spacing),
            m_to_mm(2.0 * spec.head_radius)
        )));
    }
    let spacing = m_to_mm(spec.spacing);
    let head_radius = m_to_mm(spec.head_radius);
    let primitives = (0..count)
        .map(|k| Primitive::Pillar {
            center: [k as f64 * spacing, 0.0],
            stem_radius: opts.stem_radius_ratio * head_radius,
            stem_height: m_to_mm(spec.height),
            head_radius,
            head_thickness: m_to_mm(opts.head_thickness),
            facets: opts.facets,
        })
        .collect();
    Ok(SolidRecipe { primitives })
}

pub fn build_flexional_features(
    spec: &FlexionalLimitSpec,
    count: usize,
    opts: &FeatureOptions,
) -> Result<TriangleMesh> {
    flexional_recipe(spec, count, opts)?.mesh()
}

/// Placement of one extensional standoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandoffPlacement {
    /// Shared root x of the mirrored pair, mm.
    pub root_x: f64,
    /// +1 leans toward +x, -1 toward -x.
    pub direction: f64,
    /// Center of the top face, mm.
    pub top_center_x: f64,
}

/// Parallelogram profile of a standoff whose inner root corner is `root_x`.
fn standoff_polygon(root_x: f64, direction: f64, spec: &ExtensionalLimitSpec) -> (Vec<[f64; 2]>, f64) {
    let b = m_to_mm(spec.base_width);
    let reach = m_to_mm(spec.length) * spec.gamma.cos();
    let height = m_to_mm(spec.length) * spec.gamma.sin();
    let s = direction;
    let mut poly = vec![
        [root_x, 0.0],
        [root_x + s * b, 0.0],
        [root_x + s * reach, height],
        [root_x + s * (reach - b), height],
    ];
    if s < 0.0 {
        poly.reverse();
    }
    (poly, root_x + s * (reach - 0.5 * b))
}

/// Mirrored standoff pairs in two interleaved width lanes, mm.
pub fn extensional_recipe(
    spec: &ExtensionalLimitSpec,
    count: usize,
    opts: &FeatureOptions,
) -> Result<(SolidRecipe, Vec<StandoffPlacement>)> {
    check_feature_options(count, opts)?;
    extensional_jam_angle(spec)?;
    let b = m_to_mm(spec.base_width);
    let reach = m_to_mm(spec.length) * spec.gamma.cos();
    let pitch = 2.0 * b.max(reach) + b;
    let width = m_to_mm(opts.feature_width);
    let lane = 0.5 * width * (1.0 - LANE_GAP_FRACTION);
    let mut primitives = Vec::with_capacity(count);
    let mut placements = Vec::with_capacity(count);
    for k in 0..count {
        let root_x = (k / 2) as f64 * pitch;
        let direction = if k % 2 == 0 { 1.0 } else { -1.0 };
        let (polygon, top_center_x) = standoff_polygon(root_x, direction, spec);
        let (y0, y1) = if k % 2 == 0 { (0.0, lane) } else { (width - lane, width) };
        primitives.push(Primitive::ConvexPrism { polygon, y0, y1 });
        placements.push(StandoffPlacement {
            root_x,
            direction,
            top_center_x,
        });
    }
    Ok((SolidRecipe { primitives }, placements))
}

pub fn build_extensional_features(
    spec: &ExtensionalLimitSpec,
    count: usize,
    opts: &FeatureOptions,
) -> Result<TriangleMesh> {
    extensional_recipe(spec, count, opts)?.0.mesh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{LaminateStack, Layer, Material, RibPattern};

    const MM: f64 = 1e-3;

    fn plate(length: f64, ribs: Option<RibPattern>) -> FlexureSpec {
        let base = LaminateStack::new(vec![
            Layer::new(Material::pc(), 0.1 * MM),
            Layer::new(Material::pla(), 0.3 * MM),
        ])
        .unwrap();
        FlexureSpec::new(length * MM, 44.0 * MM, base, ribs, Material::pla()).unwrap()
    }

    #[test]
    fn bare_plate_is_a_twelve_triangle_box() {
        let m = build_flexure_solid(&plate(12.0, None)).unwrap();
        assert_eq!(m.len(), 12);
        assert!((m.signed_volume() - 158.4).abs() < 1e-9);
    }

    #[test]
    fn three_ribs_add_their_volume() {
        let ribs = RibPattern::new(4.0 * MM, 0.25, 1.0 * MM).unwrap();
        let f = plate(12.0, Some(ribs));
        let recipe = flexure_recipe(&f).unwrap();
        let m = recipe.mesh().unwrap();
        assert!((m.signed_volume() - 290.4).abs() < 1e-9);
        assert!((recipe.analytic_volume() - 290.4).abs() < 1e-9);
    }

    #[test]
    fn zero_ratio_matches_bare_plate() {
        let ribs = RibPattern::new(4.0 * MM, 0.0, 1.0 * MM).unwrap();
        assert_eq!(
            build_flexure_solid(&plate(12.0, Some(ribs))).unwrap(),
            build_flexure_solid(&plate(12.0, None)).unwrap()
        );
    }

    #[test]
    fn full_ratio_is_one_thick_block() {
        let ribs = RibPattern::new(4.0 * MM, 1.0, 1.0 * MM).unwrap();
        let m = build_flexure_solid(&plate(12.0, Some(ribs))).unwrap();
        assert!((m.signed_volume() - 12.0 * 44.0 * 1.3).abs() < 1e-9);
    }

    #[test]
    fn rib_past_end_is_an_error() {
        let ribs = RibPattern::new(5.0 * MM, 0.5, 1.0 * MM).unwrap();
        assert!(matches!(build_flexure_solid(&plate(12.0, Some(ribs))), Err(Error::Geometry(_))));
    }

    #[test]
    fn overlapping_heads_rejected() {
        let spec = FlexionalLimitSpec::new(3.9 * MM, 2.0 * MM, 4.0 * MM).unwrap();
        assert!(matches!(
            build_flexional_features(&spec, 2, &FeatureOptions::default()),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn zero_stem_pillar_is_closed() {
        let spec = FlexionalLimitSpec::new(6.0 * MM, 2.0 * MM, 0.0).unwrap();
        let m = build_flexional_features(&spec, 2, &FeatureOptions::default()).unwrap();
        let expect = 2.0 * faceted_area(2.0, 16) * 1.0;
        assert!(((m.signed_volume() - expect) / expect).abs() < 1e-12);
    }

    #[test]
    fn contact_at_rest_propagates() {
        let spec = ExtensionalLimitSpec::new(6.0 * MM, 5.4 * MM, 1.8 * MM, 2.0 * MM, 45f64.to_radians()).unwrap();
        assert!(matches!(
            build_extensional_features(&spec, 2, &FeatureOptions::default()),
            Err(Error::ContactAtRest { .. })
        ));
    }
}
