use std::collections::HashMap;

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

/// Minimum triangle area, mm².
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    /// Unit outward normal.
    pub normal: Vec3,
    /// Counter-clockwise seen from outside, mm.
    pub vertices: [Vec3; 3],
}

impl Triangle {
    pub fn area(&self) -> f64 {
        let [a, b, c] = self.vertices;
        0.5 * norm(cross(sub(b, a), sub(c, a)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: Vec3,
    pub max: Vec3,
}

/// Triangle soup in millimeters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TriangleMesh {
    pub triangles: Vec<Triangle>,
}

impl TriangleMesh {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Append `a, b, c`, flipping the winding if needed so the normal points
    /// along `outward`.
    pub fn push_oriented(&mut self, a: Vec3, b: Vec3, c: Vec3, outward: Vec3) {
        let n = cross(sub(b, a), sub(c, a));
        let (b, c, n) = if dot(n, outward) < 0.0 {
            (c, b, [-n[0], -n[1], -n[2]])
        } else {
            (b, c, n)
        };
        let len = norm(n);
        let normal = if len > 0.0 {
            [n[0] / len, n[1] / len, n[2] / len]
        } else {
            [0.0; 3]
        };
        self.triangles.push(Triangle {
            normal,
            vertices: [a, b, c],
        });
    }

    /// Two triangles for the planar quad `a b c d` (in boundary order).
    pub fn push_quad(&mut self, a: Vec3, b: Vec3, c: Vec3, d: Vec3, outward: Vec3) {
        self.push_oriented(a, b, c, outward);
        self.push_oriented(a, c, d, outward);
    }

    pub fn append(&mut self, other: TriangleMesh) {
        self.triangles.extend(other.triangles);
    }

    /// Volume by the divergence theorem, mm³.
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.vertices;
                dot(a, cross(b, c))
            })
            .sum::<f64>()
            / 6.0
    }

    pub fn bounding_box(&self) -> Option<BoundingBox> {
        let mut it = self.triangles.iter().flat_map(|t| t.vertices.iter());
        let first = *it.next()?;
        let mut bb = BoundingBox {
            min: first,
            max: first,
        };
        for v in it {
            for ((lo, hi), &x) in bb.min.iter_mut().zip(bb.max.iter_mut()).zip(v) {
                *lo = lo.min(x);
                *hi = hi.max(x);
            }
        }
        Some(bb)
    }

    /// Every undirected edge is used by exactly two triangles, once in each
    /// direction.
    pub fn check_watertight(&self) -> Result<()> {
        let mut directed: HashMap<(VKey, VKey), u32> = HashMap::new();
        for t in &self.triangles {
            for i in 0..3 {
                let a = key(t.vertices[i]);
                let b = key(t.vertices[(i + 1) % 3]);
                *directed.entry((a, b)).or_default() += 1;
            }
        }
        for (&(a, b), &count) in &directed {
            if count != 1 {
                return Err(Error::InvalidMesh(format!(
                    "directed edge used {count} times (non-manifold or inconsistent winding)"
                )));
            }
            if directed.get(&(b, a)) != Some(&1) {
                return Err(Error::InvalidMesh("open edge without a matching neighbor".into()));
            }
        }
        Ok(())
    }

    /// Area, watertightness and outward-orientation checks.
    pub fn validate(&self) -> Result<()> {
        if let Some((i, t)) = self
            .triangles
            .iter()
            .enumerate()
            .find(|(_, t)| !(t.area() > MIN_TRIANGLE_AREA))
        {
            return Err(Error::InvalidMesh(format!(
                "triangle {i} is degenerate (area {} mm²)",
                t.area()
            )));
        }
        if self.is_empty() {
            return Ok(());
        }
        self.check_watertight()?;
        let v = self.signed_volume();
        if !(v > 0.0) {
            return Err(Error::InvalidMesh(format!(
                "signed volume {v} mm³ is not positive (inward orientation)"
            )));
        }
        Ok(())
    }
}

type VKey = [u64; 3];

fn key(v: Vec3) -> VKey {
    // +0.0 folds negative zero onto positive zero.
    [(v[0] + 0.0).to_bits(), (v[1] + 0.0).to_bits(), (v[2] + 0.0).to_bits()]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetra() -> TriangleMesh {
        let o = [0.0, 0.0, 0.0];
        let x = [1.0, 0.0, 0.0];
        let y = [0.0, 1.0, 0.0];
        let z = [0.0, 0.0, 1.0];
        let c = [0.25, 0.25, 0.25];
        let mut m = TriangleMesh::new();
        for (a, b, d) in [(o, y, x), (o, x, z), (o, z, y), (x, y, z)] {
            let centroid = [(a[0] + b[0] + d[0]) / 3.0, (a[1] + b[1] + d[1]) / 3.0, (a[2] + b[2] + d[2]) / 3.0];
            m.push_oriented(a, b, d, sub(centroid, c));
        }
        m
    }

    #[test]
    fn tetra_is_valid() {
        let m = tetra();
        m.validate().unwrap();
        assert!((m.signed_volume() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn open_mesh_rejected() {
        let mut m = tetra();
        m.triangles.pop();
        assert!(m.check_watertight().is_err());
    }

    #[test]
    fn inverted_mesh_rejected() {
        let mut m = tetra();
        for t in &mut m.triangles {
            t.vertices.swap(1, 2);
        }
        assert!(matches!(m.validate(), Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn degenerate_rejected() {
        let mut m = tetra();
        m.triangles[0].vertices[2] = m.triangles[0].vertices[1];
        assert!(m.validate().is_err());
    }
}
