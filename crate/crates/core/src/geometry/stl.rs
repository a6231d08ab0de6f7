//! Binary STL: 80-byte header, little-endian u32 count, 50 bytes per facet.

use std::path::Path;

use super::mesh::TriangleMesh;
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

pub const HEADER_LEN: usize = 80;
pub const FACET_LEN: usize = 50;

/// Tool name and version, space-padded to the header length.
pub fn header() -> [u8; HEADER_LEN] {
    let mut h = [b' '; HEADER_LEN];
    let text = format!("flexokit {} binary STL, units mm", env!("CARGO_PKG_VERSION"));
    let n = text.len().min(HEADER_LEN);
    h[..n].copy_from_slice(&text.as_bytes()[..n]);
    h
}

pub fn encoded_len(triangles: usize) -> usize {
    HEADER_LEN + 4 + FACET_LEN * triangles
}

/// Serialize without validation; see [`export_stl`] for the checked path.
pub fn encode(mesh: &TriangleMesh) -> Result<Vec<u8>> {
    let count = u32::try_from(mesh.len())
        .map_err(|_| Error::InvalidMesh(format!("{} triangles exceed the STL count field", mesh.len())))?;
    let mut out = Vec::with_capacity(encoded_len(mesh.len()));
    out.extend_from_slice(&header());
    out.extend_from_slice(&count.to_le_bytes());
    for t in &mesh.triangles {
        for v in std::iter::once(&t.normal).chain(t.vertices.iter()) {
            for c in v {
                out.extend_from_slice(&(*c as f32).to_le_bytes());
            }
        }
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    Ok(out)
}

/// Validate, encode and atomically write. Returns the byte count.
pub fn export_stl(mesh: &TriangleMesh, destination: &Path) -> Result<u64> {
    mesh.validate()?;
    let bytes = encode(mesh)?;
    write_atomic(destination, &bytes)?;
    Ok(bytes.len() as u64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StlFacet {
    pub normal: [f32; 3],
    pub vertices: [[f32; 3]; 3],
    pub attribute: u16,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StlFile {
    pub header: [u8; HEADER_LEN],
    pub facets: Vec<StlFacet>,
}

fn f32_at(bytes: &[u8], at: usize) -> f32 {
    f32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"))
}

/// Strict reader: the length must match the declared count exactly.
pub fn decode(bytes: &[u8]) -> Result<StlFile> {
    if bytes.len() < HEADER_LEN + 4 {
        return Err(Error::InvalidMesh(format!(
            "STL is {} bytes, shorter than the {}-byte preamble",
            bytes.len(),
            HEADER_LEN + 4
        )));
    }
    let header: [u8; HEADER_LEN] = bytes[..HEADER_LEN].try_into().expect("80 bytes");
    let count = u32::from_le_bytes(bytes[HEADER_LEN..HEADER_LEN + 4].try_into().expect("4 bytes")) as u64;
    let expected = (HEADER_LEN as u64 + 4) + FACET_LEN as u64 * count;
    if bytes.len() as u64 != expected {
        return Err(Error::InvalidMesh(format!(
            "STL declares {count} facets ({expected} bytes) but has {} bytes",
            bytes.len()
        )));
    }
    let facets = bytes[HEADER_LEN + 4..]
        .chunks_exact(FACET_LEN)
        .map(|c| {
            let v = |k: usize| [f32_at(c, 12 * k), f32_at(c, 12 * k + 4), f32_at(c, 12 * k + 8)];
            StlFacet {
                normal: v(0),
                vertices: [v(1), v(2), v(3)],
                attribute: u16::from_le_bytes([c[48], c[49]]),
            }
        })
        .collect();
    Ok(StlFile { header, facets })
}
