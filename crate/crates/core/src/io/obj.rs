//! Wavefront OBJ meshes whose group (`g`) or object (`o`) names carry the
//! semantic class, e.g. `g WallSurface_02`.

use std::io::Write;

use log::warn;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::{ClassedMesh, Triangle};
use crate::scalar::Scalar;
use crate::taxonomy::SemanticClass;

/// Result of loading a mesh, with what was cleaned up on the way.
#[derive(Clone, Debug)]
pub struct MeshLoad<T = f64> {
    pub mesh: ClassedMesh<T>,
    pub dropped_degenerate: usize,
    /// Group names that did not resolve to a class and were mapped to Noise.
    pub unrecognized_groups: Vec<String>,
}

/// Class named by an OBJ group: the canonical class name, optionally followed
/// by `_` or `.` and a free suffix.
pub fn class_of_group(name: &str) -> Option<SemanticClass> {
    let stem = name.split(['_', '.']).next().unwrap_or(name);
    SemanticClass::from_name(stem)
}

pub(crate) fn parse<T: Scalar>(text: &str, source: &str) -> Result<MeshLoad<T>> {
    let mut vertices: Vec<Vec3<T>> = Vec::new();
    let mut triangles = Vec::new();
    let mut unrecognized: Vec<String> = Vec::new();
    let mut current = SemanticClass::Noise;
    let mut seen_group = false;
    let mut warned_default = false;

    for (ln, raw) in text.lines().enumerate() {
        let loc = || format!("{source}:{}", ln + 1);
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let mut c = [T::zero(); 3];
                for slot in &mut c {
                    let s = tok
                        .next()
                        .ok_or_else(|| Error::parse(loc(), "vertex needs 3 coordinates"))?;
                    let v: T = s
                        .parse()
                        .map_err(|_| Error::parse(loc(), format!("invalid coordinate `{s}`")))?;
                    if !v.is_finite() {
                        return Err(Error::parse(loc(), "non-finite coordinate"));
                    }
                    *slot = v;
                }
                vertices.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("g") | Some("o") => {
                seen_group = true;
                let name = tok.next().unwrap_or("default");
                current = match class_of_group(name) {
                    Some(c) => c,
                    None => {
                        if !unrecognized.iter().any(|n| n == name) {
                            warn!("{}: group `{name}` is not a class name, using Noise", loc());
                            unrecognized.push(name.to_string());
                        }
                        SemanticClass::Noise
                    }
                };
            }
            Some("f") => {
                if !seen_group && !warned_default {
                    warn!("{}: faces before any class group, using Noise", loc());
                    warned_default = true;
                }
                let mut idx = Vec::with_capacity(4);
                for t in tok {
                    let first = t.split('/').next().unwrap_or("");
                    let i: i64 = first
                        .parse()
                        .map_err(|_| Error::parse(loc(), format!("invalid face index `{t}`")))?;
                    let n = vertices.len() as i64;
                    let abs = if i > 0 { i - 1 } else { n + i };
                    if i == 0 || abs < 0 || abs >= n {
                        return Err(Error::parse(
                            loc(),
                            format!("face index {i} out of range ({n} vertices)"),
                        ));
                    }
                    idx.push(abs as usize);
                }
                if idx.len() < 3 {
                    return Err(Error::parse(
                        loc(),
                        format!("face with {} vertices cannot be triangulated", idx.len()),
                    ));
                }
                for k in 1..idx.len() - 1 {
                    triangles.push(Triangle {
                        v: [idx[0], idx[k], idx[k + 1]],
                        class: current,
                    });
                }
            }
            _ => {}
        }
    }
    let (mesh, dropped) = ClassedMesh::new(vertices, triangles)?;
    if dropped > 0 {
        warn!("{source}: dropped {dropped} degenerate triangles");
    }
    Ok(MeshLoad {
        mesh,
        dropped_degenerate: dropped,
        unrecognized_groups: unrecognized,
    })
}

pub(crate) fn write<T: Scalar, W: Write>(w: &mut W, mesh: &ClassedMesh<T>) -> std::io::Result<()> {
    for v in &mesh.vertices {
        writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
    }
    let mut group = None;
    for t in &mesh.triangles {
        if group != Some(t.class) {
            writeln!(w, "g {}", t.class)?;
            group = Some(t.class);
        }
        writeln!(w, "f {} {} {}", t.v[0] + 1, t.v[1] + 1, t.v[2] + 1)?;
    }
    Ok(())
}
