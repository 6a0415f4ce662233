//! Readers and writers for labeled clouds (XYZL text, PLY) and classed meshes (OBJ).

mod obj;
mod ply;
mod xyzl;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

pub use obj::{class_of_group, MeshLoad};

use crate::cloud::LabeledPointCloud;
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::ClassedMesh;
use crate::scalar::Scalar;
use crate::taxonomy::SemanticClass;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CloudFileFormat {
    Xyzl,
    PlyAscii,
    PlyBinaryLe,
}

impl CloudFileFormat {
    /// Format implied by a file extension: `.ply` is binary PLY, `.xyzl`,
    /// `.xyz` and `.txt` are XYZL text.
    pub fn from_extension(path: &Path) -> Result<Self> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("ply") => Ok(CloudFileFormat::PlyBinaryLe),
            Some("xyzl") | Some("xyz") | Some("txt") => Ok(CloudFileFormat::Xyzl),
            _ => Err(Error::Format(format!(
                "cannot infer cloud format from `{}`",
                path.display()
            ))),
        }
    }

    /// Sniffs PLY by its magic line; anything else is XYZL.
    pub fn detect(bytes: &[u8]) -> Self {
        ply::detect(bytes).unwrap_or(CloudFileFormat::Xyzl)
    }
}

impl std::str::FromStr for CloudFileFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xyzl" => Ok(CloudFileFormat::Xyzl),
            "ply-ascii" => Ok(CloudFileFormat::PlyAscii),
            "ply" | "ply-binary" | "ply-binary-le" => Ok(CloudFileFormat::PlyBinaryLe),
            other => Err(Error::Format(format!("unknown cloud format `{other}`"))),
        }
    }
}

/// A cloud together with the per-point ray origins of the scan that
/// produced it, when known.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScanCloud<T = f64> {
    pub cloud: LabeledPointCloud<T>,
    pub origins: Option<Vec<Vec3<T>>>,
}

impl<T: Scalar> ScanCloud<T> {
    pub fn plain(cloud: LabeledPointCloud<T>) -> Self {
        Self {
            cloud,
            origins: None,
        }
    }
}

pub(crate) fn coerce_label(label: i64, loc: &dyn Fn() -> String) -> SemanticClass {
    let (class, coerced) = SemanticClass::from_label(label);
    if coerced {
        warn!(
            "{}: label {label} is outside 1..=12, coerced to Noise",
            loc()
        );
    }
    class
}

pub fn parse_cloud_bytes<T: Scalar>(
    bytes: &[u8],
    format: Option<CloudFileFormat>,
    source: &str,
) -> Result<ScanCloud<T>> {
    let format = format.unwrap_or_else(|| CloudFileFormat::detect(bytes));
    match format {
        CloudFileFormat::Xyzl => {
            let text = std::str::from_utf8(bytes).map_err(|e| {
                Error::parse(
                    format!("{source}: byte {}", e.valid_up_to()),
                    "not UTF-8 text",
                )
            })?;
            xyzl::parse(text, source)
        }
        CloudFileFormat::PlyAscii | CloudFileFormat::PlyBinaryLe => ply::parse(bytes, source),
    }
}

/// Reads a cloud and any stored ray origins. `format: None` sniffs the file.
pub fn read_scan<T: Scalar>(path: &Path, format: Option<CloudFileFormat>) -> Result<ScanCloud<T>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_cloud_bytes(&bytes, format, &path.display().to_string())
}

pub fn read_cloud<T: Scalar>(
    path: &Path,
    format: Option<CloudFileFormat>,
) -> Result<LabeledPointCloud<T>> {
    read_scan(path, format).map(|s| s.cloud)
}

pub fn write_scan_to<T: Scalar, W: Write>(
    w: &mut W,
    scan: &ScanCloud<T>,
    format: CloudFileFormat,
) -> std::io::Result<()> {
    if let Some(o) = &scan.origins {
        assert_eq!(o.len(), scan.cloud.len(), "one origin per point");
    }
    write_points(w, &scan.cloud, scan.origins.as_deref(), format)
}

fn write_points<T: Scalar, W: Write>(
    w: &mut W,
    cloud: &LabeledPointCloud<T>,
    origins: Option<&[Vec3<T>]>,
    format: CloudFileFormat,
) -> std::io::Result<()> {
    match format {
        CloudFileFormat::Xyzl => xyzl::write(w, cloud, origins),
        CloudFileFormat::PlyAscii => ply::write(w, cloud, origins, false),
        CloudFileFormat::PlyBinaryLe => ply::write(w, cloud, origins, true),
    }
}

pub fn write_scan<T: Scalar>(
    scan: &ScanCloud<T>,
    path: &Path,
    format: CloudFileFormat,
) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    write_scan_to(&mut w, scan, format)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn write_cloud<T: Scalar>(
    cloud: &LabeledPointCloud<T>,
    path: &Path,
    format: CloudFileFormat,
) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    write_cloud_to(&mut w, cloud, format)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn write_cloud_to<T: Scalar, W: Write>(
    w: &mut W,
    cloud: &LabeledPointCloud<T>,
    format: CloudFileFormat,
) -> std::io::Result<()> {
    write_points(w, cloud, None, format)
}

pub fn parse_mesh_str<T: Scalar>(text: &str, source: &str) -> Result<MeshLoad<T>> {
    obj::parse(text, source)
}

pub fn read_mesh<T: Scalar>(path: &Path) -> Result<MeshLoad<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    obj::parse(&text, &path.display().to_string())
}

pub fn write_mesh_to<T: Scalar, W: Write>(w: &mut W, mesh: &ClassedMesh<T>) -> std::io::Result<()> {
    obj::write(w, mesh)
}

pub fn write_mesh<T: Scalar>(mesh: &ClassedMesh<T>, path: &Path) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    obj::write(&mut w, mesh)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_config(path: &Path) -> Result<crate::config::RunConfig> {
    crate::config::RunConfig::read(path)
}

/// Writes pretty JSON followed by a newline. Used for reports, metadata and
/// manifests.
pub fn write_json<S: Serialize>(value: &S, path: &Path) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// Parses JSON with the offending key path in errors.
pub fn parse_json<D: serde::de::DeserializeOwned>(text: &str) -> Result<D> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::config(
            if path.is_empty() {
                ".".to_string()
            } else {
                path
            },
            e.inner().to_string(),
        )
    })
}

pub fn read_json<D: serde::de::DeserializeOwned>(path: &Path) -> Result<D> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::LabeledPoint;
    use crate::mesh::Triangle;

    fn xyzl(s: &str) -> Result<ScanCloud<f64>> {
        parse_cloud_bytes(s.as_bytes(), Some(CloudFileFormat::Xyzl), "t")
    }

    #[test]
    fn xyzl_line() {
        let c = xyzl("# header\n\n1.0 2.0 3.0 6\n").unwrap().cloud;
        assert_eq!(
            c.points,
            vec![LabeledPoint::new(1.0, 2.0, 3.0, SemanticClass::WallSurface)]
        );
    }

    #[test]
    fn xyzl_label_coercion() {
        let c = xyzl("0 0 0 0\n0 0 0 99\n").unwrap().cloud;
        assert!(c.points.iter().all(|p| p.class == SemanticClass::Noise));
    }

    #[test]
    fn xyzl_errors_carry_line() {
        let e = xyzl("0 0 0 1\n0 0 1\n").unwrap_err();
        assert!(e.to_string().contains("t:2"), "{e}");
        assert!(xyzl("0 0 x 1\n").is_err());
        assert!(xyzl("0 0 nan 1\n").is_err());
        assert!(xyzl("0 0 0 1.5\n").is_err());
        assert!(xyzl("0 0 0 1\n0 0 0 1 0 0 0\n").is_err());
    }

    #[test]
    fn xyzl_with_origins() {
        let s = xyzl("1 0 0 6 0 0 0\n2 0 0 6 0 0 0.5\n").unwrap();
        assert_eq!(s.origins.unwrap()[1], Vec3::new(0.0, 0.0, 0.5));
    }

    #[test]
    fn ply_zero_vertices() {
        let s = "ply\nformat ascii 1.0\nelement vertex 0\nproperty double x\nproperty double y\nproperty double z\nproperty uchar class_id\nend_header\n";
        let c = parse_cloud_bytes::<f64>(s.as_bytes(), None, "t").unwrap();
        assert!(c.cloud.is_empty());
    }

    #[test]
    fn ply_foreign_layout() {
        // float coordinates, CloudCompare-style label, a face element after the vertices.
        let s = "ply\nformat ascii 1.0\ncomment made elsewhere\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\nproperty float intensity\nproperty float scalar_Classification\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n0.5 1 2 7 9\n3 4 5 1 0\n3 0 1 1\n";
        let c = parse_cloud_bytes::<f64>(s.as_bytes(), None, "t")
            .unwrap()
            .cloud;
        assert_eq!(
            c.points[0],
            LabeledPoint::new(0.5, 1.0, 2.0, SemanticClass::Window)
        );
        assert_eq!(c.points[1].class, SemanticClass::Noise);
    }

    #[test]
    fn ply_binary_skips_preceding_elements() {
        let mut b = b"ply\nformat binary_little_endian 1.0\nelement camera 1\nproperty list uchar float k\nelement vertex 1\nproperty double x\nproperty double y\nproperty double z\nproperty uchar class_id\nend_header\n".to_vec();
        b.push(2);
        b.extend_from_slice(&1f32.to_le_bytes());
        b.extend_from_slice(&2f32.to_le_bytes());
        for v in [1.5f64, -2.0, 3.25] {
            b.extend_from_slice(&v.to_le_bytes());
        }
        b.push(10);
        let c = parse_cloud_bytes::<f64>(&b, None, "t").unwrap().cloud;
        assert_eq!(
            c.points,
            vec![LabeledPoint::new(
                1.5,
                -2.0,
                3.25,
                SemanticClass::BuildingInstallation
            )]
        );
    }

    #[test]
    fn ply_truncated_body_is_an_error() {
        let mut b = Vec::new();
        let c: LabeledPointCloud = (0..3)
            .map(|i| LabeledPoint::new(i as f64, 0.0, 0.0, SemanticClass::Door))
            .collect();
        write_cloud_to(&mut b, &c, CloudFileFormat::PlyBinaryLe).unwrap();
        b.truncate(b.len() - 5);
        let e = parse_cloud_bytes::<f64>(&b, None, "t").unwrap_err();
        assert!(e.to_string().contains("byte"), "{e}");
    }

    #[test]
    fn ply_count_mismatch_ascii() {
        let s = "ply\nformat ascii 1.0\nelement vertex 2\nproperty double x\nproperty double y\nproperty double z\nend_header\n1 2 3\n";
        assert!(parse_cloud_bytes::<f64>(s.as_bytes(), None, "t").is_err());
    }

    #[test]
    fn unknown_ply_format() {
        let s = "ply\nformat fancy 1.0\nend_header\n";
        assert!(matches!(
            parse_cloud_bytes::<f64>(s.as_bytes(), None, "t"),
            Err(Error::Format(_))
        ));
        assert!("las".parse::<CloudFileFormat>().is_err());
        assert!(CloudFileFormat::from_extension(Path::new("a.laz")).is_err());
    }

    #[test]
    fn frame_note_survives() {
        let c = LabeledPointCloud::new(vec![LabeledPoint::new(1.0, 2.0, 3.0, SemanticClass::Door)])
            .with_note("local frame");
        for f in [
            CloudFileFormat::Xyzl,
            CloudFileFormat::PlyAscii,
            CloudFileFormat::PlyBinaryLe,
        ] {
            let mut b = Vec::new();
            write_cloud_to(&mut b, &c, f).unwrap();
            assert_eq!(parse_cloud_bytes::<f64>(&b, None, "t").unwrap().cloud, c);
        }
    }

    #[test]
    fn obj_quad_fan() {
        let s = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\ng RoofSurface\nf 1 2 3 4\n";
        let m = parse_mesh_str::<f64>(s, "t").unwrap();
        assert_eq!(m.mesh.triangles.len(), 2);
        assert!(m
            .mesh
            .triangles
            .iter()
            .all(|t| t.class == SemanticClass::RoofSurface));
    }

    #[test]
    fn obj_unknown_group() {
        let s = "v 0 0 0\nv 1 0 0\nv 1 1 0\ng Tree_canopy\nf 1/1/1 2/2/2 3/3/3\ng WallSurface_02\nf -3 -2 -1\n";
        let m = parse_mesh_str::<f64>(s, "t").unwrap();
        assert_eq!(m.mesh.triangles[0].class, SemanticClass::Noise);
        assert_eq!(m.mesh.triangles[1].class, SemanticClass::WallSurface);
        assert_eq!(m.unrecognized_groups, vec!["Tree_canopy".to_string()]);
    }

    #[test]
    fn obj_cube_area() {
        let s = 2.5;
        let mut obj = String::from("g WallSurface\n");
        for z in [0.0, s] {
            for (x, y) in [(0.0, 0.0), (s, 0.0), (s, s), (0.0, s)] {
                obj += &format!("v {x} {y} {z}\n");
            }
        }
        for f in [
            "1 4 3 2", "5 6 7 8", "1 2 6 5", "2 3 7 6", "3 4 8 7", "4 1 5 8",
        ] {
            obj += &format!("f {f}\n");
        }
        let m = parse_mesh_str::<f64>(&obj, "t").unwrap().mesh;
        assert_eq!(m.triangles.len(), 12);
        assert!((m.total_area() - 6.0 * s * s).abs() < 1e-12);
    }

    #[test]
    fn obj_errors() {
        assert!(parse_mesh_str::<f64>("v 0 0 0\nv 1 0 0\nf 1 2\n", "t").is_err());
        assert!(parse_mesh_str::<f64>("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n", "t").is_err());
        assert!(parse_mesh_str::<f64>("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n", "t").is_err());
    }

    #[test]
    fn obj_degenerate_dropped() {
        let m = parse_mesh_str::<f64>(
            "g Door\nv 0 0 0\nv 1 0 0\nv 2 0 0\nv 0 1 0\nf 1 2 3\nf 1 2 4\n",
            "t",
        )
        .unwrap();
        assert_eq!(m.dropped_degenerate, 1);
        assert_eq!(
            m.mesh.triangles,
            vec![Triangle {
                v: [0, 1, 3],
                class: SemanticClass::Door
            }]
        );
    }
}
