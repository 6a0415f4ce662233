use dogss_core::io::{self, CloudFileFormat, ScanCloud};
use dogss_core::{ClassedMesh, LabeledPoint, LabeledPointCloud, SemanticClass, Triangle, Vec3};
use proptest::prelude::*;

const FORMATS: [CloudFileFormat; 3] = [
    CloudFileFormat::Xyzl,
    CloudFileFormat::PlyAscii,
    CloudFileFormat::PlyBinaryLe,
];

fn class() -> impl Strategy<Value = SemanticClass> {
    (1u8..=12).prop_map(|i| SemanticClass::from_id(i).unwrap())
}

fn coord() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6..1e6f64,
        -1.0..1.0f64,
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
        Just(1e-300)
    ]
}

fn vec3() -> impl Strategy<Value = Vec3<f64>> {
    (coord(), coord(), coord()).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn cloud(max: usize) -> impl Strategy<Value = LabeledPointCloud<f64>> {
    (
        prop::collection::vec((vec3(), class()), 0..max),
        "[a-z][a-z ,.]{0,20}[a-z]|",
    )
        .prop_map(|(pts, note)| {
            LabeledPointCloud::new(
                pts.into_iter()
                    .map(|(pos, class)| LabeledPoint { pos, class })
                    .collect(),
            )
            .with_note(note)
        })
}

fn roundtrip<T: dogss_core::Scalar>(scan: &ScanCloud<T>, format: CloudFileFormat) -> ScanCloud<T> {
    let mut buf = Vec::new();
    io::write_scan_to(&mut buf, scan, format).unwrap();
    io::parse_cloud_bytes(&buf, None, "mem").unwrap()
}

fn bits(c: &LabeledPointCloud<f64>) -> Vec<([u64; 3], u8)> {
    c.points
        .iter()
        .map(|p| (p.pos.to_array().map(f64::to_bits), p.class.id()))
        .collect()
}

proptest! {
    #[test]
    fn cloud_roundtrip_f64(c in cloud(200)) {
        for format in FORMATS {
            let back = roundtrip(&ScanCloud::plain(c.clone()), format);
            prop_assert_eq!(bits(&back.cloud), bits(&c), "{:?}", format);
            prop_assert_eq!(&back.cloud.frame_note, &c.frame_note);
            prop_assert!(back.origins.is_none());
        }
    }

    #[test]
    fn cloud_roundtrip_with_origins(c in cloud(100), o in vec3()) {
        let origins = (0..c.len()).map(|i| o + Vec3::splat(i as f64 * 0.37)).collect::<Vec<_>>();
        let scan = ScanCloud { cloud: c, origins: Some(origins) };
        for format in FORMATS {
            let back = roundtrip(&scan, format);
            if scan.cloud.is_empty() && format == CloudFileFormat::Xyzl {
                // An empty text file cannot record its column count.
                prop_assert!(back.cloud.is_empty());
                continue;
            }
            prop_assert_eq!(&back, &scan, "{:?}", format);
        }
    }

    #[test]
    fn cloud_roundtrip_f32(pts in prop::collection::vec((-1e4f32..1e4, -1e4f32..1e4, -1e4f32..1e4, class()), 0..100)) {
        let c: LabeledPointCloud<f32> = pts.into_iter().map(|(x, y, z, k)| LabeledPoint::new(x, y, z, k)).collect();
        for format in FORMATS {
            let back = roundtrip(&ScanCloud::plain(c.clone()), format);
            prop_assert_eq!(&back.cloud, &c, "{:?}", format);
        }
    }

    #[test]
    fn mesh_roundtrip(
        verts in prop::collection::vec(vec3(), 3..40),
        tris in prop::collection::vec((0usize..1000, 0usize..1000, 0usize..1000, class()), 0..60),
    ) {
        let n = verts.len();
        let tris = tris.into_iter().map(|(a, b, c, class)| Triangle { v: [a % n, b % n, c % n], class }).collect();
        let (mesh, _) = ClassedMesh::new(verts, tris).unwrap();
        let mut buf = Vec::new();
        io::write_mesh_to(&mut buf, &mesh).unwrap();
        let load = io::parse_mesh_str::<f64>(std::str::from_utf8(&buf).unwrap(), "mem").unwrap();
        prop_assert_eq!(load.dropped_degenerate, 0);
        prop_assert!(load.unrecognized_groups.is_empty());
        prop_assert_eq!(load.mesh, mesh);
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..512)) {
        for format in [None, Some(CloudFileFormat::Xyzl), Some(CloudFileFormat::PlyAscii), Some(CloudFileFormat::PlyBinaryLe)] {
            let _ = io::parse_cloud_bytes::<f64>(&bytes, format, "fuzz");
        }
        if let Ok(text) = std::str::from_utf8(&bytes) {
            let _ = io::parse_mesh_str::<f64>(text, "fuzz");
        }
    }

    #[test]
    fn mutated_ply_never_panics(c in cloud(20), flips in prop::collection::vec((any::<prop::sample::Index>(), any::<u8>()), 1..8)) {
        for format in [CloudFileFormat::PlyAscii, CloudFileFormat::PlyBinaryLe] {
            let mut buf = Vec::new();
            io::write_scan_to(&mut buf, &ScanCloud::plain(c.clone()), format).unwrap();
            for (at, b) in &flips {
                let i = at.index(buf.len());
                buf[i] = *b;
            }
            let _ = io::parse_cloud_bytes::<f64>(&buf, None, "fuzz");
        }
    }

    #[test]
    fn ply_huge_count_is_an_error(count in 1u64..u64::MAX) {
        let text = format!("ply\nformat binary_little_endian 1.0\nelement vertex {count}\nproperty double x\nproperty double y\nproperty double z\nend_header\n");
        prop_assert!(io::parse_cloud_bytes::<f64>(text.as_bytes(), None, "fuzz").is_err());
    }
}

#[test]
fn ten_thousand_points_roundtrip_through_files() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let c: LabeledPointCloud<f64> = (0..10_000)
        .map(|_| {
            LabeledPoint::new(
                rng.gen_range(-500.0..500.0),
                rng.gen_range(-500.0..500.0),
                rng.gen_range(-10.0..40.0),
                SemanticClass::from_id(rng.gen_range(1..=12)).unwrap(),
            )
        })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    for (name, format) in [
        ("a.xyzl", CloudFileFormat::Xyzl),
        ("b.ply", CloudFileFormat::PlyAscii),
        ("c.ply", CloudFileFormat::PlyBinaryLe),
    ] {
        let path = dir.path().join(name);
        io::write_cloud(&c, &path, format).unwrap();
        let back: LabeledPointCloud<f64> = io::read_cloud(&path, None).unwrap();
        assert_eq!(bits(&back), bits(&c), "{name}");
    }
}

#[test]
fn missing_file_is_io_error() {
    let e = io::read_cloud::<f64>(std::path::Path::new("/nonexistent/x.ply"), None).unwrap_err();
    assert_eq!(e.kind(), dogss_core::ErrorKind::Io);
    assert!(e.to_string().contains("/nonexistent/x.ply"));
}
