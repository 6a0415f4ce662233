use dogss_core::io::ScanCloud;
use dogss_core::simulate::{
    apply_range_noise, simulate_scan, NoiseModel, Pose, ScanConfig, Trajectory,
};
use dogss_core::spatial::Bvh;
use dogss_core::{ClassedMesh, LabeledPoint, LabeledPointCloud, SemanticClass, Triangle, Vec3};

fn plane_scan(n: usize) -> ScanCloud {
    let side = (n as f64).sqrt().ceil() as usize;
    let cloud: LabeledPointCloud = (0..n)
        .map(|i| {
            LabeledPoint::new(
                (i % side) as f64 * 0.02,
                (i / side) as f64 * 0.02,
                0.0,
                SemanticClass::RoadSurface,
            )
        })
        .collect();
    ScanCloud {
        origins: Some(vec![Vec3::new(3.0, 3.0, 2.0); n]),
        cloud,
    }
}

#[test]
fn along_ray_displacement_statistics() {
    let scan = plane_scan(100_000);
    let noisy = apply_range_noise(
        &scan,
        &NoiseModel {
            sigma_m: 0.02,
            seed: 2024,
        },
    )
    .unwrap();
    let o = scan.origins.as_ref().unwrap();
    let mut along = Vec::with_capacity(scan.cloud.len());
    let mut max_transverse: f64 = 0.0;
    for ((p, q), o) in scan.cloud.points.iter().zip(&noisy.cloud.points).zip(o) {
        let ray = (p.pos - *o).normalized().unwrap();
        let disp = q.pos - p.pos;
        along.push(disp.dot(ray));
        max_transverse = max_transverse.max((disp - ray * disp.dot(ray)).norm());
    }
    let n = along.len() as f64;
    let mean = along.iter().sum::<f64>() / n;
    let sd = (along.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!((0.0195..=0.0205).contains(&sd), "sd={sd}");
    assert!(mean.abs() < 3.0 * 0.02 / n.sqrt() * 2.0, "mean={mean}");
    assert!(max_transverse < 1e-9, "{max_transverse}");
}

#[test]
fn f32_scan_matches_f64_scan() {
    let v = vec![
        Vec3::new(-10.0, -10.0, 0.0),
        Vec3::new(10.0, -10.0, 0.0),
        Vec3::new(10.0, 10.0, 0.0),
        Vec3::new(-10.0, 10.0, 0.0),
    ];
    let t = vec![
        Triangle {
            v: [0, 1, 2],
            class: SemanticClass::RoadSurface,
        },
        Triangle {
            v: [0, 2, 3],
            class: SemanticClass::GroundSurface,
        },
    ];
    let (mesh, _) = ClassedMesh::new(v, t).unwrap();
    let mesh32 = ClassedMesh::new(
        mesh.vertices
            .iter()
            .map(|p| Vec3::<f32>::from_f64(p.to_array()))
            .collect(),
        mesh.triangles.clone(),
    )
    .unwrap()
    .0;
    let traj = Trajectory::new(vec![
        Pose {
            t: 0.0,
            x: 0.0,
            y: 0.0,
            z: 2.0,
            yaw: 0.0,
        },
        Pose {
            t: 0.1,
            x: 0.5,
            y: 0.0,
            z: 2.0,
            yaw: 0.1,
        },
    ])
    .unwrap();
    let scan = ScanConfig {
        channels: 16,
        points_per_second: 40_000.0,
        ..Default::default()
    };
    let a = simulate_scan(&Bvh::build(mesh), &traj, &scan).unwrap();
    let b = simulate_scan(&Bvh::build(mesh32), &traj, &scan).unwrap();
    assert!(!a.cloud.is_empty());
    assert_eq!(a.cloud.len(), b.cloud.len());
    for (p, q) in a.cloud.points.iter().zip(&b.cloud.points) {
        assert_eq!(p.class, q.class);
        assert!(p.pos.distance(Vec3::from_f64(q.pos.to_f64())) < 1e-3);
    }
}
