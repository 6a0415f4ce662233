use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::{LabeledPoint, LabeledPointCloud};
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::io::ScanCloud;
use crate::scalar::Scalar;
use crate::simulate::Trajectory;
use crate::spatial::Bvh;
use crate::taxonomy::SemanticClass;

/// Rotating multi-beam LiDAR.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub channels: u32,
    /// Lowest and highest beam elevation, degrees.
    pub vertical_fov_deg: [f64; 2],
    pub rotation_rate_hz: f64,
    pub points_per_second: f64,
    pub max_range_m: f64,
    /// Sensor position in the vehicle frame (x forward, z up).
    pub sensor_offset_m: [f64; 3],
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            channels: 64,
            vertical_fov_deg: [-25.0, 15.0],
            rotation_rate_hz: 10.0,
            points_per_second: 600_000.0,
            max_range_m: 120.0,
            sensor_offset_m: [0.0, 0.0, 0.0],
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.vertical_fov_deg;
        if self.channels == 0 {
            return Err(Error::config("scan.channels", "must be at least 1"));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi && lo >= -90.0 && hi <= 90.0) {
            return Err(Error::config(
                "scan.vertical_fov_deg",
                format!("need -90 <= min < max <= 90, got [{lo}, {hi}]"),
            ));
        }
        if !(self.max_range_m.is_finite() && self.max_range_m > 0.0) {
            return Err(Error::config("scan.max_range_m", "must be positive"));
        }
        if !(self.rotation_rate_hz.is_finite() && self.rotation_rate_hz > 0.0) {
            return Err(Error::config("scan.rotation_rate_hz", "must be positive"));
        }
        if !self.sensor_offset_m.iter().all(|v| v.is_finite()) {
            return Err(Error::config("scan.sensor_offset_m", "must be finite"));
        }
        if !(self.points_per_second.is_finite() && self.azimuth_steps() >= 1) {
            return Err(Error::config(
                "scan.points_per_second",
                "must allow at least one azimuth step per rotation and channel",
            ));
        }
        Ok(())
    }

    /// Azimuth steps per rotation.
    pub fn azimuth_steps(&self) -> usize {
        let n = self.points_per_second / (self.rotation_rate_hz * self.channels as f64);
        if n.is_finite() && n >= 1.0 {
            n.floor() as usize
        } else {
            0
        }
    }

    /// Beam elevations in radians, ascending; one channel looks at the FOV middle.
    pub fn elevations(&self) -> Vec<f64> {
        let [lo, hi] = self.vertical_fov_deg;
        let n = self.channels as usize;
        if n == 1 {
            return vec![((lo + hi) / 2.0).to_radians()];
        }
        (0..n)
            .map(|k| (lo + (hi - lo) * k as f64 / (n - 1) as f64).to_radians())
            .collect()
    }
}

/// One simulated return with the ray that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Return<T = f64> {
    pub origin: Vec3<T>,
    pub point: Vec3<T>,
    pub triangle: usize,
    pub class: SemanticClass,
}

/// Every return of the scan, ordered by firing time, then channel.
pub fn scan_returns<T: Scalar>(
    bvh: &Bvh<T>,
    trajectory: &Trajectory,
    scan: &ScanConfig,
) -> Result<Vec<Return<T>>> {
    scan.validate()?;
    if bvh.mesh().triangles.is_empty() {
        return Err(Error::EmptyInput("mesh"));
    }
    let period = 1.0 / scan.rotation_rate_hz;
    if trajectory.duration() < period {
        return Err(Error::config(
            "trajectory",
            format!(
                "must span at least one rotation period ({period} s), spans {} s",
                trajectory.duration()
            ),
        ));
    }
    let n_az = scan.azimuth_steps();
    let columns = (trajectory.duration() * scan.rotation_rate_hz * n_az as f64).floor() as usize;
    let elevations: Vec<(f64, f64)> = scan
        .elevations()
        .into_iter()
        .map(|e| (e.cos(), e.sin()))
        .collect();
    let offset = Vec3::from_f64(scan.sensor_offset_m);
    let col_dt = period / n_az as f64;
    let max_range = T::from_f64_lossy(scan.max_range_m);

    let per_column: Vec<Vec<Return<T>>> = (0..columns)
        .into_par_iter()
        .map(|j| {
            let (pos, yaw) = trajectory.pose_at(trajectory.start() + j as f64 * col_dt);
            let (sy, cy) = yaw.sin_cos();
            let origin = pos
                + Vec3::new(
                    cy * offset.x - sy * offset.y,
                    sy * offset.x + cy * offset.y,
                    offset.z,
                );
            let az = yaw + 2.0 * std::f64::consts::PI * (j % n_az) as f64 / n_az as f64;
            let (sa, ca) = az.sin_cos();
            let o = Vec3::from_f64(origin.to_array());
            elevations
                .iter()
                .filter_map(|&(ce, se)| {
                    let dir = Vec3::from_f64([ce * ca, ce * sa, se]);
                    let hit = bvh.raycast(o, dir)?;
                    (hit.t <= max_range).then(|| Return {
                        origin: o,
                        point: o + dir * hit.t,
                        triangle: hit.triangle,
                        class: hit.class,
                    })
                })
                .collect()
        })
        .collect();
    Ok(per_column.into_iter().flatten().collect())
}

/// Labeled scan of the mesh behind `bvh` along `trajectory`, with the ray
/// origin of every point.
pub fn simulate_scan<T: Scalar>(
    bvh: &Bvh<T>,
    trajectory: &Trajectory,
    scan: &ScanConfig,
) -> Result<ScanCloud<T>> {
    let returns = scan_returns(bvh, trajectory, scan)?;
    let points = returns
        .iter()
        .map(|r| LabeledPoint {
            pos: r.point,
            class: r.class,
        })
        .collect();
    let origins = returns.iter().map(|r| r.origin).collect();
    let cloud = LabeledPointCloud::new(points).with_note("simulated scan, mesh frame");
    Ok(ScanCloud {
        cloud,
        origins: Some(origins),
    })
}
