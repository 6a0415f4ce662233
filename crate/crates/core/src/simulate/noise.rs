use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::{LabeledPoint, LabeledPointCloud};
use crate::error::{Error, Result};
use crate::io::ScanCloud;
use crate::scalar::Scalar;

/// Gaussian range noise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    /// Standard deviation of the range error, meters.
    pub sigma_m: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        if self.sigma_m.is_finite() && self.sigma_m >= 0.0 {
            Ok(())
        } else {
            Err(Error::config(
                "noise.sigma_m",
                format!("must be a non-negative number, got {}", self.sigma_m),
            ))
        }
    }

    /// Range error of point `i`. Each point draws from its own stream, so
    /// the result does not depend on evaluation order.
    pub fn displacement(&self, i: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(i as u64);
        Normal::new(0.0, self.sigma_m)
            .expect("validated sigma")
            .sample(&mut rng)
    }
}

/// Moves every point along its ray by an independent `N(0, sigma)` distance.
/// Labels, order and origins are kept.
pub fn apply_range_noise<T: Scalar>(
    scan: &ScanCloud<T>,
    noise: &NoiseModel,
) -> Result<ScanCloud<T>> {
    noise.validate()?;
    let n = scan.cloud.len();
    let origins = match &scan.origins {
        Some(o) if o.len() == n => o,
        Some(o) => return Err(Error::MissingRayOrigin(o.len())),
        None if n == 0 => return Ok(scan.clone()),
        None => return Err(Error::MissingRayOrigin(0)),
    };
    if noise.sigma_m == 0.0 {
        return Ok(scan.clone());
    }
    let points = scan
        .cloud
        .points
        .par_iter()
        .zip(origins.par_iter())
        .enumerate()
        .map(|(i, (p, o))| {
            let (pf, of) = (p.pos.to_f64(), o.to_f64());
            let ray = [pf[0] - of[0], pf[1] - of[1], pf[2] - of[2]];
            let len = (ray[0] * ray[0] + ray[1] * ray[1] + ray[2] * ray[2]).sqrt();
            if len == 0.0 {
                return *p;
            }
            let k = noise.displacement(i) / len;
            let moved = [pf[0] + ray[0] * k, pf[1] + ray[1] * k, pf[2] + ray[2] * k];
            LabeledPoint {
                pos: crate::geom::Vec3::from_f64(moved),
                class: p.class,
            }
        })
        .collect();
    let cloud = LabeledPointCloud {
        points,
        frame_note: scan.cloud.frame_note.clone(),
    };
    Ok(ScanCloud {
        cloud,
        origins: scan.origins.clone(),
    })
}
