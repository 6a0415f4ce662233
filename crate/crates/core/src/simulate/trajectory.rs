use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pose {
    /// Seconds.
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Heading about +z, radians.
    pub yaw: f64,
}

impl Pose {
    pub fn position(&self) -> Vec3<f64> {
        Vec3::new(self.x, self.y, self.z)
    }
}

/// Timed vehicle poses with strictly increasing `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Pose>", into = "Vec<Pose>")]
pub struct Trajectory {
    samples: Vec<Pose>,
}

impl TryFrom<Vec<Pose>> for Trajectory {
    type Error = Error;
    fn try_from(samples: Vec<Pose>) -> Result<Self> {
        Trajectory::new(samples)
    }
}

impl From<Trajectory> for Vec<Pose> {
    fn from(t: Trajectory) -> Self {
        t.samples
    }
}

/// `a` wrapped into `(-pi, pi]`.
fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

impl Trajectory {
    pub fn new(samples: Vec<Pose>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("trajectory"));
        }
        for (i, s) in samples.iter().enumerate() {
            if ![s.t, s.x, s.y, s.z, s.yaw].iter().all(|v| v.is_finite()) {
                return Err(Error::config(
                    format!("trajectory[{i}]"),
                    "pose values must be finite",
                ));
            }
            if i > 0 && s.t <= samples[i - 1].t {
                return Err(Error::config(
                    format!("trajectory[{i}].t"),
                    "times must be strictly increasing",
                ));
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[Pose] {
        &self.samples
    }

    pub fn start(&self) -> f64 {
        self.samples[0].t
    }

    pub fn duration(&self) -> f64 {
        self.samples[self.samples.len() - 1].t - self.start()
    }

    /// Position and yaw at `t`: linear in position, shortest arc in yaw,
    /// clamped to the end poses outside the sampled interval.
    pub fn pose_at(&self, t: f64) -> (Vec3<f64>, f64) {
        let s = &self.samples;
        let k = s.partition_point(|p| p.t <= t);
        if k == 0 {
            return (s[0].position(), s[0].yaw);
        }
        if k == s.len() {
            let last = &s[k - 1];
            return (last.position(), last.yaw);
        }
        let (a, b) = (&s[k - 1], &s[k]);
        let u = (t - a.t) / (b.t - a.t);
        let pos = a.position() + (b.position() - a.position()) * u;
        (pos, a.yaw + u * wrap_angle(b.yaw - a.yaw))
    }
}
