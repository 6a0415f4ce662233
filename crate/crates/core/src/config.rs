//! Run configuration: metric parameters at the top level plus optional
//! sections for the scanner, noise, splits and mixing.
//!
//! ```json
//! { "voxel_size_m": 0.5, "lambda1": 0.6, "seed": 7,
//!   "scan": { "channels": 32 }, "noise": { "sigma_m": 0.02 },
//!   "mix": { "real_fraction": 0.5, "target_count": 100000 },
//!   "split": { "regions": [ { "name": "train", "rect": [0, 0, 100, 50] } ] } }
//! ```

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::dataset::{RatioMix, SplitSpec};
use crate::error::{Error, Result};
use crate::metric::MetricParams;
use crate::simulate::{NoiseModel, ScanConfig};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub sigma_m: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixSection {
    pub real_fraction: f64,
    pub target_count: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub metric: MetricParams,
    pub seed: Option<u64>,
    pub scan: Option<ScanConfig>,
    pub noise: Option<NoiseSection>,
    pub split: Option<SplitSpec>,
    pub mix: Option<MixSection>,
}

fn at<D: DeserializeOwned>(v: Value, prefix: &str) -> Result<D> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        let key = match (prefix, path.as_str()) {
            ("", ".") => ".".to_string(),
            ("", p) => p.to_string(),
            (pre, ".") => pre.to_string(),
            (pre, p) => format!("{pre}.{p}"),
        };
        Error::config(key, e.into_inner().to_string())
    })
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let mut map: Map<String, Value> = crate::io::parse_json(text)?;
        let mut section = |k: &str| map.remove(k).filter(|v| !v.is_null());
        let seed = section("seed").map(|v| at(v, "seed")).transpose()?;
        let scan = section("scan").map(|v| at(v, "scan")).transpose()?;
        let noise = section("noise").map(|v| at(v, "noise")).transpose()?;
        let split = section("split").map(|v| at(v, "split")).transpose()?;
        let mix = section("mix").map(|v| at(v, "mix")).transpose()?;
        let metric = at(Value::Object(map), "")?;
        Ok(Self {
            metric,
            seed,
            scan,
            noise,
            split,
            mix,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.into(),
            source: e,
        })?;
        Self::from_json_str(&text)
    }

    /// Checks every section that is present.
    pub fn validate(&self) -> Result<()> {
        self.metric.validate()?;
        if let Some(s) = &self.scan {
            s.validate()?;
        }
        if let Some(n) = &self.noise {
            NoiseModel {
                sigma_m: n.sigma_m,
                seed: 0,
            }
            .validate()?;
        }
        if let Some(s) = &self.split {
            s.validate()?;
        }
        if let Some(m) = &self.mix {
            RatioMix {
                real_fraction: m.real_fraction,
                target_count: m.target_count,
                seed: 0,
            }
            .validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        let c = RunConfig::from_json_str("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        c.validate().unwrap();
    }

    #[test]
    fn sections_and_metric_keys() {
        let c = RunConfig::from_json_str(
            r#"{"alpha": -0.5, "seed": 7, "scan": {"channels": 16}, "noise": {"sigma_m": 0.02},
                "mix": {"real_fraction": 0.25, "target_count": 10},
                "split": {"regions": [{"name": "a", "rect": [0, 0, 1, 1]}]}}"#,
        )
        .unwrap();
        assert_eq!(c.metric.alpha, -0.5);
        assert_eq!(c.seed, Some(7));
        let scan = c.scan.as_ref().unwrap();
        assert_eq!((scan.channels, scan.rotation_rate_hz), (16, 10.0));
        c.validate().unwrap();
    }

    #[test]
    fn error_paths() {
        let key = |s: &str| match RunConfig::from_json_str(s).unwrap_err() {
            Error::Config { key, .. } => key,
            e => panic!("{e}"),
        };
        assert_eq!(key(r#"{"scan": {"channel": 3}}"#), "scan.channel");
        assert_eq!(key(r#"{"scan": {"channels": "x"}}"#), "scan.channels");
        assert_eq!(
            key(r#"{"m3c2": {"normal_scale_m": "x"}}"#),
            "m3c2.normal_scale_m"
        );
        assert_eq!(key(r#"{"alpah": -0.1}"#), "alpah");
        assert_eq!(key(r#"{"class_weights": {"Door": 0.5}}"#), "class_weights");
        assert_eq!(key("[1]"), ".");
    }

    #[test]
    fn lambda_sum_fails_validation() {
        let c = RunConfig::from_json_str(r#"{"lambda1": 0.5, "lambda2": 0.3, "lambda3": 0.1}"#)
            .unwrap();
        assert!(matches!(c.validate(), Err(Error::Config { .. })));
    }

    #[test]
    fn echo_roundtrip() {
        let c = RunConfig::from_json_str(r#"{"seed": 3, "noise": {"sigma_m": 0.01}}"#).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_json_str(&text).unwrap(), c);
        assert!(text.contains("\"alpha\":-0.2"));
    }
}
