use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::taxonomy::ClassWeights;

pub const LAMBDA_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum C2cMode {
    /// Largest nearest-neighbor distance from a real point to the synthetic cloud.
    #[default]
    DirectedMax,
    /// Mean nearest-neighbor distance from real points to the synthetic cloud.
    DirectedMean,
    /// Larger of the two directed maxima.
    SymmetricMax,
}

/// How `lambda1` and `lambda2` weight the two distances in `d`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Eq3WeightMode {
    #[default]
    AsGiven,
    /// Divide both by `lambda1 + lambda2`.
    Renormalized,
}

/// `strict` requires the lambdas to sum to one and strictly decrease;
/// `relaxed` only requires them to be non-negative.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaValidation {
    #[default]
    Strict,
    Relaxed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct M3c2Params {
    /// Radius of the neighborhood used for the core-point normal.
    pub normal_scale_m: f64,
    /// Radius of the projection cylinder.
    pub projection_radius_m: f64,
    /// Half-length of the projection cylinder along the normal.
    pub max_depth_m: f64,
}

impl Default for M3c2Params {
    fn default() -> Self {
        Self {
            normal_scale_m: 0.5,
            projection_radius_m: 0.25,
            max_depth_m: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricParams {
    pub voxel_size_m: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub class_weights: ClassWeights,
    pub m3c2: M3c2Params,
    pub c2c_mode: C2cMode,
    pub eq3_weight_mode: Eq3WeightMode,
    pub lambda_validation: LambdaValidation,
}

impl Default for MetricParams {
    fn default() -> Self {
        Self {
            voxel_size_m: 0.5,
            lambda1: 0.6,
            lambda2: 0.3,
            lambda3: 0.1,
            alpha: -0.2,
            epsilon: 1e-6,
            class_weights: ClassWeights::default(),
            m3c2: M3c2Params::default(),
            c2c_mode: C2cMode::default(),
            eq3_weight_mode: Eq3WeightMode::default(),
            lambda_validation: LambdaValidation::default(),
        }
    }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(
            key,
            format!("must be a positive number, got {v}"),
        ))
    }
}

impl MetricParams {
    pub fn validate(&self) -> Result<()> {
        positive("voxel_size_m", self.voxel_size_m)?;
        positive("epsilon", self.epsilon)?;
        positive("m3c2.normal_scale_m", self.m3c2.normal_scale_m)?;
        positive("m3c2.projection_radius_m", self.m3c2.projection_radius_m)?;
        positive("m3c2.max_depth_m", self.m3c2.max_depth_m)?;
        if !(self.alpha.is_finite() && self.alpha < 0.0) {
            return Err(Error::config(
                "alpha",
                format!("must be negative, got {}", self.alpha),
            ));
        }
        let lambdas = [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("lambda3", self.lambda3),
        ];
        for (key, l) in lambdas {
            if !(l.is_finite() && l >= 0.0) {
                return Err(Error::config(
                    key,
                    format!("must be a non-negative number, got {l}"),
                ));
            }
        }
        if self.lambda1 + self.lambda2 <= 0.0 {
            return Err(Error::config(
                "lambda1",
                "lambda1 + lambda2 must be positive",
            ));
        }
        if self.lambda_validation == LambdaValidation::Strict {
            let sum = self.lambda1 + self.lambda2 + self.lambda3;
            if (sum - 1.0).abs() > LAMBDA_SUM_TOLERANCE {
                return Err(Error::config(
                    "lambda1",
                    format!("lambda1 + lambda2 + lambda3 must equal 1, got {sum}"),
                ));
            }
            if !(self.lambda1 > self.lambda2 && self.lambda2 > self.lambda3) {
                return Err(Error::config(
                    "lambda2",
                    format!(
                        "lambdas must satisfy lambda1 > lambda2 > lambda3, got {} / {} / {}",
                        self.lambda1, self.lambda2, self.lambda3
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Weights applied to `d_mm3c2` and `d_c2c` in `d`.
    pub fn distance_weights(&self) -> (f64, f64) {
        match self.eq3_weight_mode {
            Eq3WeightMode::AsGiven => (self.lambda1, self.lambda2),
            Eq3WeightMode::Renormalized => {
                let s = self.lambda1 + self.lambda2;
                (self.lambda1 / s, self.lambda2 / s)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_json;

    #[test]
    fn defaults() {
        let p = MetricParams::default();
        p.validate().unwrap();
        assert_eq!(
            (
                p.lambda1,
                p.lambda2,
                p.lambda3,
                p.alpha,
                p.epsilon,
                p.voxel_size_m
            ),
            (0.6, 0.3, 0.1, -0.2, 1e-6, 0.5)
        );
    }

    #[test]
    fn missing_alpha_defaults() {
        let p: MetricParams = parse_json(r#"{"voxel_size_m": 0.25}"#).unwrap();
        assert_eq!(p.alpha, -0.2);
        assert_eq!(p.voxel_size_m, 0.25);
    }

    #[test]
    fn lambda_sum_rejected_when_strict() {
        let p: MetricParams =
            parse_json(r#"{"lambda1": 0.5, "lambda2": 0.3, "lambda3": 0.1}"#).unwrap();
        let e = p.validate().unwrap_err();
        assert!(matches!(e, Error::Config { .. }), "{e}");
    }

    #[test]
    fn lambda_order_rejected_when_strict() {
        let p = MetricParams {
            lambda1: 0.3,
            lambda2: 0.6,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn relaxed_accepts_unordered_lambdas() {
        let p = MetricParams {
            lambda2: 0.4,
            lambda_validation: LambdaValidation::Relaxed,
            ..Default::default()
        };
        p.validate().unwrap();
        assert!(MetricParams {
            lambda2: 0.4,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn scalar_ranges() {
        assert!(MetricParams {
            alpha: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(MetricParams {
            epsilon: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(MetricParams {
            voxel_size_m: -1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        let mut p = MetricParams::default();
        p.m3c2.max_depth_m = f64::NAN;
        assert!(p.validate().is_err());
    }

    #[test]
    fn unknown_key_reports_path() {
        let e = parse_json::<MetricParams>(r#"{"m3c2": {"radius": 1}}"#).unwrap_err();
        assert!(e.to_string().contains("m3c2"), "{e}");
    }

    #[test]
    fn renormalized_weights() {
        let p = MetricParams {
            eq3_weight_mode: Eq3WeightMode::Renormalized,
            ..Default::default()
        };
        let (a, b) = p.distance_weights();
        assert!((a - 2.0 / 3.0).abs() < 1e-15 && (b - 1.0 / 3.0).abs() < 1e-15);
    }
}
