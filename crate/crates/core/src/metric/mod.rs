//! Domain-gap score between a real cloud `R` and a synthetic cloud `S`.
//!
//! ```text
//! d     = λ1·d_mm3c2 + λ2·d_c2c
//! f     = 1 / (mIoU + ε)
//! m     = 1 − exp[α·(d + λ3·f)]
//! ```

mod c2c;
mod m3c2;
mod miou;
mod params;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use c2c::c2c_distance;
pub use m3c2::{
    m3c2_class_distance, m3c2_core_distances, median, mm3c2_distance, weighted_abs_medians,
    ClassM3c2,
};
pub use miou::{voxel_miou, weighted_miou, ClassIou, VoxelMiou};
pub use params::{
    C2cMode, Eq3WeightMode, LambdaValidation, M3c2Params, MetricParams, LAMBDA_SUM_TOLERANCE,
};

use crate::cloud::LabeledPointCloud;
use crate::error::Result;
use crate::geom::Vec3;
use crate::scalar::Scalar;
use crate::taxonomy::SemanticClass;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub d: f64,
    pub f_miou: f64,
    pub m: f64,
}

/// Combines the three component values into `d`, `f_mIoU` and the score.
pub fn compose(d_mm3c2: f64, d_c2c: f64, miou: f64, params: &MetricParams) -> Scores {
    let (w1, w2) = params.distance_weights();
    let d = w1 * d_mm3c2 + w2 * d_c2c;
    let f_miou = 1.0 / (miou + params.epsilon);
    let m = -(params.alpha * (d + params.lambda3 * f_miou)).exp_m1();
    Scores { d, f_miou, m }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassGap {
    pub weight: f64,
    pub real_points: usize,
    pub synthetic_points: usize,
    /// Signed median M3C2 distance; absent for unweighted classes and
    /// classes without inliers.
    pub m3c2_median: Option<f64>,
    pub inlier_count: usize,
    pub outlier_count: usize,
    /// Absent when the class occupies no voxel in either cloud.
    pub iou: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub params: MetricParams,
    pub voxel_origin: [f64; 3],
    pub d_c2c: f64,
    pub per_class: BTreeMap<SemanticClass, ClassGap>,
    pub d_mm3c2: f64,
    pub miou: f64,
    pub f_miou: f64,
    pub d: f64,
    pub m_dogss_pcl: f64,
}

impl GapReport {
    /// Largest absolute difference between the stored `d`, `f_miou` and
    /// score and their recomputation from the stored components.
    pub fn consistency_error(&self) -> f64 {
        let s = compose(self.d_mm3c2, self.d_c2c, self.miou, &self.params);
        [s.d - self.d, s.f_miou - self.f_miou, s.m - self.m_dogss_pcl]
            .iter()
            .map(|e| e.abs())
            .fold(0.0, f64::max)
    }
}

/// Full report for `r` against `s`.
pub fn dogss_pcl<T: Scalar>(
    r: &LabeledPointCloud<T>,
    s: &LabeledPointCloud<T>,
    params: &MetricParams,
) -> Result<GapReport> {
    params.validate()?;
    let d_c2c = c2c_distance(r, s, params.c2c_mode)?;
    let (d_mm3c2, m3c2) = mm3c2_distance(r, s, &params.class_weights, &params.m3c2)?;
    let vm = voxel_miou(r, s, params.voxel_size_m, &params.class_weights)?;
    let scores = compose(d_mm3c2, d_c2c, vm.miou, params);

    let rc = r.class_counts();
    let sc = s.class_counts();
    let mut per_class = BTreeMap::new();
    for c in SemanticClass::ALL {
        let weight = params.class_weights.get(c);
        let (real_points, synthetic_points) = (
            rc.get(&c).copied().unwrap_or(0),
            sc.get(&c).copied().unwrap_or(0),
        );
        if weight == 0.0 && real_points == 0 && synthetic_points == 0 {
            continue;
        }
        let m = m3c2.get(&c);
        per_class.insert(
            c,
            ClassGap {
                weight,
                real_points,
                synthetic_points,
                m3c2_median: m.and_then(|m| m.median),
                inlier_count: m.map_or(0, |m| m.inliers),
                outlier_count: m.map_or(0, |m| m.outliers),
                iou: vm.per_class.get(&c).map(|i| i.iou),
            },
        );
    }
    Ok(GapReport {
        params: params.clone(),
        voxel_origin: vm.origin,
        d_c2c,
        per_class,
        d_mm3c2,
        miou: vm.miou,
        f_miou: scores.f_miou,
        d: scores.d,
        m_dogss_pcl: scores.m,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub offset: [f64; 3],
    pub report: GapReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    /// Unit direction the scalar offsets were applied along, when given that way.
    pub direction: Option<[f64; 3]>,
    pub rows: Vec<SensitivityRow>,
}

/// One report per rigid translation of `s`.
pub fn offset_sensitivity<T: Scalar>(
    r: &LabeledPointCloud<T>,
    s: &LabeledPointCloud<T>,
    offsets: &[Vec3<T>],
    params: &MetricParams,
) -> Result<Vec<SensitivityRow>> {
    offsets
        .iter()
        .map(|&v| {
            let report = dogss_pcl(r, &s.translated(v), params)?;
            Ok(SensitivityRow {
                offset: v.to_f64(),
                report,
            })
        })
        .collect()
}

/// Min-max rescaling of scores from several candidate synthetic clouds onto
/// `[0, 1]`. All-equal inputs map to 0.
pub fn rescale_scores(scores: &[f64]) -> Vec<f64> {
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    scores
        .iter()
        .map(|&v| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
        .collect()
}
