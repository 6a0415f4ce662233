use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::LabeledPointCloud;
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::metric::M3c2Params;
use crate::scalar::Scalar;
use crate::spatial::{estimate_normal, NnIndex};
use crate::taxonomy::{ClassWeights, SemanticClass};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassM3c2 {
    /// Signed median of the inlier distances; `None` without inliers.
    pub median: Option<f64>,
    pub inliers: usize,
    pub outliers: usize,
}

fn cylinder_mean<T: Scalar>(
    index: &NnIndex<T>,
    at: Vec3<T>,
    n: Vec3<T>,
    p: &M3c2Params,
) -> Option<[f64; 3]> {
    let hits = index.within_cylinder(
        at,
        n,
        T::from_f64_lossy(p.projection_radius_m),
        T::from_f64_lossy(p.max_depth_m),
    );
    if hits.is_empty() {
        return None;
    }
    let mut sum = [0.0; 3];
    for &i in &hits {
        let q = index.point(i).to_f64();
        for k in 0..3 {
            sum[k] += q[k];
        }
    }
    Some(sum.map(|s| s / hits.len() as f64))
}

/// Median of a sample; the mean of the two middle values for even sizes.
pub fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    })
}

/// Signed M3C2 distance at every point of `rc` (the core points), in order.
/// `None` marks an outlier: no normal, or an empty cylinder on either side.
pub fn m3c2_core_distances<T: Scalar>(
    rc: &LabeledPointCloud<T>,
    sc: &LabeledPointCloud<T>,
    params: &M3c2Params,
) -> Vec<Option<f64>> {
    if rc.is_empty() {
        return Vec::new();
    }
    let ir = NnIndex::from_cloud(rc).expect("non-empty");
    let Ok(is) = NnIndex::from_cloud(sc) else {
        return vec![None; rc.len()];
    };
    let scale = T::from_f64_lossy(params.normal_scale_m);
    rc.points
        .par_iter()
        .map(|p| {
            let n = estimate_normal(&ir, p.pos, scale)?;
            let mr = cylinder_mean(&ir, p.pos, n, params)?;
            let ms = cylinder_mean(&is, p.pos, n, params)?;
            let n = n.to_f64();
            Some((0..3).map(|k| n[k] * (ms[k] - mr[k])).sum())
        })
        .collect()
}

pub fn m3c2_class_distance<T: Scalar>(
    rc: &LabeledPointCloud<T>,
    sc: &LabeledPointCloud<T>,
    params: &M3c2Params,
) -> ClassM3c2 {
    let d = m3c2_core_distances(rc, sc, params);
    let total = d.len();
    let inl: Vec<f64> = d.into_iter().flatten().collect();
    ClassM3c2 {
        inliers: inl.len(),
        outliers: total - inl.len(),
        median: median(inl),
    }
}

/// Weighted mean of absolute class medians over the positively weighted
/// classes, with weights renormalized over classes whose median is defined.
/// Returns the distance and the per-class results it was built from.
pub fn mm3c2_distance<T: Scalar>(
    r: &LabeledPointCloud<T>,
    s: &LabeledPointCloud<T>,
    weights: &ClassWeights,
    params: &M3c2Params,
) -> Result<(f64, BTreeMap<SemanticClass, ClassM3c2>)> {
    let mut rp = r.partition_by_class();
    let mut sp = s.partition_by_class();
    let mut per_class = BTreeMap::new();
    for (c, _) in weights.weighted_classes() {
        let rc = rp.remove(&c).unwrap_or_default();
        let sc = sp.remove(&c).unwrap_or_default();
        per_class.insert(c, m3c2_class_distance(&rc, &sc, params));
    }
    let d = weighted_abs_medians(&per_class, weights).ok_or_else(|| {
        Error::NoComparableContent(
            "no weighted class has an M3C2 inlier; check labels and class_weights".into(),
        )
    })?;
    Ok((d, per_class))
}

/// The aggregation step of [`mm3c2_distance`], `None` when no weighted class
/// has a median.
pub fn weighted_abs_medians(
    per_class: &BTreeMap<SemanticClass, ClassM3c2>,
    weights: &ClassWeights,
) -> Option<f64> {
    let (mut acc, mut wsum) = (0.0, 0.0);
    for (c, w) in weights.weighted_classes() {
        if let Some(m) = per_class.get(&c).and_then(|r| r.median) {
            acc += w * m.abs();
            wsum += w;
        }
    }
    (wsum > 0.0).then(|| acc / wsum)
}
