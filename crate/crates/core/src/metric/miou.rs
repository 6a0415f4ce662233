use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cloud::LabeledPointCloud;
use crate::error::Result;
use crate::scalar::Scalar;
use crate::spatial::{aligned_origin, voxelize, VoxelKey};
use crate::taxonomy::{ClassWeights, SemanticClass};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassIou {
    pub iou: f64,
    pub intersection: usize,
    pub union: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoxelMiou {
    /// Grid anchor shared by both clouds.
    pub origin: [f64; 3],
    /// Classes occupying at least one voxel in either cloud.
    pub per_class: BTreeMap<SemanticClass, ClassIou>,
    /// Weighted mean over positively weighted classes with a non-empty union,
    /// weights renormalized over those classes; 0 when there are none.
    pub miou: f64,
}

fn class_sets(
    grid: &BTreeMap<VoxelKey, BTreeMap<SemanticClass, usize>>,
) -> BTreeMap<SemanticClass, BTreeSet<VoxelKey>> {
    let mut out: BTreeMap<SemanticClass, BTreeSet<VoxelKey>> = BTreeMap::new();
    for (k, classes) in grid {
        for c in classes.keys() {
            out.entry(*c).or_default().insert(*k);
        }
    }
    out
}

/// Per-class voxel-occupancy IoU on a grid anchored at the real cloud.
pub fn voxel_miou<T: Scalar>(
    r: &LabeledPointCloud<T>,
    s: &LabeledPointCloud<T>,
    edge: f64,
    weights: &ClassWeights,
) -> Result<VoxelMiou> {
    let edge_t = T::from_f64_lossy(edge);
    let anchor = if r.is_empty() { s } else { r };
    let origin = aligned_origin(anchor, edge_t);
    let vr = class_sets(&voxelize(r, edge_t, origin)?.occupied);
    let vs = class_sets(&voxelize(s, edge_t, origin)?.occupied);
    let empty = BTreeSet::new();

    let mut per_class = BTreeMap::new();
    for c in SemanticClass::ALL {
        let a = vr.get(&c).unwrap_or(&empty);
        let b = vs.get(&c).unwrap_or(&empty);
        let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        let intersection = small.iter().filter(|k| large.contains(*k)).count();
        let union = a.len() + b.len() - intersection;
        if union > 0 {
            per_class.insert(
                c,
                ClassIou {
                    iou: intersection as f64 / union as f64,
                    intersection,
                    union,
                },
            );
        }
    }
    Ok(VoxelMiou {
        origin: origin.to_f64(),
        miou: weighted_miou(&per_class, weights),
        per_class,
    })
}

pub fn weighted_miou(per_class: &BTreeMap<SemanticClass, ClassIou>, weights: &ClassWeights) -> f64 {
    let (mut acc, mut wsum) = (0.0, 0.0);
    for (c, w) in weights.weighted_classes() {
        if let Some(r) = per_class.get(&c) {
            acc += w * r.iou;
            wsum += w;
        }
    }
    if wsum > 0.0 {
        acc / wsum
    } else {
        0.0
    }
}
