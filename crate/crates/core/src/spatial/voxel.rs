//! Class-aware voxel occupancy.

use std::collections::{BTreeMap, BTreeSet};

use crate::cloud::LabeledPointCloud;
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::scalar::Scalar;
use crate::taxonomy::SemanticClass;

pub type VoxelKey = [i64; 3];

/// Half-open cubic cells `[k*edge, (k+1)*edge)` measured from `origin`.
#[derive(Clone, Debug, PartialEq)]
pub struct VoxelGrid<T = f64> {
    pub origin: Vec3<T>,
    pub edge: T,
    /// Voxel -> (class -> number of points of that class in the voxel).
    pub occupied: BTreeMap<VoxelKey, BTreeMap<SemanticClass, usize>>,
}

/// Cell of `p` in a grid anchored at `origin`.
#[inline]
pub fn voxel_key<T: Scalar>(p: Vec3<T>, origin: Vec3<T>, edge: T) -> VoxelKey {
    let k = |v: T, o: T| ((v - o) / edge).floor().to_i64().unwrap_or(i64::MAX);
    [k(p.x, origin.x), k(p.y, origin.y), k(p.z, origin.z)]
}

/// Grid anchor: the bounding-box minimum floored onto multiples of `edge`.
pub fn aligned_origin<T: Scalar>(cloud: &LabeledPointCloud<T>, edge: T) -> Vec3<T> {
    if cloud.is_empty() {
        return Vec3::zero();
    }
    let min = cloud.bounds().min;
    Vec3::new(
        (min.x / edge).floor() * edge,
        (min.y / edge).floor() * edge,
        (min.z / edge).floor() * edge,
    )
}

fn check_edge<T: Scalar>(edge: T) -> Result<()> {
    if edge > T::zero() && edge.is_finite() {
        Ok(())
    } else {
        Err(Error::config(
            "voxel_size_m",
            format!("voxel edge must be positive, got {edge}"),
        ))
    }
}

pub fn voxelize<T: Scalar>(
    cloud: &LabeledPointCloud<T>,
    edge: T,
    origin: Vec3<T>,
) -> Result<VoxelGrid<T>> {
    check_edge(edge)?;
    let mut occupied: BTreeMap<VoxelKey, BTreeMap<SemanticClass, usize>> = BTreeMap::new();
    for p in &cloud.points {
        *occupied
            .entry(voxel_key(p.pos, origin, edge))
            .or_default()
            .entry(p.class)
            .or_insert(0) += 1;
    }
    Ok(VoxelGrid {
        origin,
        edge,
        occupied,
    })
}

impl<T: Scalar> VoxelGrid<T> {
    /// Voxels holding at least one point of `class`.
    pub fn class_voxels(&self, class: SemanticClass) -> BTreeSet<VoxelKey> {
        self.occupied
            .iter()
            .filter(|(_, m)| m.contains_key(&class))
            .map(|(k, _)| *k)
            .collect()
    }

    pub fn total_count(&self) -> usize {
        self.occupied.values().flat_map(|m| m.values()).sum()
    }
}
