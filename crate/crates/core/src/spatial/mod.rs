//! Spatial acceleration structures and local geometry estimators.

pub mod bvh;
pub mod kdtree;
pub mod normal;
pub mod voxel;

pub use bvh::{intersect_triangle, raycast_brute_force, Bvh, Hit, MIN_RAY_T};
pub use kdtree::{in_cylinder, NnIndex};
pub use normal::{estimate_normal, orient};
pub use voxel::{aligned_origin, voxel_key, voxelize, VoxelGrid, VoxelKey};

use crate::cloud::LabeledPointCloud;
use crate::error::Result;
use crate::scalar::Scalar;

/// Index over the positions of a non-empty cloud.
pub fn build_index<T: Scalar>(cloud: &LabeledPointCloud<T>) -> Result<NnIndex<T>> {
    NnIndex::from_cloud(cloud)
}
