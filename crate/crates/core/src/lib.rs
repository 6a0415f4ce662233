//! Domain-gap measurement between a real-world labeled point cloud and a
//! synthetic one of the same scene.
//!
//! The crate combines a cloud-to-cloud distance, class-wise M3C2 distances
//! and voxel IoU into a single score in `[0, 1)` (lower is better), and ships
//! the tooling around it: a labeled LiDAR scan simulator over class-tagged
//! meshes, range noise, dataset mixing and spatial splits, and segmentation
//! statistics over externally produced predictions.
//!
//! Geometry is generic over [`Scalar`] (`f32` or `f64`); the aliases below fix
//! it to `f64`, which is what the file formats and reports use.

pub mod cloud;
pub mod config;
pub mod dataset;
pub mod error;
pub mod geom;
pub mod io;
pub mod mesh;
pub mod metric;
pub mod scalar;
pub mod simulate;
pub mod spatial;
pub mod taxonomy;

pub use cloud::{LabeledPoint, LabeledPointCloud};
pub use config::RunConfig;
pub use dataset::{EvalReport, RatioMix, SplitSpec};
pub use error::{Error, ErrorKind, Result};
pub use geom::{Aabb, Vec3};
pub use io::{CloudFileFormat, ScanCloud};
pub use mesh::{ClassedMesh, Triangle};
pub use metric::{dogss_pcl, GapReport, MetricParams};
pub use scalar::Scalar;
pub use simulate::{NoiseModel, ScanConfig, Trajectory};
pub use taxonomy::{
    default_weights, map_class, ClassMapping, ClassWeights, SemanticClass, Standard,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Point = Vec3<f64>;
pub type Cloud = LabeledPointCloud<f64>;
pub type Cloud32 = LabeledPointCloud<f32>;
pub type Mesh = ClassedMesh<f64>;
pub type Index = spatial::NnIndex<f64>;
