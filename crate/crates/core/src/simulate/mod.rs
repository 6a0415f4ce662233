//! Labeled LiDAR scans of a classed mesh, and Gaussian range noise.

mod noise;
mod scan;
mod trajectory;

pub use noise::{apply_range_noise, NoiseModel};
pub use scan::{scan_returns, simulate_scan, Return, ScanConfig};
pub use trajectory::{Pose, Trajectory};
