use rayon::prelude::*;

use crate::cloud::LabeledPointCloud;
use crate::error::{Error, Result};
use crate::metric::C2cMode;
use crate::scalar::Scalar;
use crate::spatial::NnIndex;

/// Nearest-neighbor distance from each point of `from` to `to`, in order.
fn nearest_distances<T: Scalar>(from: &LabeledPointCloud<T>, to: &NnIndex<T>) -> Vec<f64> {
    from.points
        .par_iter()
        .map(|p| to.nearest(p.pos).1.to_f64_lossless())
        .collect()
}

fn directed_max<T: Scalar>(from: &LabeledPointCloud<T>, to: &LabeledPointCloud<T>) -> Result<f64> {
    let index = NnIndex::from_cloud(to)?;
    Ok(nearest_distances(from, &index)
        .into_iter()
        .fold(0.0, f64::max))
}

/// Cloud-to-cloud distance from `r` to `s`. Labels are ignored.
pub fn c2c_distance<T: Scalar>(
    r: &LabeledPointCloud<T>,
    s: &LabeledPointCloud<T>,
    mode: C2cMode,
) -> Result<f64> {
    if r.is_empty() {
        return Err(Error::EmptyInput("real cloud"));
    }
    if s.is_empty() {
        return Err(Error::EmptyInput("synthetic cloud"));
    }
    match mode {
        C2cMode::DirectedMax => directed_max(r, s),
        C2cMode::DirectedMean => {
            let index = NnIndex::from_cloud(s)?;
            let d = nearest_distances(r, &index);
            Ok(d.iter().sum::<f64>() / d.len() as f64)
        }
        C2cMode::SymmetricMax => Ok(directed_max(r, s)?.max(directed_max(s, r)?)),
    }
}
