//! Dataset tooling: spatial splits, real/synthetic ratio mixing and
//! segmentation statistics over externally produced predictions.

mod eval;
mod mix;
mod split;

pub use eval::{
    evaluate_segmentation, most_misclassified, parse_labels, ratio_correlation, ratio_series,
    read_labels, ClassEval, EvalReport, Misclassification, RatioSeries, SeriesEntry,
};
pub use mix::{mix, MixMetadata, Provenance, ProvenanceRun, RatioMix};
pub use split::{polygon_contains, split, Region, SplitSpec};
