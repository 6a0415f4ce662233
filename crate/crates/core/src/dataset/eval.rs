use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::LabeledPointCloud;
use crate::error::{Error, Result};
use crate::io::coerce_label;
use crate::scalar::Scalar;
use crate::taxonomy::SemanticClass;

const N: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassEval {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    /// `tp / (tp + fp + fn)`, 0 for absent classes.
    pub iou: f64,
    /// False when the class appears in neither ground truth nor predictions.
    pub present: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Misclassification {
    pub true_class: SemanticClass,
    pub predicted: SemanticClass,
    pub count: u64,
    /// Share of this class's wrong predictions that went to `predicted`.
    pub proportion: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Synthetic share of the training data behind the predictions, if known.
    pub synthetic_ratio: Option<f64>,
    pub points: u64,
    pub per_class: BTreeMap<SemanticClass, ClassEval>,
    /// Unweighted mean IoU over every class except Noise.
    pub miou: f64,
    /// `confusion[t][p]`: points of true class id `t + 1` predicted as id `p + 1`.
    pub confusion: Vec<Vec<u64>>,
    pub most_misclassified: Vec<Misclassification>,
}

/// Tallies per-class statistics of `predictions` against the labels of
/// `ground_truth`, matched by index.
pub fn evaluate_segmentation<T: Scalar>(
    ground_truth: &LabeledPointCloud<T>,
    predictions: &[SemanticClass],
) -> Result<EvalReport> {
    if ground_truth.len() != predictions.len() {
        return Err(Error::LengthMismatch {
            left: ground_truth.len(),
            right: predictions.len(),
        });
    }
    let confusion = ground_truth
        .points
        .par_iter()
        .zip(predictions.par_iter())
        .fold(
            || [[0u64; N]; N],
            |mut m, (g, p)| {
                m[g.class.id() as usize - 1][p.id() as usize - 1] += 1;
                m
            },
        )
        .reduce(
            || [[0u64; N]; N],
            |mut a, b| {
                for i in 0..N {
                    for j in 0..N {
                        a[i][j] += b[i][j];
                    }
                }
                a
            },
        );
    Ok(report_from_confusion(&confusion, None))
}

fn report_from_confusion(m: &[[u64; N]; N], synthetic_ratio: Option<f64>) -> EvalReport {
    let mut per_class = BTreeMap::new();
    for c in SemanticClass::ALL {
        let k = c.id() as usize - 1;
        let tp = m[k][k];
        let fn_: u64 = m[k].iter().sum::<u64>() - tp;
        let fp: u64 = (0..N).map(|t| m[t][k]).sum::<u64>() - tp;
        let denom = tp + fp + fn_;
        let iou = if denom > 0 {
            tp as f64 / denom as f64
        } else {
            0.0
        };
        per_class.insert(
            c,
            ClassEval {
                tp,
                fp,
                fn_,
                iou,
                present: denom > 0,
            },
        );
    }
    let scored: Vec<f64> = per_class
        .iter()
        .filter(|(c, _)| **c != SemanticClass::Noise)
        .map(|(_, e)| e.iou)
        .collect();
    let miou = scored.iter().sum::<f64>() / scored.len() as f64;
    let mut report = EvalReport {
        synthetic_ratio,
        points: m.iter().flatten().sum(),
        per_class,
        miou,
        confusion: m.iter().map(|r| r.to_vec()).collect(),
        most_misclassified: Vec::new(),
    };
    report.most_misclassified = most_misclassified(&report);
    report
}

/// For each class with at least one error, the most frequent wrong label
/// (lowest id on ties) and its share of that class's errors.
pub fn most_misclassified(eval: &EvalReport) -> Vec<Misclassification> {
    let mut out = Vec::new();
    for (t, row) in eval.confusion.iter().enumerate() {
        let wrong: u64 = row
            .iter()
            .enumerate()
            .filter(|(p, _)| *p != t)
            .map(|(_, v)| v)
            .sum();
        if wrong == 0 {
            continue;
        }
        let (p, count) = row.iter().enumerate().filter(|(p, _)| *p != t).fold(
            (usize::MAX, 0u64),
            |best, (p, &v)| if v > best.1 { (p, v) } else { best },
        );
        out.push(Misclassification {
            true_class: SemanticClass::ALL[t],
            predicted: SemanticClass::ALL[p],
            count,
            proportion: count as f64 / wrong as f64,
        });
    }
    out
}

/// Pearson correlation between ratios and values. `None` with fewer than two
/// distinct ratios or when either series is constant.
pub fn ratio_correlation(series: &[(f64, f64)]) -> Option<f64> {
    let n = series.len() as f64;
    if series.len() < 2 {
        return None;
    }
    let mx = series.iter().map(|s| s.0).sum::<f64>() / n;
    let my = series.iter().map(|s| s.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in series {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Per-class and mIoU values across several evaluations with their
/// correlation against the synthetic ratio.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioSeries {
    pub ratios: Vec<f64>,
    pub per_class: BTreeMap<SemanticClass, SeriesEntry>,
    pub miou: SeriesEntry,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesEntry {
    pub values: Vec<f64>,
    pub correlation: Option<f64>,
}

impl SeriesEntry {
    fn new(ratios: &[f64], values: Vec<f64>) -> Self {
        let pairs: Vec<(f64, f64)> = ratios.iter().copied().zip(values.iter().copied()).collect();
        Self {
            correlation: ratio_correlation(&pairs),
            values,
        }
    }
}

/// Requires every report to carry its `synthetic_ratio`.
pub fn ratio_series(reports: &[EvalReport]) -> Result<RatioSeries> {
    let ratios = reports
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.synthetic_ratio
                .ok_or_else(|| Error::config(format!("reports[{i}].synthetic_ratio"), "missing"))
        })
        .collect::<Result<Vec<f64>>>()?;
    let per_class = SemanticClass::ALL
        .into_iter()
        .filter(|c| *c != SemanticClass::Noise)
        .map(|c| {
            let values = reports
                .iter()
                .map(|r| r.per_class.get(&c).map_or(0.0, |e| e.iou))
                .collect();
            (c, SeriesEntry::new(&ratios, values))
        })
        .collect();
    let miou = SeriesEntry::new(&ratios, reports.iter().map(|r| r.miou).collect());
    Ok(RatioSeries {
        ratios,
        per_class,
        miou,
    })
}

/// One integer label per line; `#` comments and blank lines are skipped and
/// out-of-range labels become Noise.
pub fn parse_labels(text: &str, source: &str) -> Result<Vec<SemanticClass>> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let loc = || format!("{source}:{}", ln + 1);
        let v: i64 = line.parse().map_err(|_| Error::Parse {
            location: loc(),
            message: format!("invalid label `{line}`"),
        })?;
        out.push(coerce_label(v, &loc));
    }
    Ok(out)
}

pub fn read_labels(path: &Path) -> Result<Vec<SemanticClass>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })?;
    parse_labels(&text, &path.display().to_string())
}
