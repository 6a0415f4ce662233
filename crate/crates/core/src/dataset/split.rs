use serde::{Deserialize, Serialize};

use crate::cloud::LabeledPointCloud;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A named xy region: either `rect: [xmin, ymin, xmax, ymax]` or a
/// `polygon` of at least three `[x, y]` vertices. Both are closed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rect: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSpec {
    pub regions: Vec<Region>,
}

fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        / 2.0
}

fn on_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> bool {
    let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    cross == 0.0
        && p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

/// Even-odd point-in-polygon with the boundary counted as inside.
pub fn polygon_contains(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if on_segment(p, a, b) {
            return true;
        }
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

impl Region {
    pub fn rect(name: impl Into<String>, xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Self {
        Self {
            name: name.into(),
            rect: Some([xmin, ymin, xmax, ymax]),
            polygon: None,
        }
    }

    pub fn polygon(name: impl Into<String>, vertices: Vec<[f64; 2]>) -> Self {
        Self {
            name: name.into(),
            rect: None,
            polygon: Some(vertices),
        }
    }

    fn validate(&self, i: usize) -> Result<()> {
        let key = |f: &str| format!("split.regions[{i}].{f}");
        match (&self.rect, &self.polygon) {
            (Some(r), None) => {
                if !r.iter().all(|v| v.is_finite()) || !(r[0] < r[2] && r[1] < r[3]) {
                    return Err(Error::config(
                        key("rect"),
                        format!("need finite xmin < xmax and ymin < ymax, got {r:?}"),
                    ));
                }
            }
            (None, Some(p)) => {
                if p.len() < 3
                    || !p.iter().flatten().all(|v| v.is_finite())
                    || polygon_area(p) == 0.0
                {
                    return Err(Error::config(
                        key("polygon"),
                        "need at least three finite vertices enclosing a non-zero area",
                    ));
                }
            }
            _ => {
                return Err(Error::config(
                    key("rect"),
                    "give exactly one of `rect` or `polygon`",
                ))
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        match (&self.rect, &self.polygon) {
            (Some(r), _) => x >= r[0] && x <= r[2] && y >= r[1] && y <= r[3],
            (_, Some(p)) => polygon_contains(p, [x, y]),
            _ => false,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if self.regions.is_empty() {
            return Err(Error::config(
                "split.regions",
                "at least one region is required",
            ));
        }
        for (i, r) in self.regions.iter().enumerate() {
            r.validate(i)?;
            if self.regions[..i].iter().any(|o| o.name == r.name) {
                return Err(Error::config(
                    format!("split.regions[{i}].name"),
                    format!("duplicate region name `{}`", r.name),
                ));
            }
        }
        Ok(())
    }

    /// Index of the first region containing `(x, y)`.
    pub fn region_of(&self, x: f64, y: f64) -> Option<usize> {
        self.regions.iter().position(|r| r.contains(x, y))
    }
}

/// Points per region, in region order; points outside every region are dropped.
pub fn split<T: Scalar>(
    cloud: &LabeledPointCloud<T>,
    spec: &SplitSpec,
) -> Result<Vec<(String, LabeledPointCloud<T>)>> {
    spec.validate()?;
    let mut out: Vec<(String, LabeledPointCloud<T>)> = spec
        .regions
        .iter()
        .map(|r| {
            (
                r.name.clone(),
                LabeledPointCloud::new(Vec::new()).with_note(cloud.frame_note.clone()),
            )
        })
        .collect();
    for p in &cloud.points {
        if let Some(i) = spec.region_of(p.pos.x.to_f64_lossless(), p.pos.y.to_f64_lossless()) {
            out[i].1.points.push(*p);
        }
    }
    Ok(out)
}
