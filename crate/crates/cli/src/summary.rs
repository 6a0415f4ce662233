//! `report`: flattens gap or evaluation reports into one CSV.

use std::path::{Path, PathBuf};

use dogss_core::dataset::{self, EvalReport};
use dogss_core::metric::{GapReport, SensitivityReport};
use dogss_core::{io, Error, Result, SemanticClass};
use serde::Serialize;

use crate::args::ReportArgs;
use crate::commands::parse_data;
use crate::manifest::Recorder;

enum Loaded {
    Gap(GapReport),
    Sensitivity(SensitivityReport),
    Eval(EvalReport),
}

impl Loaded {
    fn schema(&self) -> &'static str {
        match self {
            Loaded::Gap(_) | Loaded::Sensitivity(_) => "gap",
            Loaded::Eval(_) => "eval",
        }
    }
}

fn load(bytes: &[u8], path: &Path) -> Result<Loaded> {
    let value: serde_json::Value = parse_data(bytes, path)?;
    if let Ok(r) = serde_json::from_value::<GapReport>(value.clone()) {
        return Ok(Loaded::Gap(r));
    }
    if let Ok(r) = serde_json::from_value::<SensitivityReport>(value.clone()) {
        return Ok(Loaded::Sensitivity(r));
    }
    if let Ok(r) = serde_json::from_value::<EvalReport>(value) {
        return Ok(Loaded::Eval(r));
    }
    Err(Error::Format(format!(
        "{}: not a gap, sensitivity or evaluation report",
        path.display()
    )))
}

#[derive(Serialize)]
struct Series {
    name: String,
    x_label: &'static str,
    points: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct PlotData {
    series: Vec<Series>,
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.into(),
            source,
        },
        other => Error::Format(format!("{}: {other:?}", path.display())),
    }
}

fn num(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn eval_classes() -> impl Iterator<Item = SemanticClass> {
    SemanticClass::ALL
        .into_iter()
        .filter(|c| *c != SemanticClass::Noise)
}

struct GapRow {
    source: String,
    offset_m: Option<f64>,
    report: GapReport,
}

fn gap_rows(loaded: Vec<(PathBuf, Loaded)>) -> Vec<GapRow> {
    let mut rows = Vec::new();
    for (path, l) in loaded {
        let source = path.display().to_string();
        match l {
            Loaded::Gap(report) => rows.push(GapRow {
                source,
                offset_m: None,
                report,
            }),
            Loaded::Sensitivity(s) => {
                for row in s.rows {
                    let o = row.offset;
                    let offset_m = match s.direction {
                        Some(d) => o[0] * d[0] + o[1] * d[1] + o[2] * d[2],
                        None => (o[0] * o[0] + o[1] * o[1] + o[2] * o[2]).sqrt(),
                    };
                    rows.push(GapRow {
                        source: source.clone(),
                        offset_m: Some(offset_m),
                        report: row.report,
                    });
                }
            }
            Loaded::Eval(_) => unreachable!("schemas checked"),
        }
    }
    rows
}

fn write_gap(rows: &[GapRow], out: &Path) -> Result<PlotData> {
    let mut w = csv::Writer::from_path(out).map_err(|e| csv_err(out, e))?;
    w.write_record([
        "source", "offset_m", "m", "d", "d_MM3C2", "d_C2C", "mIoU", "f_mIoU",
    ])
    .map_err(|e| csv_err(out, e))?;
    for r in rows {
        let g = &r.report;
        w.write_record([
            r.source.clone(),
            num(r.offset_m),
            g.m_dogss_pcl.to_string(),
            g.d.to_string(),
            g.d_mm3c2.to_string(),
            g.d_c2c.to_string(),
            g.miou.to_string(),
            g.f_miou.to_string(),
        ])
        .map_err(|e| csv_err(out, e))?;
    }
    w.flush().map_err(|source| Error::Io {
        path: out.into(),
        source,
    })?;

    let with_offset: Vec<&GapRow> = rows.iter().filter(|r| r.offset_m.is_some()).collect();
    let series = |name: &str, f: fn(&GapReport) -> f64| Series {
        name: name.into(),
        x_label: "offset_m",
        points: with_offset
            .iter()
            .map(|r| [r.offset_m.unwrap_or_default(), f(&r.report)])
            .collect(),
    };
    Ok(PlotData {
        series: if with_offset.is_empty() {
            Vec::new()
        } else {
            vec![series("m", |g| g.m_dogss_pcl), series("mIoU", |g| g.miou)]
        },
    })
}

fn write_eval(reports: &[(String, EvalReport)], out: &Path) -> Result<PlotData> {
    let evals: Vec<EvalReport> = reports.iter().map(|(_, r)| r.clone()).collect();
    let series = dataset::ratio_series(&evals).map_err(|e| match e {
        Error::Config { key, message } => {
            let i: Option<usize> = key
                .strip_prefix("reports[")
                .and_then(|k| k.split(']').next())
                .and_then(|k| k.parse().ok());
            let file = i
                .and_then(|i| reports.get(i))
                .map_or(key.clone(), |(s, _)| s.clone());
            Error::Config {
                key: "synthetic_ratio".into(),
                message: format!("{message} in {file}"),
            }
        }
        other => other,
    })?;

    let mut w = csv::Writer::from_path(out).map_err(|e| csv_err(out, e))?;
    let mut header = vec![
        "source".to_string(),
        "synthetic_ratio".into(),
        "miou".into(),
    ];
    header.extend(eval_classes().map(|c| format!("iou_{}", c.name())));
    w.write_record(&header).map_err(|e| csv_err(out, e))?;
    for (source, r) in reports {
        let mut rec = vec![source.clone(), num(r.synthetic_ratio), r.miou.to_string()];
        rec.extend(eval_classes().map(|c| r.per_class.get(&c).map_or(0.0, |e| e.iou).to_string()));
        w.write_record(&rec).map_err(|e| csv_err(out, e))?;
    }
    let mut corr = vec![
        "corr".to_string(),
        String::new(),
        num(series.miou.correlation),
    ];
    corr.extend(eval_classes().map(|c| num(series.per_class.get(&c).and_then(|e| e.correlation))));
    w.write_record(&corr).map_err(|e| csv_err(out, e))?;
    w.flush().map_err(|source| Error::Io {
        path: out.into(),
        source,
    })?;

    let mut plot = vec![Series {
        name: "mIoU".into(),
        x_label: "synthetic_ratio",
        points: series
            .ratios
            .iter()
            .zip(&series.miou.values)
            .map(|(&x, &y)| [x, y])
            .collect(),
    }];
    for (c, e) in &series.per_class {
        plot.push(Series {
            name: c.name().into(),
            x_label: "synthetic_ratio",
            points: series
                .ratios
                .iter()
                .zip(&e.values)
                .map(|(&x, &y)| [x, y])
                .collect(),
        });
    }
    Ok(PlotData { series: plot })
}

pub fn report(a: &ReportArgs) -> Result<()> {
    let mut rec = Recorder::new("report", None);
    let mut loaded = Vec::new();
    for p in &a.reports {
        let bytes = rec.input("report", p)?;
        loaded.push((p.clone(), load(&bytes, p)?));
    }
    let schema = loaded[0].1.schema();
    let odd: Vec<String> = loaded
        .iter()
        .filter(|(_, l)| l.schema() != schema)
        .map(|(p, _)| p.display().to_string())
        .collect();
    if !odd.is_empty() {
        return Err(Error::Format(format!(
            "cannot mix report kinds: {} hold {schema} reports but {} do not",
            a.reports[0].display(),
            odd.join(", ")
        )));
    }

    let plot = if schema == "gap" {
        write_gap(&gap_rows(loaded), &a.output)?
    } else {
        let evals: Vec<(String, EvalReport)> = loaded
            .into_iter()
            .map(|(p, l)| match l {
                Loaded::Eval(r) => (p.display().to_string(), r),
                _ => unreachable!("schemas checked"),
            })
            .collect();
        write_eval(&evals, &a.output)?
    };
    rec.output("csv", &a.output)?;
    if let Some(p) = &a.plot_data {
        io::write_json(&plot, p)?;
        rec.output("plot_data", p)?;
    }
    rec.finish(&a.output)?;
    Ok(())
}
