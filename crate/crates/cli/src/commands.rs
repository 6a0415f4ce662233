use std::path::{Path, PathBuf};

use dogss_core::config::{MixSection, NoiseSection};
use dogss_core::dataset::{self, RatioMix, SplitSpec};
use dogss_core::io::{self, CloudFileFormat, ScanCloud};
use dogss_core::metric::{self, SensitivityReport};
use dogss_core::simulate::{self, NoiseModel, Trajectory};
use dogss_core::spatial::Bvh;
use dogss_core::{ClassWeights, Error, Result, RunConfig, Vec3};
use log::{info, warn};
use serde::de::DeserializeOwned;

use crate::args::{
    CompareArgs, EvalSegArgs, MetricFlags, MixArgs, NoiseArgs, SimulateArgs, SplitArgs,
};
use crate::manifest::Recorder;

fn utf8<'a>(bytes: &'a [u8], path: &Path) -> Result<&'a str> {
    std::str::from_utf8(bytes).map_err(|e| Error::Parse {
        location: format!("{}: byte {}", path.display(), e.valid_up_to()),
        message: "not UTF-8 text".into(),
    })
}

/// JSON data file (not configuration): schema errors are parse errors.
pub fn parse_data<T: DeserializeOwned>(bytes: &[u8], path: &Path) -> Result<T> {
    io::parse_json(utf8(bytes, path)?).map_err(|e| match e {
        Error::Config { key, message } => Error::Parse {
            location: format!("{}: {key}", path.display()),
            message,
        },
        other => other,
    })
}

fn load_config(path: Option<&Path>, rec: &mut Recorder) -> Result<RunConfig> {
    match path {
        Some(p) => {
            let bytes = rec.input("config", p)?;
            RunConfig::from_json_str(utf8(&bytes, p)?)
        }
        None => Ok(RunConfig::default()),
    }
}

fn load_scan(rec: &mut Recorder, role: &str, path: &Path) -> Result<(ScanCloud, CloudFileFormat)> {
    let bytes = rec.input(role, path)?;
    let format = CloudFileFormat::detect(&bytes);
    let scan = io::parse_cloud_bytes(&bytes, Some(format), &path.display().to_string())?;
    info!("{}: {} points", path.display(), scan.cloud.len());
    Ok((scan, format))
}

fn is_ply(f: CloudFileFormat) -> bool {
    matches!(f, CloudFileFormat::PlyAscii | CloudFileFormat::PlyBinaryLe)
}

/// Explicit format, else the input's format when the output extension
/// names the same family, else the extension's default.
fn output_format(
    out: &Path,
    explicit: Option<CloudFileFormat>,
    input: Option<CloudFileFormat>,
) -> Result<CloudFileFormat> {
    if let Some(f) = explicit {
        return Ok(f);
    }
    let by_ext = CloudFileFormat::from_extension(out)?;
    Ok(match input {
        Some(i) if is_ply(i) == is_ply(by_ext) => i,
        _ => by_ext,
    })
}

fn apply_metric_flags(cfg: &mut RunConfig, f: &MetricFlags, rec: &mut Recorder) -> Result<()> {
    let m = &mut cfg.metric;
    macro_rules! set {
        ($($flag:ident => $($field:ident).+),* $(,)?) => {
            $(if let Some(v) = f.$flag { m.$($field).+ = v; })*
        };
    }
    set!(
        voxel_size_m => voxel_size_m,
        lambda1 => lambda1,
        lambda2 => lambda2,
        lambda3 => lambda3,
        alpha => alpha,
        epsilon => epsilon,
        c2c_mode => c2c_mode,
        eq3_weight_mode => eq3_weight_mode,
        lambda_validation => lambda_validation,
        normal_scale_m => m3c2.normal_scale_m,
        projection_radius_m => m3c2.projection_radius_m,
        max_depth_m => m3c2.max_depth_m,
    );
    if let Some(p) = &f.class_weights {
        let bytes = rec.input("class_weights", p)?;
        m.class_weights =
            io::parse_json::<ClassWeights>(utf8(&bytes, p)?).map_err(|e| match e {
                Error::Config { key, message } => Error::Config {
                    key: format!("class_weights{}", key.trim_start_matches('.')),
                    message,
                },
                other => other,
            })?;
    }
    Ok(())
}

fn unit_direction(d: [f64; 3]) -> Result<[f64; 3]> {
    Vec3::from_f64(d)
        .normalized()
        .filter(|v: &Vec3<f64>| v.is_finite())
        .map(|v| v.to_array())
        .ok_or_else(|| Error::Config {
            key: "direction".into(),
            message: "must be a non-zero finite vector".into(),
        })
}

pub fn compare(a: &CompareArgs) -> Result<()> {
    let mut rec = Recorder::new("compare", None);
    let mut cfg = load_config(a.metric.config.as_deref(), &mut rec)?;
    apply_metric_flags(&mut cfg, &a.metric, &mut rec)?;
    cfg.validate()?;
    let direction = a
        .offset
        .as_ref()
        .map(|_| unit_direction(a.direction.unwrap_or([1.0, 1.0, 1.0])))
        .transpose()?;
    rec.config(&cfg);

    let (r, _) = load_scan(&mut rec, "real", &a.real)?;
    let (s, _) = load_scan(&mut rec, "synthetic", &a.synthetic)?;
    match (&a.offset, direction) {
        (Some(offsets), Some(dir)) => {
            let vs: Vec<Vec3<f64>> = offsets.iter().map(|&o| Vec3::from_f64(dir) * o).collect();
            let rows = metric::offset_sensitivity(&r.cloud, &s.cloud, &vs, &cfg.metric)?;
            for row in &rows {
                info!("offset {:?}: m = {:.4}", row.offset, row.report.m_dogss_pcl);
            }
            io::write_json(
                &SensitivityReport {
                    direction: Some(dir),
                    rows,
                },
                &a.output,
            )?;
        }
        _ => {
            let report = metric::dogss_pcl(&r.cloud, &s.cloud, &cfg.metric)?;
            info!(
                "m = {:.4}, d = {:.4}, mIoU = {:.4}",
                report.m_dogss_pcl, report.d, report.miou
            );
            io::write_json(&report, &a.output)?;
        }
    }
    rec.output("report", &a.output)?;
    rec.finish(&a.output)?;
    Ok(())
}

pub fn simulate(a: &SimulateArgs) -> Result<()> {
    let mut rec = Recorder::new("simulate", Some(a.seed));
    let mut cfg = load_config(a.config.as_deref(), &mut rec)?;
    let mut scan = cfg.scan.clone().unwrap_or_default();
    if let Some(v) = a.channels {
        scan.channels = v;
    }
    if let Some(v) = a.vertical_fov_deg {
        scan.vertical_fov_deg = v;
    }
    if let Some(v) = a.rotation_rate_hz {
        scan.rotation_rate_hz = v;
    }
    if let Some(v) = a.points_per_second {
        scan.points_per_second = v;
    }
    if let Some(v) = a.max_range_m {
        scan.max_range_m = v;
    }
    if let Some(v) = a.sensor_offset_m {
        scan.sensor_offset_m = v;
    }
    cfg.scan = Some(scan.clone());
    if let Some(sigma_m) = a.sigma {
        cfg.noise = Some(NoiseSection { sigma_m });
    }
    cfg.seed = Some(a.seed);
    cfg.validate()?;
    let format = output_format(&a.output, a.format, None)?;
    rec.config(&cfg);

    let mesh_bytes = rec.input("mesh", &a.mesh)?;
    let load =
        io::parse_mesh_str::<f64>(utf8(&mesh_bytes, &a.mesh)?, &a.mesh.display().to_string())?;
    let traj_bytes = rec.input("trajectory", &a.trajectory)?;
    let trajectory: Trajectory = parse_data(&traj_bytes, &a.trajectory)?;
    info!(
        "{} triangles, {} poses",
        load.mesh.triangles.len(),
        trajectory.samples().len()
    );

    let bvh = Bvh::build(load.mesh);
    let mut out = simulate::simulate_scan(&bvh, &trajectory, &scan)?;
    if let Some(n) = cfg.noise.filter(|n| n.sigma_m > 0.0) {
        out = simulate::apply_range_noise(
            &out,
            &NoiseModel {
                sigma_m: n.sigma_m,
                seed: a.seed,
            },
        )?;
    }
    info!("{} points", out.cloud.len());
    io::write_scan(&out, &a.output, format)?;
    rec.output("cloud", &a.output)?;
    rec.finish(&a.output)?;
    Ok(())
}

pub fn noise(a: &NoiseArgs) -> Result<()> {
    let mut rec = Recorder::new("noise", Some(a.seed));
    let mut cfg = load_config(a.config.as_deref(), &mut rec)?;
    if let Some(sigma_m) = a.sigma {
        cfg.noise = Some(NoiseSection { sigma_m });
    }
    let sigma_m = cfg.noise.map(|n| n.sigma_m).ok_or_else(|| Error::Config {
        key: "noise.sigma_m".into(),
        message: "give --sigma or a `noise` config section".into(),
    })?;
    cfg.seed = Some(a.seed);
    cfg.validate()?;
    rec.config(&cfg);

    let (mut scan, in_format) = load_scan(&mut rec, "cloud", &a.input)?;
    let format = output_format(&a.output, a.format, Some(in_format))?;
    let stored = scan.origins.is_some();
    match (stored, a.origin) {
        (false, Some(o)) => scan.origins = Some(vec![Vec3::from_f64(o); scan.cloud.len()]),
        (true, Some(_)) => warn!(
            "{}: using stored ray origins, --origin ignored",
            a.input.display()
        ),
        _ => {}
    }
    let mut noisy = simulate::apply_range_noise(
        &scan,
        &NoiseModel {
            sigma_m,
            seed: a.seed,
        },
    )?;
    if !stored {
        noisy.origins = None;
    }
    io::write_scan(&noisy, &a.output, format)?;
    rec.output("cloud", &a.output)?;
    rec.finish(&a.output)?;
    Ok(())
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn mix(a: &MixArgs) -> Result<()> {
    let mut rec = Recorder::new("mix", Some(a.seed));
    let mut cfg = load_config(a.config.as_deref(), &mut rec)?;
    let missing = |k: &str| Error::Config {
        key: format!("mix.{k}"),
        message: format!("give --{} or set it in the config", k.replace('_', "-")),
    };
    let real_fraction = a
        .real_fraction
        .or(cfg.mix.map(|m| m.real_fraction))
        .ok_or_else(|| missing("real_fraction"))?;
    let target_count = a
        .target_count
        .or(cfg.mix.map(|m| m.target_count))
        .ok_or_else(|| missing("target_count"))?;
    cfg.mix = Some(MixSection {
        real_fraction,
        target_count,
    });
    cfg.seed = Some(a.seed);
    cfg.validate()?;
    rec.config(&cfg);

    let (r, rf) = load_scan(&mut rec, "real", &a.real)?;
    let (s, _) = load_scan(&mut rec, "synthetic", &a.synthetic)?;
    let format = output_format(&a.output, a.format, Some(rf))?;
    let spec = RatioMix {
        real_fraction,
        target_count,
        seed: a.seed,
    };
    let (cloud, meta) = dataset::mix(&r.cloud, &s.cloud, &spec)?;
    if meta.real_with_replacement || meta.synthetic_with_replacement {
        warn!("a source had fewer points than requested and was sampled with replacement");
    }
    io::write_cloud(&cloud, &a.output, format)?;
    let meta_path = sidecar(&a.output, ".provenance.json");
    io::write_json(&meta, &meta_path)?;
    rec.output("cloud", &a.output)?;
    rec.output("provenance", &meta_path)?;
    rec.finish(&a.output)?;
    Ok(())
}

fn check_region_name(i: usize, name: &str) -> Result<()> {
    let ok = !name.is_empty()
        && !name.starts_with('.')
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(Error::Config {
            key: format!("split.regions[{i}].name"),
            message: format!(
                "`{name}` is not usable as a file name (letters, digits, '-', '_', '.')"
            ),
        })
    }
}

pub fn split(a: &SplitArgs) -> Result<()> {
    let mut rec = Recorder::new("split", None);
    let mut cfg = load_config(a.config.as_deref(), &mut rec)?;
    if let Some(p) = &a.spec {
        let bytes = rec.input("split", p)?;
        cfg.split = Some(parse_data::<SplitSpec>(&bytes, p)?);
    }
    let spec = cfg.split.clone().ok_or_else(|| Error::Config {
        key: "split".into(),
        message: "give --spec or a `split` config section".into(),
    })?;
    cfg.validate()?;
    for (i, r) in spec.regions.iter().enumerate() {
        check_region_name(i, &r.name)?;
    }
    rec.config(&cfg);

    let (scan, in_format) = load_scan(&mut rec, "cloud", &a.input)?;
    let format = a.format.unwrap_or(in_format);
    let ext = if is_ply(format) { "ply" } else { "xyzl" };
    std::fs::create_dir_all(&a.out_dir).map_err(|source| Error::Io {
        path: a.out_dir.clone(),
        source,
    })?;
    for (name, part) in dataset::split(&scan.cloud, &spec)? {
        let path = a.out_dir.join(format!("{name}.{ext}"));
        info!("{name}: {} points", part.len());
        io::write_cloud(&part, &path, format)?;
        rec.output(&name, &path)?;
    }
    rec.finish(&a.out_dir.join("split"))?;
    Ok(())
}

pub fn eval_seg(a: &EvalSegArgs) -> Result<()> {
    let mut rec = Recorder::new("eval-seg", None);
    if let Some(r) = a.synthetic_ratio {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::Config {
                key: "synthetic_ratio".into(),
                message: format!("must lie in [0, 1], got {r}"),
            });
        }
    }
    rec.config(&serde_json::json!({ "synthetic_ratio": a.synthetic_ratio }));
    let (gt, _) = load_scan(&mut rec, "ground_truth", &a.ground_truth)?;
    let pred_bytes = rec.input("predictions", &a.predictions)?;
    let pred = dataset::parse_labels(
        utf8(&pred_bytes, &a.predictions)?,
        &a.predictions.display().to_string(),
    )?;
    let mut report = dataset::evaluate_segmentation(&gt.cloud, &pred)?;
    report.synthetic_ratio = a.synthetic_ratio;
    info!("mIoU = {:.4}", report.miou);
    io::write_json(&report, &a.output)?;
    rec.output("report", &a.output)?;
    rec.finish(&a.output)?;
    Ok(())
}
