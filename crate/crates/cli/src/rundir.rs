//! Layout of an `evolve` output directory and loading it back.
//!
//! ```text
//! config.txt        the run configuration
//! input.pbm         copy of the input image
//! path.txt          the sparsification path, one step per line
//! metrics.csv       one record per scale
//! frame_NNNNN.skel  skeletons at the written scales (every stride-th and the last)
//! frame_NNNNN.pbm   reconstructions at the same scales
//! diagnostics.txt   arc-tracing notes from branch pruning, when there are any
//! ```

use std::path::{Path, PathBuf};

use skelss_core::medial_axis::Skeleton;
use skelss_core::metrics::{metrics_csv, parse_metrics_csv, MetricRecord};
use skelss_core::pbm::{load_pbm, save_pbm, PbmFormat};
use skelss_core::scale_space::{parse_path_steps, Evolution, ScaleSpaceFrame, SparsificationPath};
use skelss_core::BinaryImage;

use crate::config::RunConfig;
use crate::error::{read, read_text, write, CliError};

pub const CONFIG_FILE: &str = "config.txt";
pub const INPUT_FILE: &str = "input.pbm";
pub const PATH_FILE: &str = "path.txt";
pub const METRICS_FILE: &str = "metrics.csv";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.txt";

fn digits(m: usize) -> usize {
    m.to_string().len().max(5)
}

pub fn frame_stem(scale: usize, m: usize) -> String {
    format!("frame_{scale:0width$}", width = digits(m))
}

/// Scales whose frames are written: multiples of `stride`, plus the last.
pub fn written_scales(m: usize, stride: usize) -> Vec<usize> {
    let mut scales: Vec<usize> = (0..=m).step_by(stride.max(1)).collect();
    if scales.last() != Some(&m) {
        scales.push(m);
    }
    scales
}

pub fn load_image(path: &Path) -> Result<BinaryImage, CliError> {
    load_pbm(&read(path)?).map_err(|e| CliError::corrupt(path, e))
}

/// Write a complete run. The directory must be absent or empty.
pub fn write_run(
    dir: &Path,
    config: &RunConfig,
    input: &BinaryImage,
    evolution: &Evolution,
    diagnostics: &[String],
) -> Result<(), CliError> {
    if dir.exists() {
        let mut entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
        if entries.next().is_some() {
            return Err(CliError::Usage(format!(
                "output directory {} is not empty",
                dir.display()
            )));
        }
    }
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;

    write(&dir.join(CONFIG_FILE), config.to_text())?;
    write(&dir.join(INPUT_FILE), save_pbm(input, PbmFormat::Plain))?;
    let path_text = evolution.path.as_ref().map(SparsificationPath::to_text).unwrap_or_default();
    write(&dir.join(PATH_FILE), path_text)?;
    let records: Vec<MetricRecord> = evolution.frames.iter().map(|f| f.metrics).collect();
    write(&dir.join(METRICS_FILE), metrics_csv(&records))?;
    let m = evolution.steps();
    for scale in written_scales(m, config.stride) {
        let frame = &evolution.frames[scale];
        let stem = frame_stem(scale, m);
        write(&dir.join(format!("{stem}.skel")), frame.sigma.to_skel2())?;
        write(&dir.join(format!("{stem}.pbm")), save_pbm(&frame.image, PbmFormat::Plain))?;
    }
    if !diagnostics.is_empty() {
        write(&dir.join(DIAGNOSTICS_FILE), diagnostics.join("\n") + "\n")?;
    }
    Ok(())
}

/// A run directory read back from disk.
#[derive(Debug, Clone)]
pub struct LoadedRun {
    pub dir: PathBuf,
    pub config: RunConfig,
    pub input: BinaryImage,
    pub metrics: Vec<MetricRecord>,
    pub path: Option<SparsificationPath>,
    /// Frames `0..=m`: skeletons and images come from the frame files where
    /// present and are replayed from the path otherwise; metrics come from
    /// `metrics.csv`.
    pub frames: Vec<ScaleSpaceFrame>,
}

/// Just the parts of a run needed for comparisons.
pub fn load_summary(dir: &Path) -> Result<(BinaryImage, Vec<MetricRecord>), CliError> {
    let input = load_image(&dir.join(INPUT_FILE))?;
    let metrics_path = dir.join(METRICS_FILE);
    let metrics = parse_metrics_csv(&read_text(&metrics_path)?).map_err(|e| CliError::corrupt(&metrics_path, e))?;
    Ok((input, metrics))
}

pub fn load_run(dir: &Path) -> Result<LoadedRun, CliError> {
    let config_path = dir.join(CONFIG_FILE);
    let (config, _) = RunConfig::parse(&read_text(&config_path)?).map_err(|e| CliError::corrupt(&config_path, e))?;
    let (input, metrics) = load_summary(dir)?;
    let metrics_path = dir.join(METRICS_FILE);
    if metrics.is_empty() {
        return Err(CliError::corrupt(&metrics_path, "no records"));
    }
    let m = metrics.len() - 1;
    if let Some(r) = metrics.iter().enumerate().find(|(i, r)| r.scale != *i) {
        return Err(CliError::corrupt(&metrics_path, format!("record {} has scale {}", r.0, r.1.scale)));
    }

    let load_skel = |scale: usize| -> Result<Option<Skeleton>, CliError> {
        let p = dir.join(format!("{}.skel", frame_stem(scale, m)));
        if !p.exists() {
            return Ok(None);
        }
        Skeleton::from_skel2(&read_text(&p)?).map(Some).map_err(|e| CliError::corrupt(&p, e))
    };
    let load_frame_image = |scale: usize| -> Result<Option<BinaryImage>, CliError> {
        let p = dir.join(format!("{}.pbm", frame_stem(scale, m)));
        if p.exists() {
            load_image(&p).map(Some)
        } else {
            Ok(None)
        }
    };

    let first_path = dir.join(format!("{}.skel", frame_stem(0, m)));
    let sigma0 = load_skel(0)?.ok_or_else(|| CliError::corrupt(&first_path, "initial skeleton is missing"))?;
    let path_file = dir.join(PATH_FILE);
    let steps = parse_path_steps(&read_text(&path_file)?).map_err(|e| CliError::corrupt(&path_file, e))?;
    if steps.len() != m {
        return Err(CliError::corrupt(
            &path_file,
            format!("{} steps but metrics.csv has {} scales", steps.len(), m + 1),
        ));
    }
    let path = if steps.is_empty() {
        None
    } else {
        let p = SparsificationPath::new(steps.clone(), &sigma0)
            .map_err(|e| CliError::Verification(format!("path_partition failed: {e}")))?;
        Some(p)
    };

    let mut frames = Vec::with_capacity(m + 1);
    let mut replayed = sigma0.clone();
    for (scale, record) in metrics.iter().enumerate() {
        if scale > 0 {
            replayed = replayed.without(&steps[scale - 1]);
        }
        let sigma = if scale == 0 {
            sigma0.clone()
        } else {
            load_skel(scale)?.unwrap_or_else(|| replayed.clone())
        };
        let image = match load_frame_image(scale)? {
            Some(img) => img,
            None => skelss_core::medial_axis::reconstruct(&sigma),
        };
        frames.push(ScaleSpaceFrame {
            scale,
            sigma,
            image,
            metrics: *record,
        });
    }

    Ok(LoadedRun {
        dir: dir.to_path_buf(),
        config,
        input,
        metrics,
        path,
        frames,
    })
}
