use std::io::Write;
use std::path::{Path, PathBuf};

use skelss_core::medial_axis::{reconstruct, skeletonize, SkeletonError};
use skelss_core::metrics::{compare_paths, comparison_csv, verify_run, RunContext, RunSummary};
use skelss_core::paths::BranchPruningPath;
use skelss_core::scale_space::evolve;
use skelss_core::{Backend, BinaryImage, Skeleton};

use crate::config::{parse_checkpoints, PathChoice, RunConfig};
use crate::error::{read_text, write, CliError};
use crate::render::render_frame;
use crate::rundir::{load_image, load_run, load_summary, write_run};
use crate::{Command, EvolveArgs};

pub fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Skeletonize { input, backend, out: dir } => cmd_skeletonize(&input, backend, dir.as_deref(), out),
        Command::Evolve(args) => {
            let (config, dir) = resolve_evolve(args)?;
            cmd_evolve(&config, &dir, out)
        }
        Command::Verify { run, key_value } => cmd_verify(&run, key_value, out),
        Command::Compare { runs, checkpoints, out: file } => {
            cmd_compare(&runs, checkpoints.as_deref(), file.as_deref(), out)
        }
        Command::Render { run, out: dir } => cmd_render(&run, dir.as_deref(), out),
    }
}

fn say(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

fn skeleton_of(image: &BinaryImage, backend: Backend, source: &Path) -> Result<Skeleton, CliError> {
    skeletonize(image, backend).map_err(|e| match e {
        SkeletonError::FullFrame { .. } => CliError::Contract(format!("{}: {e}", source.display())),
        other => CliError::corrupt(source, other),
    })
}

/// Write the skeleton (to `<dir>/skeleton.skel` or stdout) and a summary
/// line `count=N backend=B deficit=D`.
pub fn cmd_skeletonize(
    input: &Path,
    backend: Backend,
    dir: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let image = load_image(input)?;
    let skeleton = skeleton_of(&image, backend, input)?;
    let deficit = image.area() - reconstruct(&skeleton).area();
    let summary = format!("count={} backend={backend} deficit={deficit}\n", skeleton.len());
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            write(&dir.join("skeleton.skel"), skeleton.to_skel2())?;
            say(out, &summary)
        }
        None => {
            say(out, &skeleton.to_skel2())?;
            say(out, &summary)
        }
    }
}

/// Merge the optional config file with command-line flags.
pub fn resolve_evolve(args: EvolveArgs) -> Result<(RunConfig, PathBuf), CliError> {
    let (mut config, mut dir) = match &args.config {
        Some(path) => {
            let (cfg, out) = RunConfig::parse(&read_text(path)?)?;
            (Some(cfg), out)
        }
        None => (None, None),
    };
    if let Some(input) = args.input {
        match config.as_mut() {
            Some(cfg) => cfg.input = input,
            None => config = Some(RunConfig::new(input)),
        }
    }
    let mut config = config.ok_or_else(|| CliError::Usage("evolve needs --input or a config with `input`".into()))?;
    if let Some(b) = args.backend {
        config.backend = b;
    }
    if let Some(p) = args.path {
        config.path = p;
    }
    if let Some(r) = args.r {
        config.r = r;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(s) = args.stride {
        config.stride = s;
    }
    if let Some(c) = args.checkpoints {
        config.checkpoints = parse_checkpoints(&c).map_err(CliError::Usage)?;
    }
    if args.out.is_some() {
        dir = args.out;
    }
    let dir = dir.ok_or_else(|| CliError::Usage("evolve needs --out or a config with `out`".into()))?;
    Ok((config, dir))
}

pub fn cmd_evolve(config: &RunConfig, dir: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let image = load_image(&config.input)?;
    let skeleton = skeleton_of(&image, config.backend, &config.input)?;
    let contract = |e: skelss_core::scale_space::EvolveError| CliError::Contract(e.to_string());
    let (evolution, diagnostics) = if config.path == PathChoice::Prune {
        let mut pruning = BranchPruningPath::new();
        let evolution = evolve(&skeleton, &mut pruning).map_err(contract)?;
        (evolution, pruning.diagnostics().to_vec())
    } else {
        (evolve(&skeleton, &mut config.generator()).map_err(contract)?, Vec::new())
    };
    write_run(dir, config, &image, &evolution, &diagnostics)?;
    let last = evolution.frames.last().expect("frame 0 always exists");
    say(
        out,
        &format!(
            "{}: {} steps from {} points, final area {}\n",
            evolution.generator,
            evolution.steps(),
            skeleton.len(),
            last.metrics.area
        ),
    )
}

pub fn cmd_verify(run: &Path, key_value: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let loaded = load_run(run)?;
    let ctx = RunContext {
        original: &loaded.input,
        backend: loaded.config.backend,
        path: loaded.config.path_kind(),
        greedy_limit: None,
    };
    let report = verify_run(&loaded.frames, loaded.path.as_ref(), &ctx);
    if key_value {
        say(out, &report.to_key_values())?;
    } else {
        say(out, &format!("{report}\n"))?;
    }
    if report.all_passed() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|r| r.name.as_str()).collect();
        Err(CliError::Verification(format!("failed: {}", names.join(", "))))
    }
}

fn label_of(dir: &Path) -> String {
    dir.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| dir.display().to_string())
}

pub fn cmd_compare(
    runs: &[PathBuf],
    checkpoints: Option<&str>,
    file: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let checkpoints = match checkpoints {
        Some(text) => parse_checkpoints(text).map_err(CliError::Usage)?,
        None => {
            let cfg_path = runs[0].join(crate::rundir::CONFIG_FILE);
            RunConfig::parse(&read_text(&cfg_path)?)
                .map_err(|e| CliError::corrupt(&cfg_path, e))?
                .0
                .checkpoints
        }
    };
    if checkpoints.is_empty() {
        return Err(CliError::Usage("no checkpoints given".into()));
    }
    let loaded: Vec<(String, BinaryImage, Vec<_>)> = runs
        .iter()
        .map(|dir| load_summary(dir).map(|(img, m)| (label_of(dir), img, m)))
        .collect::<Result<_, _>>()?;
    let summaries: Vec<RunSummary<'_>> = loaded
        .iter()
        .map(|(label, input, metrics)| RunSummary { label, input, metrics })
        .collect();
    let rows = compare_paths(&summaries, &checkpoints).map_err(|e| CliError::Contract(e.to_string()))?;
    let csv = comparison_csv(&rows);
    if let Some(file) = file {
        write(file, &csv)?;
    }
    say(out, &csv)
}

pub fn cmd_render(run: &Path, dir: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let loaded = load_run(run)?;
    let dir = dir.map(Path::to_path_buf).unwrap_or_else(|| run.join("render"));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let m = loaded.frames.len() - 1;
    for frame in &loaded.frames {
        let name = format!("render_{}.pgm", &crate::rundir::frame_stem(frame.scale, m)["frame_".len()..]);
        write(&dir.join(name), render_frame(frame))?;
    }
    say(out, &format!("rendered {} frames to {}\n", m + 1, dir.display()))
}
