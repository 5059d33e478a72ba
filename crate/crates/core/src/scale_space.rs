//! Sparsification paths and the scale-space evolution they induce.
//!
//! Starting from a skeleton `Σ_0`, each step removes a non-empty set `P_ℓ`
//! chosen by a [`PathGenerator`]; the frame at scale `ℓ` pairs the remaining
//! skeleton `Σ_ℓ = Σ_0 \ (P_1 ∪ … ∪ P_ℓ)` with its disc-union reconstruction.
//! The final frame always has an empty skeleton and an empty image.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::grid::PixelCoord;
use crate::medial_axis::{reconstruct, Skeleton};
use crate::metrics::{compute_metrics, MetricRecord};
use crate::paths::CoverageGrid;
use crate::BinaryImage;

/// Stable fingerprint of a skeleton (FNV-1a over its `SKEL2` text).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SkeletonId(pub u64);

impl SkeletonId {
    pub fn of(skeleton: &Skeleton) -> Self {
        let hash = skeleton
            .to_skel2()
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
                (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
            });
        SkeletonId(hash)
    }
}

/// One pair of overlapping steps (1-based) sharing `pixel`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overlap {
    pub first: usize,
    pub second: usize,
    pub pixel: PixelCoord,
}

/// Partition violations of a candidate path. Step indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PathReport {
    pub empty_steps: Vec<usize>,
    pub overlaps: Vec<Overlap>,
    pub missing: Vec<PixelCoord>,
    pub foreign: Vec<(usize, PixelCoord)>,
}

impl PathReport {
    pub fn is_valid(&self) -> bool {
        self.empty_steps.is_empty()
            && self.overlaps.is_empty()
            && self.missing.is_empty()
            && self.foreign.is_empty()
    }
}

impl fmt::Display for PathReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return f.write_str("valid partition");
        }
        let mut parts = Vec::new();
        if !self.empty_steps.is_empty() {
            parts.push(format!("empty steps {:?}", self.empty_steps));
        }
        for o in &self.overlaps {
            parts.push(format!("steps ({}, {}) share {}", o.first, o.second, o.pixel));
        }
        if !self.missing.is_empty() {
            let list: Vec<String> = self.missing.iter().map(|p| p.to_string()).collect();
            parts.push(format!("uncovered points {}", list.join(" ")));
        }
        for (s, p) in &self.foreign {
            parts.push(format!("step {s} contains non-skeleton point {p}"));
        }
        f.write_str(&parts.join("; "))
    }
}

/// Check that `steps` partition the points of `skeleton`.
pub fn validate_path(steps: &[Vec<PixelCoord>], skeleton: &Skeleton) -> PathReport {
    let mut report = PathReport::default();
    let mut owner: std::collections::HashMap<PixelCoord, usize> = std::collections::HashMap::new();
    for (i, step) in steps.iter().enumerate() {
        let s = i + 1;
        if step.is_empty() {
            report.empty_steps.push(s);
        }
        for &p in step {
            if !skeleton.contains(p) {
                report.foreign.push((s, p));
                continue;
            }
            match owner.get(&p) {
                Some(&first) => report.overlaps.push(Overlap {
                    first,
                    second: s,
                    pixel: p,
                }),
                None => {
                    owner.insert(p, s);
                }
            }
        }
    }
    report.missing = skeleton.positions().filter(|p| !owner.contains_key(p)).collect();
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("not a partition of the skeleton: {0}")]
    NotAPartition(PathReport),
    #[error("path text line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// An ordered partition `(P_1, …, P_m)` of a skeleton. Steps are stored
/// sorted row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsificationPath {
    steps: Vec<Vec<PixelCoord>>,
    origin: SkeletonId,
}

impl SparsificationPath {
    pub fn new(steps: Vec<Vec<PixelCoord>>, skeleton: &Skeleton) -> Result<Self, PathError> {
        let report = validate_path(&steps, skeleton);
        if !report.is_valid() {
            return Err(PathError::NotAPartition(report));
        }
        let steps = steps
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s
            })
            .collect();
        Ok(Self {
            steps,
            origin: SkeletonId::of(skeleton),
        })
    }

    pub fn steps(&self) -> &[Vec<PixelCoord>] {
        &self.steps
    }

    /// Step `P_ℓ`, 1-based.
    pub fn step(&self, scale: usize) -> &[PixelCoord] {
        &self.steps[scale - 1]
    }

    /// Number of steps `m`.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn origin(&self) -> SkeletonId {
        self.origin
    }

    /// `path.txt` form: one line `ℓ: x y; x y; …` per step.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, step) in self.steps.iter().enumerate() {
            let pts: Vec<String> = step.iter().map(|p| format!("{} {}", p.x, p.y)).collect();
            out.push_str(&format!("{}: {}\n", i + 1, pts.join("; ")));
        }
        out
    }

    /// Parse `path.txt` and validate it against `skeleton`.
    pub fn from_text(text: &str, skeleton: &Skeleton) -> Result<Self, PathError> {
        Self::new(parse_path_steps(text)?, skeleton)
    }
}

/// Parse the steps of a `path.txt` file without validating them.
pub fn parse_path_steps(text: &str) -> Result<Vec<Vec<PixelCoord>>, PathError> {
    let mut steps = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| PathError::Parse { line: lineno, message };
        let (label, body) = line
            .split_once(':')
            .ok_or_else(|| err("missing ':' after the scale".into()))?;
        let scale: usize = label
            .trim()
            .parse()
            .map_err(|_| err(format!("bad scale {label:?}")))?;
        if scale != steps.len() + 1 {
            return Err(err(format!("expected scale {}, found {scale}", steps.len() + 1)));
        }
        let mut step = Vec::new();
        for rec in body.split(';').map(str::trim).filter(|r| !r.is_empty()) {
            let nums: Vec<&str> = rec.split_whitespace().collect();
            let parsed: Option<Vec<usize>> = nums.iter().map(|n| n.parse().ok()).collect();
            match parsed.as_deref() {
                Some([x, y]) => step.push(PixelCoord::new(*x, *y)),
                _ => return Err(err(format!("bad point {rec:?}"))),
            }
        }
        steps.push(step);
    }
    Ok(steps)
}

/// A skeleton-image pair at one scale together with its measurements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleSpaceFrame {
    pub scale: usize,
    pub sigma: Skeleton,
    pub image: BinaryImage,
    pub metrics: MetricRecord,
}

impl ScaleSpaceFrame {
    /// Reconstruct and measure `sigma` at the given scale.
    pub fn from_skeleton(scale: usize, sigma: Skeleton, baseline_area: usize) -> Self {
        let image = reconstruct(&sigma);
        let metrics = compute_metrics(scale, &sigma, &image, baseline_area);
        Self {
            scale,
            sigma,
            image,
            metrics,
        }
    }
}

/// What a generator sees when asked for the next step.
#[derive(Debug, Clone)]
pub struct EvolutionState {
    /// Current scale `ℓ`; the requested step becomes `P_{ℓ+1}`.
    pub scale: usize,
    /// Current skeleton `Σ_ℓ`.
    pub skeleton: Skeleton,
    /// Disc multiplicities of `Σ_ℓ`.
    pub grid: CoverageGrid,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct GeneratorError(pub String);

/// Chooses the sparsification steps of an evolution.
///
/// `next_step` must return a non-empty subset of the current skeleton; the
/// evolution applies exactly that set before asking again.
pub trait PathGenerator {
    /// Short name with parameters, e.g. `compression(r=1)`.
    fn name(&self) -> String;

    /// Called once with the initial state before the first step.
    fn start(&mut self, _initial: &EvolutionState) {}

    fn next_step(&mut self, state: &EvolutionState) -> Result<Vec<PixelCoord>, GeneratorError>;
}

impl<G: PathGenerator + ?Sized> PathGenerator for Box<G> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn start(&mut self, initial: &EvolutionState) {
        (**self).start(initial)
    }

    fn next_step(&mut self, state: &EvolutionState) -> Result<Vec<PixelCoord>, GeneratorError> {
        (**self).next_step(state)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvolveError {
    #[error("generator returned an empty step at scale {scale}")]
    EmptyStep { scale: usize },
    #[error("generator step at scale {scale} contains {pixel}, which is not in the current skeleton")]
    NotSubset { scale: usize, pixel: PixelCoord },
    #[error("generator failed at scale {scale}: {source}")]
    Generator { scale: usize, source: GeneratorError },
}

impl EvolveError {
    /// Scale of the step that violated the contract.
    pub fn scale(&self) -> usize {
        match *self {
            EvolveError::EmptyStep { scale }
            | EvolveError::NotSubset { scale, .. }
            | EvolveError::Generator { scale, .. } => scale,
        }
    }
}

/// A complete evolution: frames `0..=m` and the recorded path. The path is
/// `None` only for an empty initial skeleton (`m = 0`).
#[derive(Debug, Clone)]
pub struct Evolution {
    pub generator: String,
    pub frames: Vec<ScaleSpaceFrame>,
    pub path: Option<SparsificationPath>,
}

impl Evolution {
    /// Number of steps `m`.
    pub fn steps(&self) -> usize {
        self.frames.len() - 1
    }
}

fn frame(scale: usize, state: &EvolutionState, baseline_area: usize) -> ScaleSpaceFrame {
    let image = state.grid.object();
    let metrics = compute_metrics(scale, &state.skeleton, &image, baseline_area);
    ScaleSpaceFrame {
        scale,
        sigma: state.skeleton.clone(),
        image,
        metrics,
    }
}

/// Run `generator` on `skeleton` until the skeleton is exhausted.
pub fn evolve(skeleton: &Skeleton, generator: &mut dyn PathGenerator) -> Result<Evolution, EvolveError> {
    let mut state = EvolutionState {
        scale: 0,
        skeleton: skeleton.clone(),
        grid: CoverageGrid::from_skeleton(skeleton),
    };
    let baseline = state.grid.area();
    let mut frames = vec![frame(0, &state, baseline)];
    let mut steps: Vec<Vec<PixelCoord>> = Vec::new();
    if !skeleton.is_empty() {
        generator.start(&state);
    }

    while !state.skeleton.is_empty() {
        let scale = state.scale + 1;
        let step = generator
            .next_step(&state)
            .map_err(|source| EvolveError::Generator { scale, source })?;
        if step.is_empty() {
            return Err(EvolveError::EmptyStep { scale });
        }
        let mut unique = BTreeSet::new();
        for &p in &step {
            if !state.skeleton.contains(p) || !unique.insert(p) {
                return Err(EvolveError::NotSubset { scale, pixel: p });
            }
        }
        for &p in &unique {
            let mp = state.skeleton.remove(p).expect("checked membership");
            state.grid.remove(mp);
        }
        state.scale = scale;
        frames.push(frame(scale, &state, baseline));
        steps.push(unique.into_iter().collect());
    }

    let path = (!steps.is_empty()).then(|| {
        SparsificationPath::new(steps, skeleton).expect("an exhausted evolution partitions its skeleton")
    });
    Ok(Evolution {
        generator: generator.name(),
        frames,
        path,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResumeError {
    #[error("frame scale {scale} exceeds the path length {len}")]
    ScaleOutOfRange { scale: usize, len: usize },
    #[error("frame skeleton at scale {scale} does not match the remaining path steps")]
    Mismatch { scale: usize },
}

/// Continue a recorded evolution from `frame`, reproducing frames
/// `k..=m` where `k = frame.scale`.
pub fn resume(
    frame: &ScaleSpaceFrame,
    path: Option<&SparsificationPath>,
) -> Result<Vec<ScaleSpaceFrame>, ResumeError> {
    let steps: &[Vec<PixelCoord>] = path.map_or(&[], |p| p.steps());
    let k = frame.scale;
    if k > steps.len() {
        return Err(ResumeError::ScaleOutOfRange { scale: k, len: steps.len() });
    }
    let remaining: BTreeSet<PixelCoord> = steps[k..].iter().flatten().copied().collect();
    let current: BTreeSet<PixelCoord> = frame.sigma.positions().collect();
    if remaining != current {
        return Err(ResumeError::Mismatch { scale: k });
    }

    let baseline = frame.metrics.rel_error.den as usize;
    let mut state = EvolutionState {
        scale: k,
        skeleton: frame.sigma.clone(),
        grid: CoverageGrid::from_skeleton(&frame.sigma),
    };
    let mut frames = vec![self::frame(k, &state, baseline)];
    for (i, step) in steps.iter().enumerate().skip(k) {
        for &p in step {
            let mp = state.skeleton.remove(p).expect("validated partition");
            state.grid.remove(mp);
        }
        state.scale = i + 1;
        frames.push(self::frame(i + 1, &state, baseline));
    }
    Ok(frames)
}
