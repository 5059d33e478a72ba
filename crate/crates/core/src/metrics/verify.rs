//! The property verifier: checks a recorded evolution against every
//! scale-space guarantee that applies to its path.

use std::cmp::Ordering;
use std::fmt;

use crate::grid::{BinaryImage, CanvasPolicy, PixelCoord, Transform};
use crate::medial_axis::{reconstruct, skeletonize, Backend, MedialPoint, Skeleton};
use crate::paths::{reconstruction_impact, CoverageGrid};
use crate::scale_space::{resume, validate_path, ScaleSpaceFrame, SparsificationPath};

use super::{compute_metrics, MetricRecord};

/// Which generator produced the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Random { seed: u64, per_step: usize },
    Compression { per_step: usize },
    Prune,
}

impl PathKind {
    pub fn per_step(self) -> Option<usize> {
        match self {
            PathKind::Random { per_step, .. } | PathKind::Compression { per_step } => Some(per_step),
            PathKind::Prune => None,
        }
    }
}

/// Everything about a run that the frames alone do not record.
#[derive(Debug, Clone, Copy)]
pub struct RunContext<'a> {
    /// The input image `f`.
    pub original: &'a BinaryImage,
    pub backend: Backend,
    pub path: PathKind,
    /// Greedy optimality is only checked on steps whose skeleton has at most
    /// this many points. `None` checks every step.
    pub greedy_limit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropertyStatus {
    Pass,
    Fail { scale: Option<usize>, detail: String },
    NotApplicable(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyResult {
    pub name: String,
    pub status: PropertyStatus,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.status == PropertyStatus::Pass
    }

    pub fn failed(&self) -> bool {
        matches!(self.status, PropertyStatus::Fail { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerificationReport {
    pub results: Vec<PropertyResult>,
}

impl VerificationReport {
    /// True when no applicable property failed.
    pub fn all_passed(&self) -> bool {
        !self.results.iter().any(PropertyResult::failed)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyResult> {
        self.results.iter().find(|r| r.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyResult> {
        self.results.iter().filter(|r| r.failed())
    }

    /// Machine-readable `key=value` lines.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            match &r.status {
                PropertyStatus::Pass => out.push_str(&format!("{}=pass\n", r.name)),
                PropertyStatus::Fail { scale, detail } => {
                    out.push_str(&format!("{}=fail\n", r.name));
                    if let Some(s) = scale {
                        out.push_str(&format!("{}.scale={s}\n", r.name));
                    }
                    out.push_str(&format!("{}.detail={}\n", r.name, one_line(detail)));
                }
                PropertyStatus::NotApplicable(reason) => {
                    out.push_str(&format!("{}=n/a\n", r.name));
                    out.push_str(&format!("{}.reason={}\n", r.name, one_line(reason)));
                }
            }
        }
        out.push_str(&format!("all_passed={}\n", self.all_passed()));
        out
    }
}

fn one_line(s: &str) -> String {
    s.replace('\n', " ")
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.results.iter().map(|r| r.name.len()).max().unwrap_or(0);
        for r in &self.results {
            match &r.status {
                PropertyStatus::Pass => writeln!(f, "{:width$}  PASS", r.name)?,
                PropertyStatus::Fail { scale: Some(s), detail } => {
                    writeln!(f, "{:width$}  FAIL  at scale {s}: {detail}", r.name)?
                }
                PropertyStatus::Fail { scale: None, detail } => writeln!(f, "{:width$}  FAIL  {detail}", r.name)?,
                PropertyStatus::NotApplicable(reason) => writeln!(f, "{:width$}  n/a   {reason}", r.name)?,
            }
        }
        let failed = self.failures().count();
        if failed == 0 {
            write!(f, "all applicable properties pass")
        } else {
            write!(f, "{failed} propert{} failed", if failed == 1 { "y" } else { "ies" })
        }
    }
}

fn fail(scale: usize, detail: impl Into<String>) -> PropertyStatus {
    PropertyStatus::Fail {
        scale: Some(scale),
        detail: detail.into(),
    }
}

/// The on-grid transforms whose commutation with the exact skeleton is
/// checked. Translation grows the canvas so nothing is clipped.
pub fn invariance_transforms() -> Vec<(Transform, CanvasPolicy)> {
    vec![
        (Transform::Rotate90, CanvasPolicy::Clip),
        (Transform::Rotate180, CanvasPolicy::Clip),
        (Transform::Rotate270, CanvasPolicy::Clip),
        (Transform::MirrorHorizontal, CanvasPolicy::Clip),
        (Transform::MirrorVertical, CanvasPolicy::Clip),
        (Transform::Translate { dx: 3, dy: 2 }, CanvasPolicy::Grow),
    ]
}

/// Check every property that applies to the run. Failures become report
/// entries; the function itself never fails.
pub fn verify_run(
    frames: &[ScaleSpaceFrame],
    path: Option<&SparsificationPath>,
    ctx: &RunContext<'_>,
) -> VerificationReport {
    let mut results = Vec::new();
    let mut push = |name: &str, status: PropertyStatus| {
        results.push(PropertyResult {
            name: name.to_string(),
            status,
        })
    };

    if frames.is_empty() {
        push(
            "frames",
            PropertyStatus::Fail {
                scale: None,
                detail: "no frames".into(),
            },
        );
        return VerificationReport { results };
    }
    let m = frames.len() - 1;
    let records: Vec<MetricRecord> = frames.iter().map(|f| f.metrics).collect();

    let partition = check_partition(frames, path);
    let partition_ok = partition == PropertyStatus::Pass;
    push("path_partition", partition);
    push("frame_consistency", check_frames(frames, path));
    push("metrics_consistency", check_metrics(frames));
    push("initial_state", check_initial(&frames[0], ctx));
    push(
        "causality",
        if partition_ok {
            check_causality(frames, path)
        } else {
            PropertyStatus::NotApplicable("recorded path is not a partition of the initial skeleton".into())
        },
    );
    push("steady_state", check_steady(&frames[m]));
    push(
        "area_lyapunov",
        first_increase(&records, |r| r.area as u64, "area"),
    );
    push(
        "diameter_lyapunov",
        first_increase(&records, |r| r.diameter2, "diameter2"),
    );
    push("rel_error_monotone", check_rel_error(&records));

    let (err_status, greedy_status) = if partition_ok {
        check_impacts(frames, path, ctx)
    } else {
        let reason = "recorded path is not a partition of the initial skeleton".to_string();
        (
            PropertyStatus::NotApplicable(reason.clone()),
            PropertyStatus::NotApplicable(reason),
        )
    };
    push("err_additivity", err_status);
    push("greedy_optimality", greedy_status);

    push(
        "minimality_lyapunov",
        match ctx.path {
            PathKind::Compression { .. } => check_minimality(&records),
            _ => PropertyStatus::NotApplicable("guaranteed for compression paths only".into()),
        },
    );
    let pruning = matches!(ctx.path, PathKind::Prune);
    push(
        "complexity_lyapunov",
        if pruning {
            first_increase(&records, |r| r.complexity as u64, "complexity")
        } else {
            PropertyStatus::NotApplicable("guaranteed for branch pruning paths only".into())
        },
    );
    push(
        "homotopy",
        if pruning {
            first_increase(&records, |r| r.components as u64, "components")
        } else {
            PropertyStatus::NotApplicable("guaranteed for branch pruning paths only".into())
        },
    );

    for (t, policy) in invariance_transforms() {
        push(&format!("invariance_{}", transform_label(t)), check_invariance(ctx, t, policy));
    }

    VerificationReport { results }
}

fn transform_label(t: Transform) -> String {
    match t {
        Transform::Translate { .. } => "translate".into(),
        other => other.name(),
    }
}

fn check_partition(frames: &[ScaleSpaceFrame], path: Option<&SparsificationPath>) -> PropertyStatus {
    let m = frames.len() - 1;
    let origin = &frames[0].sigma;
    match path {
        None if m == 0 && origin.is_empty() => PropertyStatus::Pass,
        None => PropertyStatus::Fail {
            scale: None,
            detail: format!("no path recorded for {m} steps and {} initial points", origin.len()),
        },
        Some(p) => {
            if p.len() != m {
                return PropertyStatus::Fail {
                    scale: None,
                    detail: format!("path has {} steps but the run has {m}", p.len()),
                };
            }
            let report = validate_path(p.steps(), origin);
            if report.is_valid() {
                PropertyStatus::Pass
            } else {
                PropertyStatus::Fail {
                    scale: report.empty_steps.first().copied().or(report.foreign.first().map(|f| f.0)),
                    detail: report.to_string(),
                }
            }
        }
    }
}

fn check_frames(frames: &[ScaleSpaceFrame], path: Option<&SparsificationPath>) -> PropertyStatus {
    for (i, f) in frames.iter().enumerate() {
        if f.scale != i {
            return fail(i, format!("frame at position {i} is labelled scale {}", f.scale));
        }
        if f.image != reconstruct(&f.sigma) {
            return fail(i, "image differs from the reconstruction of the skeleton");
        }
        if i > 0 {
            let prev = &frames[i - 1].sigma;
            let expected = match path {
                Some(p) if p.len() >= i => prev.without(p.step(i)),
                _ => return fail(i, "no recorded step leads to this frame"),
            };
            if f.sigma != expected {
                return fail(i, "skeleton differs from the previous skeleton minus the recorded step");
            }
        }
    }
    PropertyStatus::Pass
}

fn check_metrics(frames: &[ScaleSpaceFrame]) -> PropertyStatus {
    let baseline = frames[0].image.area();
    for f in frames {
        let expected = compute_metrics(f.scale, &f.sigma, &f.image, baseline);
        if f.metrics != expected {
            return fail(
                f.scale,
                format!("recorded {:?} but the frame measures {:?}", f.metrics, expected),
            );
        }
    }
    PropertyStatus::Pass
}

fn check_initial(frame: &ScaleSpaceFrame, ctx: &RunContext<'_>) -> PropertyStatus {
    let expected = match skeletonize(ctx.original, ctx.backend) {
        Ok(s) => s,
        Err(e) => return fail(0, format!("input cannot be skeletonised: {e}")),
    };
    if frame.sigma != expected {
        return fail(
            0,
            format!(
                "initial skeleton has {} points, {} backend gives {}",
                frame.sigma.len(),
                ctx.backend,
                expected.len()
            ),
        );
    }
    let u0 = reconstruct(&frame.sigma);
    match ctx.backend {
        Backend::Exact if &u0 != ctx.original => fail(0, "exact reconstruction differs from the input"),
        Backend::Thinned if !u0.is_subset_of(ctx.original) => fail(0, "thinned reconstruction exceeds the input"),
        _ => PropertyStatus::Pass,
    }
}

fn frames_equal(a: &ScaleSpaceFrame, b: &ScaleSpaceFrame) -> bool {
    a.scale == b.scale && a.sigma == b.sigma && a.image == b.image && a.metrics == b.metrics
}

/// Replays from frame 0 and from frame `⌈m/2⌉` and compares each suffix
/// with the recorded frames.
fn check_causality(frames: &[ScaleSpaceFrame], path: Option<&SparsificationPath>) -> PropertyStatus {
    let m = frames.len() - 1;
    let mut starts = vec![0, m.div_ceil(2)];
    starts.dedup();
    for k in starts {
        let replay = match resume(&frames[k], path) {
            Ok(r) => r,
            Err(e) => return fail(k, format!("resume from scale {k} failed: {e}")),
        };
        if replay.len() != frames.len() - k {
            return fail(k, format!("resume from scale {k} produced {} frames", replay.len()));
        }
        for (got, want) in replay.iter().zip(&frames[k..]) {
            if !frames_equal(got, want) {
                return fail(want.scale, format!("resume from scale {k} diverges"));
            }
        }
    }
    PropertyStatus::Pass
}

fn check_steady(last: &ScaleSpaceFrame) -> PropertyStatus {
    if !last.sigma.is_empty() {
        fail(last.scale, format!("{} skeleton points remain", last.sigma.len()))
    } else if last.image.has_object() {
        fail(last.scale, format!("{} object pixels remain", last.image.area()))
    } else {
        PropertyStatus::Pass
    }
}

fn first_increase(records: &[MetricRecord], value: impl Fn(&MetricRecord) -> u64, label: &str) -> PropertyStatus {
    for w in records.windows(2) {
        let (a, b) = (value(&w[0]), value(&w[1]));
        if b > a {
            return fail(w[1].scale, format!("{label} rises from {a} to {b}"));
        }
    }
    PropertyStatus::Pass
}

fn check_rel_error(records: &[MetricRecord]) -> PropertyStatus {
    if !records[0].rel_error.is_defined() {
        return PropertyStatus::NotApplicable("initial object is empty".into());
    }
    if records[0].rel_error.num != 0 {
        return fail(0, format!("relative error at scale 0 is {}", records[0].rel_error));
    }
    for w in records.windows(2) {
        let (a, b) = (w[0].rel_error, w[1].rel_error);
        if a.num > a.den || b.num > b.den {
            return fail(w[1].scale, format!("relative error {b} outside [0, 1]"));
        }
        if b.cmp_exact(a) != Some(Ordering::Greater) && b.cmp_exact(a) != Some(Ordering::Equal) {
            return fail(w[1].scale, format!("relative error falls from {a} to {b}"));
        }
    }
    PropertyStatus::Pass
}

fn check_minimality(records: &[MetricRecord]) -> PropertyStatus {
    for w in records.windows(2) {
        if w[1].area == 0 {
            continue;
        }
        let (a, b) = (w[0].minimality, w[1].minimality);
        if b.cmp_exact(a) == Some(Ordering::Greater) {
            return fail(w[1].scale, format!("minimality rises from {a} to {b}"));
        }
    }
    PropertyStatus::Pass
}

/// Walks the path with an independent coverage grid, checking that each
/// step's area loss equals its reconstruction impact and, for compression
/// runs, that each step removed the cheapest points.
fn check_impacts(
    frames: &[ScaleSpaceFrame],
    path: Option<&SparsificationPath>,
    ctx: &RunContext<'_>,
) -> (PropertyStatus, PropertyStatus) {
    let greedy_per_step = match ctx.path {
        PathKind::Compression { per_step } => Some(per_step),
        _ => None,
    };
    let mut err_status = PropertyStatus::Pass;
    let mut greedy_status = match greedy_per_step {
        Some(_) => PropertyStatus::Pass,
        None => PropertyStatus::NotApplicable("guaranteed for compression paths only".into()),
    };
    let Some(path) = path else {
        return (err_status, greedy_status);
    };

    let mut sigma = frames[0].sigma.clone();
    let mut grid = CoverageGrid::from_skeleton(&sigma);
    for (i, step) in path.steps().iter().enumerate() {
        let scale = i + 1;
        let impact = reconstruction_impact(&grid, &sigma, step).expect("validated partition");
        if err_status == PropertyStatus::Pass {
            let loss = frames[i].metrics.area.saturating_sub(frames[scale].metrics.area);
            let err_delta = frames[scale].metrics.err().saturating_sub(frames[i].metrics.err());
            if loss != impact.len() || err_delta != impact.len() as u64 {
                err_status = fail(
                    scale,
                    format!("step impact is {} pixels but the area drops by {loss}", impact.len()),
                );
            }
        }
        if let (Some(r), PropertyStatus::Pass) = (greedy_per_step, &greedy_status) {
            if ctx.greedy_limit.is_none_or(|limit| sigma.len() <= limit) {
                if let Some(detail) = greedy_violation(&grid, &sigma, step, r) {
                    greedy_status = fail(scale, detail);
                }
            }
        }
        for &p in step {
            let mp = sigma.remove(p).expect("validated partition");
            grid.remove(mp);
        }
    }
    (err_status, greedy_status)
}

fn greedy_violation(grid: &CoverageGrid, sigma: &Skeleton, step: &[PixelCoord], r: usize) -> Option<String> {
    let impacts: Vec<(usize, MedialPoint)> = sigma.iter().map(|mp| (grid.single_impact(mp), mp)).collect();
    let removed = |p: PixelCoord| step.binary_search(&p).is_ok();
    let worst_removed = impacts.iter().filter(|(_, mp)| removed(mp.pos)).map(|(i, _)| *i).max()?;
    let best_kept = impacts.iter().filter(|(_, mp)| !removed(mp.pos)).map(|(i, _)| *i).min();
    if step.len() != r.min(sigma.len()) {
        return Some(format!("step removes {} points, expected {}", step.len(), r.min(sigma.len())));
    }
    match best_kept {
        Some(best) if best < worst_removed => Some(format!(
            "removed a point of impact {worst_removed} while a point of impact {best} remains"
        )),
        _ => None,
    }
}

fn check_invariance(ctx: &RunContext<'_>, t: Transform, policy: CanvasPolicy) -> PropertyStatus {
    if ctx.backend != Backend::Exact {
        return PropertyStatus::NotApplicable("checked for the exact backend only".into());
    }
    let f = ctx.original;
    if let Transform::Translate { dx, dy } = t {
        let touches = f
            .object_pixels()
            .any(|p| (dx > 0 && p.x == 0) || (dy > 0 && p.y == 0));
        if touches {
            return PropertyStatus::NotApplicable(
                "object touches the leading canvas border, so translation changes its distances".into(),
            );
        }
    }
    let base = match skeletonize(f, Backend::Exact) {
        Ok(s) => s,
        Err(e) => return PropertyStatus::NotApplicable(format!("input cannot be skeletonised: {e}")),
    };
    let tf = match f.transform(t, policy) {
        Ok(img) => img,
        Err(e) => return fail(0, format!("transform failed: {e}")),
    };
    let direct = match skeletonize(&tf, Backend::Exact) {
        Ok(s) => s,
        Err(e) => return fail(0, format!("transformed input cannot be skeletonised: {e}")),
    };
    let (w, h) = t.output_dims(f.dims(), policy);
    let mapped: Vec<MedialPoint> = base
        .iter()
        .map(|mp| MedialPoint::new(t.apply_within(mp.pos, f.dims(), policy).expect("object pixel"), mp.radius2.0))
        .collect();
    let mapped = Skeleton::from_points(w, h, mapped).expect("transform is injective");
    if mapped == direct {
        PropertyStatus::Pass
    } else {
        let differing = mapped
            .iter()
            .filter(|mp| direct.point(mp.pos) != Some(*mp))
            .chain(direct.iter().filter(|mp| mapped.point(mp.pos) != Some(*mp)))
            .count();
        fail(0, format!("{differing} skeleton records differ after {}", t.name()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::{branch_pruning_path, compression_path, random_path};
    use crate::scale_space::evolve;

    fn shape() -> BinaryImage {
        BinaryImage::from_ascii(&[
            "...........",
            ".#######...",
            ".#######...",
            ".#######...",
            "...###.....",
            "...#####...",
            "...........",
        ])
    }

    fn run(kind: PathKind, backend: Backend) -> (BinaryImage, crate::scale_space::Evolution) {
        let img = shape();
        let s = skeletonize(&img, backend).unwrap();
        let ev = match kind {
            PathKind::Random { seed, per_step } => evolve(&s, &mut random_path(seed, per_step)),
            PathKind::Compression { per_step } => evolve(&s, &mut compression_path(per_step)),
            PathKind::Prune => evolve(&s, &mut branch_pruning_path()),
        }
        .unwrap();
        (img, ev)
    }

    fn verify(kind: PathKind, backend: Backend) -> VerificationReport {
        let (img, ev) = run(kind, backend);
        let ctx = RunContext {
            original: &img,
            backend,
            path: kind,
            greedy_limit: None,
        };
        verify_run(&ev.frames, ev.path.as_ref(), &ctx)
    }

    #[test]
    fn fresh_runs_pass() {
        for kind in [
            PathKind::Compression { per_step: 1 },
            PathKind::Compression { per_step: 3 },
            PathKind::Random { seed: 4, per_step: 2 },
            PathKind::Prune,
        ] {
            for backend in [Backend::Exact, Backend::Thinned] {
                let report = verify(kind, backend);
                assert!(report.all_passed(), "{kind:?} {backend}:\n{report}");
            }
        }
    }

    #[test]
    fn applicability_follows_path_kind() {
        let report = verify(PathKind::Prune, Backend::Exact);
        assert!(report.get("homotopy").unwrap().passed());
        assert!(report.get("complexity_lyapunov").unwrap().passed());
        assert!(matches!(
            report.get("minimality_lyapunov").unwrap().status,
            PropertyStatus::NotApplicable(_)
        ));
        let report = verify(PathKind::Compression { per_step: 1 }, Backend::Thinned);
        assert!(report.get("greedy_optimality").unwrap().passed());
        assert!(matches!(
            report.get("invariance_rotate90").unwrap().status,
            PropertyStatus::NotApplicable(_)
        ));
    }

    #[test]
    fn corrupted_area_is_caught_at_its_scale() {
        let (img, mut ev) = run(PathKind::Compression { per_step: 1 }, Backend::Exact);
        ev.frames[2].metrics.area = ev.frames[1].metrics.area + 1;
        let ctx = RunContext {
            original: &img,
            backend: Backend::Exact,
            path: PathKind::Compression { per_step: 1 },
            greedy_limit: None,
        };
        let report = verify_run(&ev.frames, ev.path.as_ref(), &ctx);
        assert!(!report.all_passed());
        assert_eq!(
            report.get("area_lyapunov").unwrap().status,
            PropertyStatus::Fail {
                scale: Some(2),
                detail: format!("area rises from {} to {}", ev.frames[1].metrics.area, ev.frames[1].metrics.area + 1)
            }
        );
        let kv = report.to_key_values();
        assert!(kv.contains("area_lyapunov=fail\narea_lyapunov.scale=2\n"));
        assert!(kv.ends_with("all_passed=false\n"));
    }

    #[test]
    fn tampered_image_breaks_causality() {
        let (img, mut ev) = run(PathKind::Random { seed: 1, per_step: 1 }, Backend::Exact);
        let last = ev.frames.len() - 1;
        ev.frames[last].image.set(PixelCoord::new(0, 0), true);
        let ctx = RunContext {
            original: &img,
            backend: Backend::Exact,
            path: PathKind::Random { seed: 1, per_step: 1 },
            greedy_limit: None,
        };
        let report = verify_run(&ev.frames, ev.path.as_ref(), &ctx);
        assert!(report.get("causality").unwrap().failed());
        assert!(report.get("steady_state").unwrap().failed());
    }

    #[test]
    fn non_greedy_order_is_flagged() {
        let (img, ev) = run(PathKind::Random { seed: 9, per_step: 1 }, Backend::Exact);
        let ctx = RunContext {
            original: &img,
            backend: Backend::Exact,
            path: PathKind::Compression { per_step: 1 },
            greedy_limit: None,
        };
        let report = verify_run(&ev.frames, ev.path.as_ref(), &ctx);
        assert!(report.get("greedy_optimality").unwrap().failed(), "{report}");
    }
}
