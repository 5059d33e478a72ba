//! Per-frame measurements and the `metrics.csv` format.
//!
//! Every ratio is kept as an exact integer pair and compared by
//! cross-multiplication; floats only appear when rendering.

mod compare;
mod verify;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::grid::{count_components, BinaryImage, Connectivity, PixelCoord};
use crate::medial_axis::Skeleton;
use crate::paths::classify_points;

pub use compare::{compare_paths, comparison_csv, CompareError, ComparisonRow, RunSummary};
pub use verify::{
    invariance_transforms, verify_run, PathKind, PropertyResult, PropertyStatus, RunContext,
    VerificationReport,
};

/// An exact non-negative fraction. A zero denominator means undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub const fn new(num: u64, den: u64) -> Self {
        Self { num, den }
    }

    pub fn is_defined(self) -> bool {
        self.den != 0
    }

    /// Exact comparison; `None` if either side is undefined.
    pub fn cmp_exact(self, other: Ratio) -> Option<Ordering> {
        if !self.is_defined() || !other.is_defined() {
            return None;
        }
        let lhs = u128::from(self.num) * u128::from(other.den);
        let rhs = u128::from(other.num) * u128::from(self.den);
        Some(lhs.cmp(&rhs))
    }

    pub fn to_f64(self) -> Option<f64> {
        self.is_defined().then(|| self.num as f64 / self.den as f64)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_defined() {
            write!(f, "{}/{}", self.num, self.den)
        } else {
            f.write_str("n/a")
        }
    }
}

/// The measurements of one scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MetricRecord {
    pub scale: usize,
    /// `|Σ_ℓ|`
    pub skel_count: usize,
    /// `|O_ℓ|`
    pub area: usize,
    /// Squared diameter of `O_ℓ`, 0 for an empty object.
    pub diameter2: u64,
    /// `(|O_0| - |O_ℓ|) / |O_0|`
    pub rel_error: Ratio,
    /// `|Σ_ℓ| / |O_ℓ|`
    pub minimality: Ratio,
    /// Endpoints plus branching points of `Σ_ℓ`.
    pub complexity: usize,
    /// 8-connected components of `Σ_ℓ`.
    pub components: usize,
}

impl MetricRecord {
    /// Missing pixels relative to scale 0, `|O_0| - |O_ℓ|`.
    pub fn err(&self) -> u64 {
        self.rel_error.num
    }
}

/// Measure one frame against the baseline area `|O_0|`.
pub fn compute_metrics(
    scale: usize,
    sigma: &Skeleton,
    image: &BinaryImage,
    baseline_area: usize,
) -> MetricRecord {
    let area = image.area();
    let points: BTreeSet<PixelCoord> = sigma.positions().collect();
    let classes = classify_points(&points);
    MetricRecord {
        scale,
        skel_count: sigma.len(),
        area,
        diameter2: diameter2(image),
        rel_error: Ratio::new(baseline_area.saturating_sub(area) as u64, baseline_area as u64),
        minimality: Ratio::new(sigma.len() as u64, area as u64),
        complexity: classes.complexity(),
        components: count_components(points.iter().copied(), Connectivity::Eight),
    }
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Convex hull of pixel centres (monotone chain), counter-clockwise without
/// collinear points.
pub fn convex_hull(points: &[PixelCoord]) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = points.iter().map(|p| (p.x as i64, p.y as i64)).collect();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(i64, i64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Largest squared distance between two object pixels, 0 when empty.
pub fn diameter2(image: &BinaryImage) -> u64 {
    let pixels: Vec<PixelCoord> = image.object_pixels().collect();
    let hull = convex_hull(&pixels);
    let mut best = 0;
    for (i, a) in hull.iter().enumerate() {
        for b in &hull[i + 1..] {
            let (dx, dy) = (a.0 - b.0, a.1 - b.1);
            best = best.max((dx * dx + dy * dy) as u64);
        }
    }
    best
}

pub const METRICS_CSV_HEADER: &str = "scale,skel_count,area,diameter2,rel_error_num,rel_error_den,minimality_num,minimality_den,complexity,components";

/// Render records as `metrics.csv`.
pub fn metrics_csv(records: &[MetricRecord]) -> String {
    let mut out = String::from(METRICS_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.scale,
            r.skel_count,
            r.area,
            r.diameter2,
            r.rel_error.num,
            r.rel_error.den,
            r.minimality.num,
            r.minimality.den,
            r.complexity,
            r.components
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("metrics.csv line {line}: {message}")]
pub struct MetricsCsvError {
    pub line: usize,
    pub message: String,
}

/// Parse `metrics.csv`.
pub fn parse_metrics_csv(text: &str) -> Result<Vec<MetricRecord>, MetricsCsvError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == METRICS_CSV_HEADER => {}
        _ => {
            return Err(MetricsCsvError {
                line: 1,
                message: "missing or unexpected header".into(),
            })
        }
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| MetricsCsvError { line: idx + 1, message };
        let v: Vec<u64> = line
            .split(',')
            .map(|f| f.trim().parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|e| err(e.to_string()))?;
        if v.len() != 10 {
            return Err(err(format!("expected 10 fields, found {}", v.len())));
        }
        out.push(MetricRecord {
            scale: v[0] as usize,
            skel_count: v[1] as usize,
            area: v[2] as usize,
            diameter2: v[3],
            rel_error: Ratio::new(v[4], v[5]),
            minimality: Ratio::new(v[6], v[7]),
            complexity: v[8] as usize,
            components: v[9] as usize,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medial_axis::{skeletonize, Backend};
    use crate::paths::compression_path;
    use crate::scale_space::evolve;
    use proptest::prelude::*;

    fn bar_image() -> BinaryImage {
        BinaryImage::from_ascii(&[".......", ".#####.", "......."])
    }

    #[test]
    fn bar_frame_zero() {
        let img = bar_image();
        let s = skeletonize(&img, Backend::Exact).unwrap();
        let m = compute_metrics(0, &s, &img, 5);
        assert_eq!(m.area, 5);
        assert_eq!(m.diameter2, 16);
        assert_eq!(m.rel_error, Ratio::new(0, 5));
        assert_eq!(m.minimality, Ratio::new(5, 5));
        assert_eq!(m.complexity, 2);
        assert_eq!(m.components, 1);
    }

    #[test]
    fn bar_compression_errors() {
        let s = skeletonize(&bar_image(), Backend::Exact).unwrap();
        let ev = evolve(&s, &mut compression_path(1)).unwrap();
        assert_eq!(ev.frames[2].metrics.rel_error, Ratio::new(2, 5));
        let last = ev.frames.last().unwrap().metrics;
        assert_eq!((last.area, last.diameter2), (0, 0));
        assert_eq!(last.rel_error, Ratio::new(5, 5));
        assert!(!last.minimality.is_defined());
    }

    #[test]
    fn ratio_comparison_is_exact() {
        assert_eq!(Ratio::new(1, 3).cmp_exact(Ratio::new(2, 6)), Some(Ordering::Equal));
        assert_eq!(Ratio::new(1, 3).cmp_exact(Ratio::new(1, 2)), Some(Ordering::Less));
        assert_eq!(Ratio::new(1, 0).cmp_exact(Ratio::new(1, 2)), None);
        let big = u64::MAX - 1;
        assert_eq!(Ratio::new(big, big - 1).cmp_exact(Ratio::new(big - 1, big - 2)), Some(Ordering::Less));
    }

    #[test]
    fn csv_round_trip() {
        let s = skeletonize(&bar_image(), Backend::Exact).unwrap();
        let ev = evolve(&s, &mut compression_path(1)).unwrap();
        let recs: Vec<MetricRecord> = ev.frames.iter().map(|f| f.metrics).collect();
        let text = metrics_csv(&recs);
        assert!(text.starts_with("scale,skel_count,area,diameter2,rel_error_num,rel_error_den,minimality_num,minimality_den,complexity,components\n0,5,5,16,0,5,5,5,2,1\n"));
        assert_eq!(parse_metrics_csv(&text).unwrap(), recs);
        assert!(parse_metrics_csv("nope\n").is_err());
    }

    fn brute_diameter2(img: &BinaryImage) -> u64 {
        let px: Vec<PixelCoord> = img.object_pixels().collect();
        px.iter()
            .flat_map(|a| px.iter().map(move |b| a.dist2(*b).0))
            .max()
            .unwrap_or(0)
    }

    proptest! {
        #[test]
        fn hull_diameter_matches_all_pairs(
            (w, h, mask) in (1usize..=24, 1usize..=24)
                .prop_flat_map(|(w, h)| (Just(w), Just(h), proptest::collection::vec(prop::bool::weighted(0.2), w * h)))
        ) {
            let img = BinaryImage::from_mask(w, h, mask).unwrap();
            prop_assert_eq!(diameter2(&img), brute_diameter2(&img));
        }
    }
}
