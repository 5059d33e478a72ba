//! Skeleton extraction (exact maximal discs and an MDT-style thinning),
//! disc-union reconstruction and the `SKEL2` text format.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use super::disc::{disc_contained, for_each_disc_pixel, open_reach, MedialPoint};
use super::distance::{distance_map, DistanceMap};
use crate::grid::{BinaryImage, PixelCoord, SquaredDistance, N8};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkeletonError {
    #[error("object covers the whole {width}x{height} canvas; the distance map is undefined")]
    FullFrame { width: usize, height: usize },
    #[error("distance map is {map:?} but the image is {image:?}")]
    DimensionMismatch {
        image: (usize, usize),
        map: (usize, usize),
    },
    #[error("duplicate skeleton point {0}")]
    DuplicatePoint(PixelCoord),
    #[error("skeleton point {0} outside the {1}x{2} canvas")]
    OutOfCanvas(PixelCoord, usize, usize),
    #[error("skeleton point {0} has zero radius")]
    ZeroRadius(PixelCoord),
    #[error("SKEL2 parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Which skeletonisation to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Backend {
    /// Every pixel whose disc is not contained in another pixel's disc.
    Exact,
    /// Homotopic thinning anchored at local maxima of the distance map.
    #[default]
    Thinned,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Thinned => "thinned",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Backend::Exact),
            "thinned" => Ok(Backend::Thinned),
            other => Err(format!("unknown backend {other:?} (expected exact|thinned)")),
        }
    }
}

/// A finite set of medial points on a canvas, keyed by position.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Skeleton {
    width: usize,
    height: usize,
    points: BTreeMap<PixelCoord, SquaredDistance>,
}

impl fmt::Debug for Skeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Skeleton")
            .field("dims", &(self.width, self.height))
            .field("points", &self.points)
            .finish()
    }
}

impl Skeleton {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            points: BTreeMap::new(),
        }
    }

    pub fn from_points(
        width: usize,
        height: usize,
        points: impl IntoIterator<Item = MedialPoint>,
    ) -> Result<Self, SkeletonError> {
        let mut skel = Self::empty(width, height);
        for mp in points {
            if mp.pos.x >= width || mp.pos.y >= height {
                return Err(SkeletonError::OutOfCanvas(mp.pos, width, height));
            }
            if mp.radius2.0 == 0 {
                return Err(SkeletonError::ZeroRadius(mp.pos));
            }
            if skel.points.insert(mp.pos, mp.radius2).is_some() {
                return Err(SkeletonError::DuplicatePoint(mp.pos));
            }
        }
        Ok(skel)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, pos: PixelCoord) -> bool {
        self.points.contains_key(&pos)
    }

    pub fn radius2(&self, pos: PixelCoord) -> Option<SquaredDistance> {
        self.points.get(&pos).copied()
    }

    pub fn point(&self, pos: PixelCoord) -> Option<MedialPoint> {
        self.radius2(pos).map(|radius2| MedialPoint { pos, radius2 })
    }

    /// Points in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = MedialPoint> + '_ {
        self.points
            .iter()
            .map(|(&pos, &radius2)| MedialPoint { pos, radius2 })
    }

    /// Positions in row-major order.
    pub fn positions(&self) -> impl Iterator<Item = PixelCoord> + '_ {
        self.points.keys().copied()
    }

    pub fn remove(&mut self, pos: PixelCoord) -> Option<MedialPoint> {
        self.points
            .remove(&pos)
            .map(|radius2| MedialPoint { pos, radius2 })
    }

    /// Copy of `self` without the given positions; absent positions are ignored.
    pub fn without<'a>(&self, removed: impl IntoIterator<Item = &'a PixelCoord>) -> Skeleton {
        let mut out = self.clone();
        for p in removed {
            out.points.remove(p);
        }
        out
    }

    /// Skeleton restricted to the given positions; absent positions are ignored.
    pub fn subset<'a>(&self, keep: impl IntoIterator<Item = &'a PixelCoord>) -> Skeleton {
        let mut out = Skeleton::empty(self.width, self.height);
        for p in keep {
            if let Some(r) = self.points.get(p) {
                out.points.insert(*p, *r);
            }
        }
        out
    }

    /// Serialize in the `SKEL2` text format.
    pub fn to_skel2(&self) -> String {
        let mut out = format!("SKEL2 {} {} {}\n", self.width, self.height, self.len());
        for mp in self.iter() {
            out.push_str(&format!("{} {} {}\n", mp.pos.x, mp.pos.y, mp.radius2.0));
        }
        out
    }

    /// Parse the `SKEL2` text format. Records must be sorted row-major.
    pub fn from_skel2(text: &str) -> Result<Skeleton, SkeletonError> {
        let parse_err = |line: usize, message: String| SkeletonError::Parse { line, message };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing header".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "SKEL2" {
            return Err(parse_err(1, format!("bad header {header:?}")));
        }
        let num = |s: &str, line: usize| -> Result<u64, SkeletonError> {
            s.parse::<u64>()
                .map_err(|_| parse_err(line, format!("expected integer, got {s:?}")))
        };
        let width = num(fields[1], 1)? as usize;
        let height = num(fields[2], 1)? as usize;
        let count = num(fields[3], 1)? as usize;
        if width == 0 || height == 0 {
            return Err(parse_err(1, "canvas dimensions must be positive".into()));
        }

        let mut records = Vec::with_capacity(count);
        let mut previous: Option<PixelCoord> = None;
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(parse_err(lineno, format!("expected 'x y radius2', got {line:?}")));
            }
            let pos = PixelCoord::new(num(f[0], lineno)? as usize, num(f[1], lineno)? as usize);
            if previous.is_some_and(|prev| prev >= pos) {
                return Err(parse_err(lineno, format!("record {pos} out of row-major order")));
            }
            previous = Some(pos);
            records.push(MedialPoint::new(pos, num(f[2], lineno)?));
        }
        if records.len() != count {
            return Err(parse_err(
                1,
                format!("header announces {count} records, found {}", records.len()),
            ));
        }
        Skeleton::from_points(width, height, records)
    }
}

fn check_inputs(image: &BinaryImage, dm: &DistanceMap) -> Result<(), SkeletonError> {
    if image.dims() != dm.dims() {
        return Err(SkeletonError::DimensionMismatch {
            image: image.dims(),
            map: dm.dims(),
        });
    }
    if dm.is_full_frame() {
        return Err(SkeletonError::FullFrame {
            width: image.width(),
            height: image.height(),
        });
    }
    Ok(())
}

/// All object pixels whose clipped disc is not contained in the disc of any
/// other object pixel. Of two pixels with identical discs, the row-major
/// smaller one is kept.
pub fn exact_skeleton(image: &BinaryImage, dm: &DistanceMap) -> Result<Skeleton, SkeletonError> {
    check_inputs(image, dm)?;
    let dims = image.dims();
    let (w, h) = (dims.0 as i64, dims.1 as i64);
    let reach = open_reach(dm.max_finite()).unwrap_or(0) as i64;
    let mut skel = Skeleton::empty(dims.0, dims.1);

    for x_pos in image.object_pixels() {
        let inner = MedialPoint {
            pos: x_pos,
            radius2: dm.get(x_pos),
        };
        let (cx, cy) = (x_pos.x as i64, x_pos.y as i64);
        let mut maximal = true;
        'search: for yy in (cy - reach).max(0)..=(cy + reach).min(h - 1) {
            for xx in (cx - reach).max(0)..=(cx + reach).min(w - 1) {
                let y_pos = PixelCoord::new(xx as usize, yy as usize);
                if y_pos == x_pos || !image.get(y_pos) {
                    continue;
                }
                let outer = MedialPoint {
                    pos: y_pos,
                    radius2: dm.get(y_pos),
                };
                // A containing disc must cover the inner centre.
                if x_pos.dist2(y_pos) >= outer.radius2 {
                    continue;
                }
                if disc_contained(inner, outer, dims)
                    && (y_pos < x_pos || !disc_contained(outer, inner, dims))
                {
                    maximal = false;
                    break 'search;
                }
            }
        }
        if maximal {
            skel.points.insert(x_pos, inner.radius2);
        }
    }
    Ok(skel)
}

/// Ring offsets in circular order, starting north-west.
const RING: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
];

fn simple_table() -> &'static [bool; 256] {
    static TABLE: OnceLock<[bool; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [false; 256];
        for (pattern, entry) in table.iter_mut().enumerate() {
            *entry = is_simple_pattern(pattern as u8);
        }
        table
    })
}

/// Simple-point test for 8-connected objects with a 4-connected background.
/// Bit `i` of `pattern` is set when ring position `RING[i]` is object.
fn is_simple_pattern(pattern: u8) -> bool {
    let object = |i: usize| pattern & (1 << i) != 0;
    let count = |member: &dyn Fn(usize) -> bool,
                 adjacent: &dyn Fn(usize, usize) -> bool,
                 seed: &dyn Fn(usize) -> bool| {
        let mut label = [usize::MAX; 8];
        let mut components = 0;
        for start in 0..8 {
            if !member(start) || label[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            label[start] = start;
            let mut touches = false;
            while let Some(i) = stack.pop() {
                touches |= seed(i);
                for j in (0..8).filter(|&j| member(j) && adjacent(i, j)) {
                    if label[j] == usize::MAX {
                        label[j] = start;
                        stack.push(j);
                    }
                }
            }
            if touches {
                components += 1;
            }
        }
        components
    };
    let diff = |i: usize, j: usize| {
        let (a, b) = (RING[i], RING[j]);
        ((a.0 - b.0).abs(), (a.1 - b.1).abs())
    };
    let adj8 = |i: usize, j: usize| {
        let (dx, dy) = diff(i, j);
        dx <= 1 && dy <= 1
    };
    let adj4 = |i: usize, j: usize| {
        let (dx, dy) = diff(i, j);
        dx + dy == 1
    };
    let is_edge_neighbour = |i: usize| RING[i].0 == 0 || RING[i].1 == 0;

    let object_components = count(&object, &adj8, &|_| true);
    let background_components = count(&|i| !object(i), &adj4, &is_edge_neighbour);
    object_components == 1 && background_components == 1
}

fn ring_pattern(image: &BinaryImage, p: PixelCoord) -> u8 {
    RING.iter().enumerate().fold(0u8, |acc, (i, &(dx, dy))| {
        if image.get_signed(p.x as i64 + dx, p.y as i64 + dy) {
            acc | (1 << i)
        } else {
            acc
        }
    })
}

/// Whether removing object pixel `p` leaves the topology of `image`
/// unchanged (8-connected object, 4-connected background).
pub fn is_simple(image: &BinaryImage, p: PixelCoord) -> bool {
    image.get(p) && simple_table()[ring_pattern(image, p) as usize]
}

fn neighbour_count(image: &BinaryImage, p: PixelCoord) -> usize {
    N8.iter()
        .filter(|&&(dx, dy)| image.get_signed(p.x as i64 + dx, p.y as i64 + dy))
        .count()
}

/// Object pixels whose distance value is at least that of every 8-neighbour
/// object pixel.
pub fn anchor_pixels(image: &BinaryImage, dm: &DistanceMap) -> Vec<PixelCoord> {
    image
        .object_pixels()
        .filter(|&p| {
            let here = dm.get(p);
            N8.iter().all(|&(dx, dy)| match p.offset(dx, dy) {
                Some(q) if image.get(q) => dm.get(q) <= here,
                _ => true,
            })
        })
        .collect()
}

/// MDT-style thinning: anchors are the local maxima of the distance map;
/// repeated passes visit the remaining pixels in ascending distance order
/// (row-major among ties) and delete those that are simple in the current
/// image. Stops when a pass deletes nothing.
///
/// Plateaus of equal distance values leave two-pixel-wide anchor ridges, so
/// a second phase peels simple pixels that are not line ends from one side
/// at a time (north, east, south, west) until a full round deletes nothing.
/// Radii come from `dm`.
pub fn thinned_skeleton(image: &BinaryImage, dm: &DistanceMap) -> Result<Skeleton, SkeletonError> {
    check_inputs(image, dm)?;
    let mut current = image.clone();
    let mut anchor = vec![false; image.len()];
    for p in anchor_pixels(image, dm) {
        anchor[image.index(p)] = true;
    }
    let mut candidates: Vec<(SquaredDistance, PixelCoord)> = image
        .object_pixels()
        .filter(|&p| !anchor[image.index(p)])
        .map(|p| (dm.get(p), p))
        .collect();
    candidates.sort_unstable();

    loop {
        let mut removed_any = false;
        candidates.retain(|&(_, p)| {
            if is_simple(&current, p) {
                current.set(p, false);
                removed_any = true;
                false
            } else {
                true
            }
        });
        if !removed_any {
            break;
        }
    }

    let mut remaining: Vec<(SquaredDistance, PixelCoord)> =
        current.object_pixels().map(|p| (dm.get(p), p)).collect();
    remaining.sort_unstable();
    loop {
        let mut removed_any = false;
        for (dx, dy) in [(0, -1), (1, 0), (0, 1), (-1, 0)] {
            let exposed: Vec<bool> = remaining
                .iter()
                .map(|&(_, p)| !current.get_signed(p.x as i64 + dx, p.y as i64 + dy))
                .collect();
            let mut exposed = exposed.into_iter();
            remaining.retain(|&(_, p)| {
                let exposed = exposed.next().expect("one flag per pixel");
                if exposed && neighbour_count(&current, p) >= 2 && is_simple(&current, p) {
                    current.set(p, false);
                    removed_any = true;
                    false
                } else {
                    true
                }
            });
        }
        if !removed_any {
            break;
        }
    }

    let mut skel = Skeleton::empty(image.width(), image.height());
    for p in current.object_pixels() {
        skel.points.insert(p, dm.get(p));
    }
    Ok(skel)
}

/// Compute the distance map and run the chosen backend.
pub fn skeletonize(image: &BinaryImage, backend: Backend) -> Result<Skeleton, SkeletonError> {
    let dm = distance_map(image);
    match backend {
        Backend::Exact => exact_skeleton(image, &dm),
        Backend::Thinned => thinned_skeleton(image, &dm),
    }
}

/// Union of the clipped open discs of all skeleton points.
pub fn reconstruct(skeleton: &Skeleton) -> BinaryImage {
    let (w, h) = skeleton.dims();
    let mut mask = vec![false; w * h];
    for mp in skeleton.iter() {
        for_each_disc_pixel(mp.pos, mp.radius2, (w, h), |p| mask[p.y * w + p.x] = true);
    }
    BinaryImage::from_mask(w, h, mask).expect("skeleton canvas is non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn skel_of(rows: &[&str], backend: Backend) -> Skeleton {
        skeletonize(&BinaryImage::from_ascii(rows), backend).unwrap()
    }

    fn listed(s: &Skeleton) -> Vec<(usize, usize, u64)> {
        s.iter().map(|m| (m.pos.x, m.pos.y, m.radius2.0)).collect()
    }

    #[test]
    fn single_pixel_both_backends() {
        for b in [Backend::Exact, Backend::Thinned] {
            assert_eq!(listed(&skel_of(&["...", ".#.", "..."], b)), vec![(1, 1, 1)]);
        }
    }

    #[test]
    fn block_has_one_centre() {
        let s = skel_of(&[".....", ".###.", ".###.", ".###.", "....."], Backend::Exact);
        assert_eq!(listed(&s), vec![(2, 2, 4)]);
    }

    #[test]
    fn bar_is_its_own_skeleton() {
        let rows = [".......", ".#####.", "......."];
        for b in [Backend::Exact, Backend::Thinned] {
            let s = skel_of(&rows, b);
            assert_eq!(listed(&s), (1..=5).map(|x| (x, 1, 1)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn full_frame_is_rejected() {
        let err = skeletonize(&BinaryImage::from_ascii(&["##", "##"]), Backend::Exact).unwrap_err();
        assert_eq!(err, SkeletonError::FullFrame { width: 2, height: 2 });
    }

    #[test]
    fn empty_object_gives_empty_skeleton() {
        let img = BinaryImage::new(5, 4).unwrap();
        for b in [Backend::Exact, Backend::Thinned] {
            assert!(skeletonize(&img, b).unwrap().is_empty());
        }
        assert!(!reconstruct(&Skeleton::empty(5, 4)).has_object());
    }

    #[test]
    fn reconstruct_block() {
        let img = BinaryImage::from_ascii(&[".....", ".###.", ".###.", ".###.", "....."]);
        let s = Skeleton::from_points(5, 5, [MedialPoint::new(PixelCoord::new(2, 2), 4)]).unwrap();
        assert_eq!(reconstruct(&s), img);
    }

    #[test]
    fn simple_point_table() {
        // Isolated pixel and interior pixel are not simple.
        assert!(!is_simple_pattern(0));
        assert!(!is_simple_pattern(0xff));
        // Line end: a single neighbour.
        assert!(is_simple_pattern(0b0000_1000));
        // Middle of a horizontal line: west and east neighbours.
        assert!(!is_simple_pattern(0b1000_1000));
        // Corner of a block: east, south-east, south.
        assert!(is_simple_pattern(0b0011_1000));
    }

    #[test]
    fn even_width_ridge_is_thinned_to_one_pixel() {
        let mut rows = vec!["............"];
        rows.extend(std::iter::repeat_n(".##########.", 4));
        rows.push("............");
        let s = skel_of(&rows, Backend::Thinned);
        let pts: Vec<PixelCoord> = s.positions().collect();
        let block = pts.iter().any(|p| {
            [(1, 0), (0, 1), (1, 1)]
                .iter()
                .all(|&(dx, dy)| p.offset(dx, dy).is_some_and(|q| s.contains(q)))
        });
        assert!(!block, "{pts:?}");
        assert!(s.len() >= 6);
        let img = BinaryImage::from_ascii(&rows);
        assert!(reconstruct(&s).is_subset_of(&img));
    }

    #[test]
    fn thinning_preserves_holes() {
        let rows = [
            ".......",
            ".#####.",
            ".#####.",
            ".##.##.",
            ".#####.",
            ".#####.",
            ".......",
        ];
        let img = BinaryImage::from_ascii(&rows);
        let s = skeletonize(&img, Backend::Thinned).unwrap();
        let ring = BinaryImage::from_pixels(7, 7, s.positions()).unwrap();
        // The hole survives: its pixel is still enclosed by the skeleton.
        assert!(!ring.get(PixelCoord::new(3, 3)));
        assert!(crate::grid::count_components(
            (0..49).map(|i| PixelCoord::new(i % 7, i / 7)).filter(|&p| !ring.get(p)),
            crate::grid::Connectivity::Four
        ) == 2);
        assert!(reconstruct(&s).is_subset_of(&img));
    }

    #[test]
    fn skel2_round_trip_and_errors() {
        let s = Skeleton::from_points(
            4,
            3,
            [MedialPoint::new(PixelCoord::new(2, 0), 1), MedialPoint::new(PixelCoord::new(1, 2), 4)],
        )
        .unwrap();
        let text = s.to_skel2();
        assert_eq!(text, "SKEL2 4 3 2\n2 0 1\n1 2 4\n");
        assert_eq!(Skeleton::from_skel2(&text).unwrap(), s);
        assert!(matches!(
            Skeleton::from_skel2("SKEL2 4 3 2\n1 2 4\n2 0 1\n"),
            Err(SkeletonError::Parse { line: 3, .. })
        ));
        assert!(matches!(
            Skeleton::from_skel2("SKEL2 4 3 1\n"),
            Err(SkeletonError::Parse { line: 1, .. })
        ));
        assert_eq!(
            Skeleton::from_skel2("SKEL2 4 3 1\n9 0 1\n").unwrap_err(),
            SkeletonError::OutOfCanvas(PixelCoord::new(9, 0), 4, 3)
        );
    }
}
