//! Binary images on a rectangular pixel grid, exact grid geometry and the
//! on-grid transforms (translations, quarter-turn rotations, axis mirrors).
//!
//! Coordinates are 0-based with `x` the column and `y` the row. Pixels are
//! ordered row-major everywhere in the crate, which is also the tie-break
//! order used by every deterministic selection rule.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Errors raised when constructing or transforming images.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("image dimensions must be positive, got {width}x{height}")]
    EmptyCanvas { width: usize, height: usize },
    #[error("mask has {actual} entries, expected {expected}")]
    MaskLength { expected: usize, actual: usize },
    #[error("translation by ({dx}, {dy}) moves object pixel {pixel} outside the canvas")]
    OutOfCanvas { dx: i64, dy: i64, pixel: PixelCoord },
}

/// A pixel position. Ordering is row-major: first by `y`, then by `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PixelCoord {
    pub x: usize,
    pub y: usize,
}

impl PixelCoord {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }

    /// Squared Euclidean distance between pixel centres.
    pub fn dist2(self, other: PixelCoord) -> SquaredDistance {
        let dx = self.x.abs_diff(other.x) as u64;
        let dy = self.y.abs_diff(other.y) as u64;
        SquaredDistance(dx * dx + dy * dy)
    }

    /// Offset by a signed vector, `None` if a coordinate would become negative.
    pub fn offset(self, dx: i64, dy: i64) -> Option<PixelCoord> {
        let x = self.x as i64 + dx;
        let y = self.y as i64 + dy;
        (x >= 0 && y >= 0).then(|| PixelCoord::new(x as usize, y as usize))
    }

    /// True if the two pixels are distinct and share an edge.
    pub fn is_4_adjacent(self, other: PixelCoord) -> bool {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y) == 1
    }

    /// True if the two pixels are distinct and share an edge or a corner.
    pub fn is_8_adjacent(self, other: PixelCoord) -> bool {
        self != other && self.x.abs_diff(other.x) <= 1 && self.y.abs_diff(other.y) <= 1
    }
}

impl Ord for PixelCoord {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for PixelCoord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PixelCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// An exact squared Euclidean distance in pixel units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SquaredDistance(pub u64);

impl SquaredDistance {
    /// Sentinel for pixels with no background pixel anywhere on the canvas.
    pub const INFINITE: SquaredDistance = SquaredDistance(u64::MAX);

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self == Self::INFINITE
    }

    /// Floating-point distance, for human-facing reports only.
    pub fn sqrt(self) -> f64 {
        (self.0 as f64).sqrt()
    }
}

impl fmt::Display for SquaredDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Pixel adjacency used for connectivity questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    pub fn offsets(self) -> &'static [(i64, i64)] {
        match self {
            Connectivity::Four => &N4,
            Connectivity::Eight => &N8,
        }
    }
}

pub(crate) const N4: [(i64, i64); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
/// 8-neighbourhood offsets in row-major order.
pub(crate) const N8: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// A rectangular bitmask: `true` marks the object, `false` the background.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    mask: Vec<bool>,
}

impl fmt::Debug for BinaryImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryImage {}x{}", self.width, self.height)?;
        for y in 0..self.height {
            let row: String = (0..self.width)
                .map(|x| if self.mask[y * self.width + x] { '#' } else { '.' })
                .collect();
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

impl BinaryImage {
    /// An all-background image.
    pub fn new(width: usize, height: usize) -> Result<Self, GridError> {
        if width == 0 || height == 0 {
            return Err(GridError::EmptyCanvas { width, height });
        }
        Ok(Self {
            width,
            height,
            mask: vec![false; width * height],
        })
    }

    pub fn from_mask(width: usize, height: usize, mask: Vec<bool>) -> Result<Self, GridError> {
        if width == 0 || height == 0 {
            return Err(GridError::EmptyCanvas { width, height });
        }
        if mask.len() != width * height {
            return Err(GridError::MaskLength {
                expected: width * height,
                actual: mask.len(),
            });
        }
        Ok(Self { width, height, mask })
    }

    /// Builds an image from rows of `#` (object) and any other character
    /// (background). Intended for fixtures; panics on ragged or empty input.
    pub fn from_ascii(rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut mask = Vec::with_capacity(width * height);
        for row in rows {
            assert_eq!(row.chars().count(), width, "ragged ascii image");
            mask.extend(row.chars().map(|c| c == '#'));
        }
        Self::from_mask(width, height, mask).expect("non-empty ascii image")
    }

    pub fn from_pixels(
        width: usize,
        height: usize,
        pixels: impl IntoIterator<Item = PixelCoord>,
    ) -> Result<Self, GridError> {
        let mut img = Self::new(width, height)?;
        for p in pixels {
            img.set(p, true);
        }
        Ok(img)
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
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn index(&self, p: PixelCoord) -> usize {
        p.y * self.width + p.x
    }

    pub fn coord(&self, index: usize) -> PixelCoord {
        PixelCoord::new(index % self.width, index / self.width)
    }

    pub fn contains(&self, p: PixelCoord) -> bool {
        p.x < self.width && p.y < self.height
    }

    /// Object membership; pixels outside the canvas are background.
    pub fn get(&self, p: PixelCoord) -> bool {
        self.contains(p) && self.mask[p.y * self.width + p.x]
    }

    /// Membership of a signed position; outside the canvas is background.
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.mask[y as usize * self.width + x as usize]
    }

    /// Sets a pixel. Panics if `p` lies outside the canvas.
    pub fn set(&mut self, p: PixelCoord, value: bool) {
        assert!(self.contains(p), "pixel {p} outside {}x{} canvas", self.width, self.height);
        let i = self.index(p);
        self.mask[i] = value;
    }

    /// Number of object pixels.
    pub fn area(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn has_object(&self) -> bool {
        self.mask.iter().any(|&b| b)
    }

    /// Object pixels in row-major order.
    pub fn object_pixels(&self) -> impl Iterator<Item = PixelCoord> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| PixelCoord::new(i % self.width, i / self.width))
    }

    /// True if every object pixel of `self` is also an object pixel of
    /// `other`. Images of different sizes compare by position.
    pub fn is_subset_of(&self, other: &BinaryImage) -> bool {
        self.object_pixels().all(|p| other.get(p))
    }

    /// Apply an on-grid transform. Rotations and mirrors keep the canvas
    /// (rotations by 90° and 270° swap its sides); translations follow
    /// `policy`.
    pub fn transform(&self, t: Transform, policy: CanvasPolicy) -> Result<BinaryImage, GridError> {
        let (w, h) = t.output_dims(self.dims(), policy);
        let mut out = BinaryImage::new(w, h)?;
        for p in self.object_pixels() {
            let q = t.apply_within(p, self.dims(), policy)?;
            out.set(q, true);
        }
        Ok(out)
    }
}

/// What a translation does when the object would leave the canvas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CanvasPolicy {
    /// Keep the canvas; an object pixel leaving it is an error.
    #[default]
    Clip,
    /// Extend the canvas to the right and bottom by the positive parts of the
    /// shift. Shifts towards negative coordinates never grow the canvas.
    Grow,
}

/// The on-grid transforms that preserve discrete shapes exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transform {
    Translate { dx: i64, dy: i64 },
    /// Quarter turn clockwise (in image coordinates, y pointing down).
    Rotate90,
    Rotate180,
    Rotate270,
    /// Left-right flip.
    MirrorHorizontal,
    /// Top-bottom flip.
    MirrorVertical,
}

impl Transform {
    pub fn name(self) -> String {
        match self {
            Transform::Translate { dx, dy } => format!("translate({dx},{dy})"),
            Transform::Rotate90 => "rotate90".into(),
            Transform::Rotate180 => "rotate180".into(),
            Transform::Rotate270 => "rotate270".into(),
            Transform::MirrorHorizontal => "mirror_h".into(),
            Transform::MirrorVertical => "mirror_v".into(),
        }
    }

    /// Canvas dimensions after the transform.
    pub fn output_dims(self, (w, h): (usize, usize), policy: CanvasPolicy) -> (usize, usize) {
        match self {
            Transform::Rotate90 | Transform::Rotate270 => (h, w),
            Transform::Translate { dx, dy } if policy == CanvasPolicy::Grow => {
                (w + dx.max(0) as usize, h + dy.max(0) as usize)
            }
            _ => (w, h),
        }
    }

    /// Image of a single pixel on a canvas of the given size.
    pub fn apply_within(
        self,
        p: PixelCoord,
        dims: (usize, usize),
        policy: CanvasPolicy,
    ) -> Result<PixelCoord, GridError> {
        let (w, h) = dims;
        let q = match self {
            Transform::Rotate90 => PixelCoord::new(h - 1 - p.y, p.x),
            Transform::Rotate180 => PixelCoord::new(w - 1 - p.x, h - 1 - p.y),
            Transform::Rotate270 => PixelCoord::new(p.y, w - 1 - p.x),
            Transform::MirrorHorizontal => PixelCoord::new(w - 1 - p.x, p.y),
            Transform::MirrorVertical => PixelCoord::new(p.x, h - 1 - p.y),
            Transform::Translate { dx, dy } => {
                let err = GridError::OutOfCanvas { dx, dy, pixel: p };
                let q = p.offset(dx, dy).ok_or_else(|| err.clone())?;
                let (ow, oh) = self.output_dims(dims, policy);
                if q.x >= ow || q.y >= oh {
                    return Err(err);
                }
                q
            }
        };
        Ok(q)
    }
}

/// Partition `pixels` into maximal connected subsets under `connectivity`.
///
/// Each component is sorted row-major and components are ordered by their
/// first pixel. Duplicate input pixels are ignored.
pub fn connected_components(
    pixels: impl IntoIterator<Item = PixelCoord>,
    connectivity: Connectivity,
) -> Vec<Vec<PixelCoord>> {
    let mut sorted: Vec<PixelCoord> = pixels.into_iter().collect();
    sorted.sort_unstable();
    sorted.dedup();
    let members: HashSet<PixelCoord> = sorted.iter().copied().collect();
    let mut seen: HashSet<PixelCoord> = HashSet::with_capacity(members.len());
    let mut components = Vec::new();
    let mut queue = VecDeque::new();

    for &start in &sorted {
        if !seen.insert(start) {
            continue;
        }
        let mut component = vec![start];
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            for &(dx, dy) in connectivity.offsets() {
                if let Some(q) = p.offset(dx, dy) {
                    if members.contains(&q) && seen.insert(q) {
                        component.push(q);
                        queue.push_back(q);
                    }
                }
            }
        }
        component.sort_unstable();
        components.push(component);
    }
    components
}

/// Number of connected components of `pixels`.
pub fn count_components(
    pixels: impl IntoIterator<Item = PixelCoord>,
    connectivity: Connectivity,
) -> usize {
    connected_components(pixels, connectivity).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn objects(img: &BinaryImage) -> Vec<PixelCoord> {
        img.object_pixels().collect()
    }

    fn sample() -> BinaryImage {
        BinaryImage::from_ascii(&["##...", ".#...", ".###."])
    }

    #[test]
    fn row_major_order() {
        let mut v = vec![PixelCoord::new(3, 0), PixelCoord::new(0, 1), PixelCoord::new(1, 0)];
        v.sort();
        assert_eq!(v, vec![PixelCoord::new(1, 0), PixelCoord::new(3, 0), PixelCoord::new(0, 1)]);
    }

    #[test]
    fn rejects_empty_canvas() {
        assert!(matches!(BinaryImage::new(0, 3), Err(GridError::EmptyCanvas { .. })));
        assert!(matches!(
            BinaryImage::from_mask(2, 2, vec![true; 3]),
            Err(GridError::MaskLength { expected: 4, actual: 3 })
        ));
    }

    #[test]
    fn four_rotations_are_identity() {
        let img = sample();
        let mut cur = img.clone();
        for _ in 0..4 {
            cur = cur.transform(Transform::Rotate90, CanvasPolicy::Clip).unwrap();
        }
        assert_eq!(cur, img);
        let r2 = img
            .transform(Transform::Rotate90, CanvasPolicy::Clip)
            .unwrap()
            .transform(Transform::Rotate90, CanvasPolicy::Clip)
            .unwrap();
        assert_eq!(r2, img.transform(Transform::Rotate180, CanvasPolicy::Clip).unwrap());
        let r3 = r2.transform(Transform::Rotate90, CanvasPolicy::Clip).unwrap();
        assert_eq!(r3, img.transform(Transform::Rotate270, CanvasPolicy::Clip).unwrap());
    }

    #[test]
    fn rotate90_is_clockwise() {
        let img = BinaryImage::from_ascii(&["#..", "..."]);
        let r = img.transform(Transform::Rotate90, CanvasPolicy::Clip).unwrap();
        assert_eq!(r.dims(), (2, 3));
        assert_eq!(objects(&r), vec![PixelCoord::new(1, 0)]);
    }

    #[test]
    fn mirrors_are_involutions() {
        let img = sample();
        for t in [Transform::MirrorHorizontal, Transform::MirrorVertical] {
            let once = img.transform(t, CanvasPolicy::Clip).unwrap();
            assert_ne!(once, img);
            assert_eq!(once.transform(t, CanvasPolicy::Clip).unwrap(), img);
        }
    }

    #[test]
    fn translate_round_trip_with_growth() {
        let img = sample();
        let there = img
            .transform(Transform::Translate { dx: 2, dy: 3 }, CanvasPolicy::Grow)
            .unwrap();
        assert_eq!(there.dims(), (7, 6));
        let back = there
            .transform(Transform::Translate { dx: -2, dy: -3 }, CanvasPolicy::Grow)
            .unwrap();
        assert_eq!(objects(&back), objects(&img));
    }

    #[test]
    fn translate_clip_reports_escape() {
        let img = sample();
        let err = img
            .transform(Transform::Translate { dx: 2, dy: 0 }, CanvasPolicy::Clip)
            .unwrap_err();
        assert!(matches!(err, GridError::OutOfCanvas { pixel, .. } if pixel == PixelCoord::new(3, 2)));
        let err = img
            .transform(Transform::Translate { dx: -1, dy: 0 }, CanvasPolicy::Grow)
            .unwrap_err();
        assert!(matches!(err, GridError::OutOfCanvas { .. }));
    }

    #[test]
    fn diagonal_pair_connectivity() {
        let pts = [PixelCoord::new(0, 0), PixelCoord::new(1, 1)];
        assert_eq!(connected_components(pts, Connectivity::Eight).len(), 1);
        assert_eq!(connected_components(pts, Connectivity::Four).len(), 2);
        assert!(connected_components([], Connectivity::Eight).is_empty());
    }

    #[test]
    fn adjacency_predicates() {
        let p = PixelCoord::new(2, 2);
        assert!(p.is_4_adjacent(PixelCoord::new(2, 3)));
        assert!(!p.is_4_adjacent(PixelCoord::new(3, 3)));
        assert!(p.is_8_adjacent(PixelCoord::new(3, 3)));
        assert!(!p.is_8_adjacent(p));
        assert_eq!(p.dist2(PixelCoord::new(5, 6)), SquaredDistance(25));
    }
}
