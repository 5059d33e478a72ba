//! Exact squared Euclidean distance transform.
//!
//! Two separable passes: a per-column scan for the vertical distance to the
//! nearest background pixel, then a per-row lower envelope of the parabolas
//! `(x - i)^2 + g(i)^2`. All arithmetic is integral, so the result is exact.

use crate::grid::{BinaryImage, PixelCoord, SquaredDistance};

/// Squared distance from every pixel to the nearest background pixel of the
/// canvas. Background pixels map to 0. If the canvas has no background pixel
/// at all, every pixel holds [`SquaredDistance::INFINITE`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMap {
    width: usize,
    height: usize,
    values: Vec<u64>,
    full_frame: bool,
}

impl DistanceMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn get(&self, p: PixelCoord) -> SquaredDistance {
        SquaredDistance(self.values[p.y * self.width + p.x])
    }

    /// Raw row-major values.
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// True when the object covers the whole canvas, leaving the distance
    /// undefined.
    pub fn is_full_frame(&self) -> bool {
        self.full_frame
    }

    /// Largest finite value, 0 for an object-free canvas.
    pub fn max_finite(&self) -> u64 {
        self.values
            .iter()
            .copied()
            .filter(|&v| v != u64::MAX)
            .max()
            .unwrap_or(0)
    }
}

/// Compute the exact squared distance map of `image`.
pub fn distance_map(image: &BinaryImage) -> DistanceMap {
    let (w, h) = image.dims();
    let mask = image.mask();

    // Vertical distance to the nearest background pixel in the same column.
    let mut column: Vec<Option<u64>> = vec![None; w * h];
    for x in 0..w {
        let mut last: Option<usize> = None;
        for y in 0..h {
            if !mask[y * w + x] {
                last = Some(y);
                column[y * w + x] = Some(0);
            } else {
                column[y * w + x] = last.map(|l| (y - l) as u64);
            }
        }
        let mut next: Option<usize> = None;
        for y in (0..h).rev() {
            if !mask[y * w + x] {
                next = Some(y);
            } else if let Some(n) = next {
                let down = (n - y) as u64;
                let cell = &mut column[y * w + x];
                *cell = Some(cell.map_or(down, |up| up.min(down)));
            }
        }
    }

    let mut values = vec![u64::MAX; w * h];
    let mut sites: Vec<(i64, i64)> = Vec::with_capacity(w);
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(w);
    let mut starts: Vec<i64> = Vec::with_capacity(w);
    for y in 0..h {
        sites.clear();
        sites.extend((0..w).filter_map(|x| column[y * w + x].map(|g| (x as i64, (g * g) as i64))));
        lower_envelope(&sites, w as i64, &mut hull, &mut starts);
        if hull.is_empty() {
            continue;
        }
        let mut k = 0;
        for x in 0..w as i64 {
            while k + 1 < hull.len() && starts[k + 1] <= x {
                k += 1;
            }
            let (pos, height) = hull[k];
            values[y * w + x as usize] = ((x - pos) * (x - pos) + height) as u64;
        }
    }

    let full_frame = !mask.is_empty() && mask.iter().all(|&b| b);
    DistanceMap {
        width: w,
        height: h,
        values,
        full_frame,
    }
}

/// Lower envelope of the parabolas `(x - pos)^2 + height` over the integer
/// domain `[0, len)`. `starts[k]` is the first integer at which `hull[k]`
/// is minimal. Sites must be sorted by position.
fn lower_envelope(
    sites: &[(i64, i64)],
    len: i64,
    hull: &mut Vec<(i64, i64)>,
    starts: &mut Vec<i64>,
) {
    hull.clear();
    starts.clear();
    for &site in sites {
        loop {
            let Some(&top) = hull.last() else {
                hull.push(site);
                starts.push(0);
                break;
            };
            let takeover = separation(top, site) + 1;
            if takeover <= *starts.last().expect("parallel stacks") {
                hull.pop();
                starts.pop();
                continue;
            }
            if takeover < len {
                hull.push(site);
                starts.push(takeover);
            }
            break;
        }
    }
}

/// Last integer abscissa at which parabola `a` is no worse than parabola `b`
/// (`a` left of `b`).
fn separation((i, gi): (i64, i64), (u, gu): (i64, i64)) -> i64 {
    (u * u - i * i + gu - gi).div_euclid(2 * (u - i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pixel() {
        let img = BinaryImage::from_ascii(&["...", ".#.", "..."]);
        let dm = distance_map(&img);
        assert_eq!(dm.get(PixelCoord::new(1, 1)), SquaredDistance(1));
        assert_eq!(dm.get(PixelCoord::new(0, 0)), SquaredDistance(0));
        assert!(!dm.is_full_frame());
    }

    #[test]
    fn block_in_frame() {
        let img = BinaryImage::from_ascii(&[".....", ".###.", ".###.", ".###.", "....."]);
        let dm = distance_map(&img);
        assert_eq!(dm.get(PixelCoord::new(2, 2)).value(), 4);
        for p in [(1, 1), (2, 1), (3, 2), (1, 3)] {
            assert_eq!(dm.get(PixelCoord::new(p.0, p.1)).value(), 1);
        }
    }

    #[test]
    fn full_frame_sentinel() {
        let img = BinaryImage::from_ascii(&["##", "##"]);
        let dm = distance_map(&img);
        assert!(dm.is_full_frame());
        assert!(dm.get(PixelCoord::new(1, 1)).is_infinite());
    }

    #[test]
    fn empty_object_is_all_zero() {
        let dm = distance_map(&BinaryImage::new(4, 3).unwrap());
        assert!(dm.values().iter().all(|&v| v == 0));
    }

    #[test]
    fn column_without_background_uses_neighbours() {
        let img = BinaryImage::from_ascii(&["#.", "#.", "#."]);
        let dm = distance_map(&img);
        assert!((0..3).all(|y| dm.get(PixelCoord::new(0, y)).value() == 1));
    }
}
