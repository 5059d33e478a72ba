//! Discrete open discs `{p : d²(center, p) < radius2}` and their exact
//! containment test.

use crate::grid::{PixelCoord, SquaredDistance};

/// A skeleton point together with the squared radius of its disc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MedialPoint {
    pub pos: PixelCoord,
    pub radius2: SquaredDistance,
}

impl MedialPoint {
    pub fn new(pos: PixelCoord, radius2: u64) -> Self {
        Self {
            pos,
            radius2: SquaredDistance(radius2),
        }
    }
}

/// Largest `k >= 0` with `k * k < radius2`, or `None` for an empty disc.
pub(crate) fn open_reach(radius2: u64) -> Option<u64> {
    if radius2 == 0 {
        return None;
    }
    let mut k = ((radius2 - 1) as f64).sqrt() as u64;
    while k * k >= radius2 {
        k -= 1;
    }
    while (k + 1) * (k + 1) < radius2 {
        k += 1;
    }
    Some(k)
}

/// Visit every pixel of the open disc clipped to a `width × height` canvas,
/// in row-major order.
pub fn for_each_disc_pixel(
    center: PixelCoord,
    radius2: SquaredDistance,
    (width, height): (usize, usize),
    mut visit: impl FnMut(PixelCoord),
) {
    let Some(reach) = open_reach(radius2.0) else {
        return;
    };
    let reach = reach as i64;
    let (cx, cy) = (center.x as i64, center.y as i64);
    let y0 = (cy - reach).max(0);
    let y1 = (cy + reach).min(height as i64 - 1);
    for y in y0..=y1 {
        let dy = y - cy;
        let rem = radius2.0 - (dy * dy) as u64;
        let Some(span) = open_reach(rem) else {
            continue;
        };
        let span = span as i64;
        let x0 = (cx - span).max(0);
        let x1 = (cx + span).min(width as i64 - 1);
        for x in x0..=x1 {
            visit(PixelCoord::new(x as usize, y as usize));
        }
    }
}

/// Pixels of the open disc around `center`, clipped to the canvas.
pub fn disc_pixels(
    center: PixelCoord,
    radius2: SquaredDistance,
    dims: (usize, usize),
) -> Vec<PixelCoord> {
    let mut out = Vec::new();
    for_each_disc_pixel(center, radius2, dims, |p| out.push(p));
    out
}

/// Number of pixels of the clipped open disc.
pub fn disc_area(center: PixelCoord, radius2: SquaredDistance, dims: (usize, usize)) -> usize {
    let mut n = 0;
    for_each_disc_pixel(center, radius2, dims, |_| n += 1);
    n
}

fn in_open_disc(p: PixelCoord, disc: MedialPoint) -> bool {
    p.dist2(disc.pos) < disc.radius2
}

/// Whether the clipped disc of `inner` is a subset of the clipped disc of
/// `outer` on a canvas of size `dims`.
///
/// The continuous sufficient condition `d + r_inner <= r_outer` is decided in
/// integers first; otherwise inclusion is checked pixel by pixel.
pub fn disc_contained(inner: MedialPoint, outer: MedialPoint, dims: (usize, usize)) -> bool {
    let a = inner.radius2.0 as i128;
    let b = outer.radius2.0 as i128;
    if a == 0 {
        return true;
    }
    let d = inner.pos.dist2(outer.pos).0 as i128;
    let slack = a + b - d;
    // b - a >= sqrt(d)  <=>  b >= a  and  (a + b - d)^2 >= 4ab
    if b >= a && slack >= 0 && slack * slack >= 4 * a * b {
        return true;
    }

    // Axis extremes of the inner disc reject most candidates quickly.
    if let Some(reach) = open_reach(inner.radius2.0) {
        let r = reach as i64;
        let (w, h) = (dims.0 as i64, dims.1 as i64);
        for (dx, dy) in [(0, 0), (-r, 0), (r, 0), (0, -r), (0, r)] {
            let x = (inner.pos.x as i64 + dx).clamp(0, w - 1);
            let y = (inner.pos.y as i64 + dy).clamp(0, h - 1);
            let p = PixelCoord::new(x as usize, y as usize);
            if in_open_disc(p, inner) && !in_open_disc(p, outer) {
                return false;
            }
        }
    }

    let mut contained = true;
    for_each_disc_pixel(inner.pos, inner.radius2, dims, |p| {
        contained &= in_open_disc(p, outer);
    });
    contained
}
