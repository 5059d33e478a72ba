//! A deterministic corpus of test shapes: discs, bars, rectangles, plus/T/H
//! skeleton-like figures, rings, seeded random blobs and multi-component
//! scenes. Every shape keeps at least one background pixel between the
//! object and the canvas border.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{BinaryImage, PixelCoord};

#[derive(Debug, Clone)]
pub struct CorpusShape {
    pub name: String,
    pub image: BinaryImage,
}

fn canvas(w: usize, h: usize) -> BinaryImage {
    BinaryImage::new(w, h).expect("positive corpus canvas")
}

fn fill_rect(img: &mut BinaryImage, x0: usize, y0: usize, w: usize, h: usize) {
    for y in y0..y0 + h {
        for x in x0..x0 + w {
            img.set(PixelCoord::new(x, y), true);
        }
    }
}

/// Fill `{p : (p - c)^2 <= r2}` with centre given in half-pixel units, so
/// both pixel-centred and corner-centred discs are available.
fn fill_disc_half(img: &mut BinaryImage, cx2: i64, cy2: i64, r2: i64, value: bool) {
    for y in 0..img.height() {
        for x in 0..img.width() {
            let dx = 2 * x as i64 - cx2;
            let dy = 2 * y as i64 - cy2;
            if dx * dx + dy * dy <= 4 * r2 {
                img.set(PixelCoord::new(x, y), value);
            }
        }
    }
}

fn fill_ellipse(img: &mut BinaryImage, cx: i64, cy: i64, a: i64, b: i64) {
    for y in 0..img.height() as i64 {
        for x in 0..img.width() as i64 {
            let (dx, dy) = (x - cx, y - cy);
            if dx * dx * b * b + dy * dy * a * a <= a * a * b * b {
                img.set(PixelCoord::new(x as usize, y as usize), true);
            }
        }
    }
}

/// Disc centred on the canvas; even sizes give a corner-centred disc.
fn disc(size: usize, r2: i64) -> BinaryImage {
    let mut img = canvas(size, size);
    let c = size as i64 - 1;
    fill_disc_half(&mut img, c, c, r2, true);
    img
}

fn plus(size: usize, arm: usize, thickness: usize) -> BinaryImage {
    let mut img = canvas(size, size);
    let c = size / 2;
    let lo = c - thickness / 2;
    fill_rect(&mut img, c - arm, lo, 2 * arm + 1, thickness);
    fill_rect(&mut img, lo, c - arm, thickness, 2 * arm + 1);
    img
}

fn tee(w: usize, h: usize, t: usize) -> BinaryImage {
    let mut img = canvas(w, h);
    fill_rect(&mut img, 1, 1, w - 2, t);
    fill_rect(&mut img, (w - t) / 2, 1, t, h - 2);
    img
}

fn aitch(w: usize, h: usize, t: usize) -> BinaryImage {
    let mut img = canvas(w, h);
    fill_rect(&mut img, 1, 1, t, h - 2);
    fill_rect(&mut img, w - 1 - t, 1, t, h - 2);
    fill_rect(&mut img, 1, (h - t) / 2, w - 2, t);
    img
}

fn ell(size: usize, t: usize) -> BinaryImage {
    let mut img = canvas(size, size);
    fill_rect(&mut img, 1, 1, t, size - 2);
    fill_rect(&mut img, 1, size - 1 - t, size - 2, t);
    img
}

fn ring(size: usize, outer2: i64, inner2: i64) -> BinaryImage {
    let mut img = canvas(size, size);
    let c = size as i64 - 1;
    fill_disc_half(&mut img, c, c, outer2, true);
    fill_disc_half(&mut img, c, c, inner2, false);
    img
}

fn diagonal_bar(size: usize, width: i64) -> BinaryImage {
    let mut img = canvas(size, size);
    for y in 1..size - 1 {
        for x in 1..size - 1 {
            if (x as i64 - y as i64).abs() <= width {
                img.set(PixelCoord::new(x, y), true);
            }
        }
    }
    img
}

/// Union of seeded random discs, kept off the border.
pub fn random_blob(seed: u64, w: usize, h: usize, discs: usize) -> BinaryImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut img = canvas(w, h);
    let max_r = (w.min(h) / 4).max(2) as i64;
    let mut cx = (w / 2) as i64;
    let mut cy = (h / 2) as i64;
    for _ in 0..discs {
        let r = rng.random_range(1..=max_r);
        let r2 = r * r + rng.random_range(0..=r);
        fill_disc_half(&mut img, 2 * cx, 2 * cy, r2, true);
        // Random walk keeps the blob mostly connected.
        cx = (cx + rng.random_range(-r..=r)).clamp(r + 1, w as i64 - r - 2);
        cy = (cy + rng.random_range(-r..=r)).clamp(r + 1, h as i64 - r - 2);
    }
    clear_border(&mut img);
    img
}

/// Seeded random rectangles and discs scattered as separate components.
pub fn random_scene(seed: u64, w: usize, h: usize, parts: usize) -> BinaryImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut img = canvas(w, h);
    for i in 0..parts {
        if i % 2 == 0 {
            let rw = rng.random_range(1..=w / 4);
            let rh = rng.random_range(1..=h / 4);
            let x0 = rng.random_range(1..w - rw - 1);
            let y0 = rng.random_range(1..h - rh - 1);
            fill_rect(&mut img, x0, y0, rw, rh);
        } else {
            let r = rng.random_range(1..=(w.min(h) / 8).max(1)) as i64;
            let cx = rng.random_range(r + 1..w as i64 - r - 1);
            let cy = rng.random_range(r + 1..h as i64 - r - 1);
            fill_disc_half(&mut img, 2 * cx, 2 * cy, r * r, true);
        }
    }
    clear_border(&mut img);
    img
}

fn clear_border(img: &mut BinaryImage) {
    let (w, h) = img.dims();
    for x in 0..w {
        img.set(PixelCoord::new(x, 0), false);
        img.set(PixelCoord::new(x, h - 1), false);
    }
    for y in 0..h {
        img.set(PixelCoord::new(0, y), false);
        img.set(PixelCoord::new(w - 1, y), false);
    }
}

/// The fixed test corpus (35 shapes, none larger than 64×64).
pub fn standard_corpus() -> Vec<CorpusShape> {
    let mut shapes: Vec<(String, BinaryImage)> = Vec::new();
    let mut push = |name: &str, image: BinaryImage| shapes.push((name.to_string(), image));

    let mut dot = canvas(3, 3);
    dot.set(PixelCoord::new(1, 1), true);
    push("dot", dot);
    let mut bar = canvas(7, 3);
    fill_rect(&mut bar, 1, 1, 5, 1);
    push("bar_1x5", bar);

    push("disc_r3", disc(9, 9));
    push("disc_r6", disc(15, 36));
    push("disc_r10_even", disc(24, 100));
    push("disc_r15", disc(33, 225));
    push("disc_r30", disc(64, 900));
    let mut ellipse = canvas(48, 32);
    fill_ellipse(&mut ellipse, 23, 15, 20, 11);
    push("ellipse_20x11", ellipse);

    for (w, h, rw, rh) in [(9, 5, 7, 3), (20, 10, 16, 6), (24, 24, 20, 20), (40, 22, 33, 14), (16, 9, 12, 4)] {
        let mut img = canvas(w, h);
        fill_rect(&mut img, 1, 1, rw, rh);
        push(&format!("rect_{rw}x{rh}"), img);
    }
    let mut vbar = canvas(5, 30);
    fill_rect(&mut vbar, 1, 1, 3, 28);
    push("bar_3x28_vertical", vbar);
    let mut hbar = canvas(40, 6);
    fill_rect(&mut hbar, 1, 1, 38, 4);
    push("bar_38x4", hbar);
    push("diagonal_bar", diagonal_bar(30, 2));

    push("plus_thin", plus(15, 6, 1));
    push("plus_thick", plus(33, 14, 5));
    push("tee", tee(31, 25, 5));
    push("tee_thin", tee(13, 11, 1));
    push("aitch", aitch(35, 29, 6));
    push("ell", ell(26, 6));
    push("ring", ring(31, 196, 49));
    push("thin_ring", ring(21, 81, 49));

    for (i, (w, h, n)) in [(32, 32, 5), (40, 30, 8), (48, 48, 10), (64, 64, 12), (24, 40, 6), (56, 40, 9)]
        .into_iter()
        .enumerate()
    {
        push(&format!("blob_{i}"), random_blob(100 + i as u64, w, h, n));
    }
    for (i, (w, h, n)) in [(40, 40, 4), (64, 48, 7), (32, 32, 3), (48, 64, 6)].into_iter().enumerate() {
        push(&format!("scene_{i}"), random_scene(200 + i as u64, w, h, n));
    }

    let mut pair = canvas(30, 14);
    fill_rect(&mut pair, 2, 2, 9, 9);
    fill_disc_half(&mut pair, 2 * 21, 2 * 6, 20, true);
    push("rect_and_disc", pair);

    shapes
        .into_iter()
        .map(|(name, image)| CorpusShape { name, image })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_well_formed() {
        let corpus = standard_corpus();
        assert!(corpus.len() >= 30);
        for s in &corpus {
            let (w, h) = s.image.dims();
            assert!(w <= 64 && h <= 64, "{} too large", s.name);
            assert!(s.image.has_object(), "{} is empty", s.name);
            for p in s.image.object_pixels() {
                assert!(p.x > 0 && p.y > 0 && p.x < w - 1 && p.y < h - 1, "{} touches border", s.name);
            }
        }
    }

    #[test]
    fn corpus_is_deterministic() {
        let a = standard_corpus();
        let b = standard_corpus();
        assert!(a.iter().zip(&b).all(|(x, y)| x.image == y.image));
    }
}
