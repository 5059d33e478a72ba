//! Grayscale overlays of a frame.

use std::collections::BTreeSet;

use skelss_core::paths::{classify_points, PointKind};
use skelss_core::pbm::save_pgm;
use skelss_core::scale_space::ScaleSpaceFrame;
use skelss_core::PixelCoord;

pub const BACKGROUND: u8 = 255;
pub const OBJECT: u8 = 192;
pub const SKELETON: u8 = 64;
pub const ENDPOINT: u8 = 32;
pub const BRANCHING: u8 = 0;

/// Gray levels of one frame: the reconstruction over the background, with
/// skeleton points drawn by their class.
pub fn frame_pixels(frame: &ScaleSpaceFrame) -> Vec<u8> {
    let img = &frame.image;
    let mut pixels: Vec<u8> = img.mask().iter().map(|&o| if o { OBJECT } else { BACKGROUND }).collect();
    let points: BTreeSet<PixelCoord> = frame.sigma.positions().collect();
    let classes = classify_points(&points);
    for (p, kind) in classes.iter() {
        pixels[img.index(p)] = match kind {
            PointKind::Simple => SKELETON,
            PointKind::Endpoint => ENDPOINT,
            PointKind::Branching => BRANCHING,
        };
    }
    pixels
}

/// The frame as a binary PGM file.
pub fn render_frame(frame: &ScaleSpaceFrame) -> Vec<u8> {
    let (w, h) = frame.image.dims();
    save_pgm(w, h, &frame_pixels(frame))
}
