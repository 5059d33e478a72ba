//! Distance map, discrete maximal-disc skeletons and disc-union reconstruction.
//!
//! Discs are open: a point with squared radius `r2` covers the pixels at
//! squared distance `< r2`, where `r2` is the squared distance to the nearest
//! background pixel. Every such disc lies inside the object, so the union of
//! the maximal discs reproduces the object exactly.

mod disc;
mod distance;
mod skeleton;

pub use disc::{disc_area, disc_contained, disc_pixels, for_each_disc_pixel, MedialPoint};
pub use distance::{distance_map, DistanceMap};
pub use skeleton::{
    anchor_pixels, exact_skeleton, is_simple, reconstruct, skeletonize, thinned_skeleton, Backend,
    Skeleton, SkeletonError,
};
