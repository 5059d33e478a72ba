//! Per-pixel disc multiplicity and reconstruction impact.

use std::collections::HashMap;

use thiserror::Error;

use crate::grid::{BinaryImage, PixelCoord};
use crate::medial_axis::{for_each_disc_pixel, MedialPoint, Skeleton};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImpactError {
    #[error("point {0} is not in the current skeleton")]
    NotInSkeleton(PixelCoord),
}

/// How many discs of the current skeleton cover each pixel.
///
/// Alongside the count, each pixel keeps the XOR of the linear indices of its
/// covering centres, which names the unique coverer wherever the count is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageGrid {
    width: usize,
    height: usize,
    counts: Vec<u32>,
    coverers: Vec<u32>,
    area: usize,
}

impl CoverageGrid {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            counts: vec![0; width * height],
            coverers: vec![0; width * height],
            area: 0,
        }
    }

    /// Grid of the given skeleton on its own canvas.
    pub fn from_skeleton(skeleton: &Skeleton) -> Self {
        let mut grid = Self::new(skeleton.width(), skeleton.height());
        for mp in skeleton.iter() {
            grid.add(mp);
        }
        grid
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    fn id(&self, p: PixelCoord) -> u32 {
        (p.y * self.width + p.x) as u32
    }

    pub fn add(&mut self, mp: MedialPoint) {
        let id = self.id(mp.pos);
        let w = self.width;
        for_each_disc_pixel(mp.pos, mp.radius2, self.dims(), |p| {
            let i = p.y * w + p.x;
            if self.counts[i] == 0 {
                self.area += 1;
            }
            self.counts[i] += 1;
            self.coverers[i] ^= id;
        });
    }

    /// Remove a disc previously added. Panics if the grid would underflow,
    /// which means the disc was never added.
    pub fn remove(&mut self, mp: MedialPoint) {
        let id = self.id(mp.pos);
        let w = self.width;
        for_each_disc_pixel(mp.pos, mp.radius2, self.dims(), |p| {
            let i = p.y * w + p.x;
            assert!(self.counts[i] > 0, "coverage underflow at {p}");
            self.counts[i] -= 1;
            self.coverers[i] ^= id;
            if self.counts[i] == 0 {
                self.area -= 1;
            }
        });
    }

    pub fn count(&self, p: PixelCoord) -> u32 {
        self.counts[p.y * self.width + p.x]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// The only centre whose disc covers `p`, if exactly one does.
    pub fn unique_coverer(&self, p: PixelCoord) -> Option<PixelCoord> {
        let i = p.y * self.width + p.x;
        (self.counts[i] == 1).then(|| {
            let id = self.coverers[i] as usize;
            PixelCoord::new(id % self.width, id / self.width)
        })
    }

    /// Number of covered pixels, `|O_ℓ|`.
    pub fn area(&self) -> usize {
        self.area
    }

    /// The reconstructed object: pixels covered at least once.
    pub fn object(&self) -> BinaryImage {
        BinaryImage::from_mask(self.width, self.height, self.counts.iter().map(|&c| c > 0).collect())
            .expect("grid canvas is non-empty")
    }

    /// `|I_{ℓ,{c}}|`: pixels of `mp`'s disc covered by no other disc.
    pub fn single_impact(&self, mp: MedialPoint) -> usize {
        let mut n = 0;
        for_each_disc_pixel(mp.pos, mp.radius2, self.dims(), |p| {
            if self.count(p) == 1 {
                n += 1;
            }
        });
        n
    }
}

/// The pixels lost when `removed` is taken out of `skeleton`: those whose
/// every covering disc belongs to a removed point. Sorted row-major.
pub fn reconstruction_impact(
    grid: &CoverageGrid,
    skeleton: &Skeleton,
    removed: &[PixelCoord],
) -> Result<Vec<PixelCoord>, ImpactError> {
    let mut local: HashMap<PixelCoord, u32> = HashMap::new();
    let mut seen = std::collections::HashSet::with_capacity(removed.len());
    for &pos in removed {
        let mp = skeleton.point(pos).ok_or(ImpactError::NotInSkeleton(pos))?;
        if !seen.insert(pos) {
            continue;
        }
        for_each_disc_pixel(mp.pos, mp.radius2, grid.dims(), |p| {
            *local.entry(p).or_insert(0) += 1;
        });
    }
    let mut impact: Vec<PixelCoord> = local
        .into_iter()
        .filter(|&(p, n)| grid.count(p) == n)
        .map(|(p, _)| p)
        .collect();
    impact.sort_unstable();
    Ok(impact)
}
