//! Greedy compression path: remove the points with the smallest
//! reconstruction impact first.

use std::collections::{BTreeSet, HashMap};

use crate::grid::PixelCoord;
use crate::medial_axis::{for_each_disc_pixel, MedialPoint};
use crate::scale_space::{EvolutionState, GeneratorError, PathGenerator};

/// At every scale, orders `Σ_ℓ` by single-point impact `|I_{ℓ,{c}}|`
/// (ties row-major) and removes the `min(r, |Σ_ℓ|)` smallest.
///
/// Impacts are maintained incrementally: after a removal, a pixel of a
/// removed disc that is now covered exactly once moves into the impact of its
/// unique coverer. No other impact can change.
#[derive(Debug, Clone)]
pub struct CompressionPath {
    per_step: usize,
    impacts: HashMap<PixelCoord, usize>,
    queue: BTreeSet<(usize, PixelCoord)>,
    last_removed: Vec<MedialPoint>,
}

impl CompressionPath {
    /// Panics if `per_step` is zero.
    pub fn new(per_step: usize) -> Self {
        assert!(per_step >= 1, "points per step must be positive");
        Self {
            per_step,
            impacts: HashMap::new(),
            queue: BTreeSet::new(),
            last_removed: Vec::new(),
        }
    }

    /// Current impact of a skeleton point, as tracked by the generator.
    pub fn impact(&self, p: PixelCoord) -> Option<usize> {
        self.impacts.get(&p).copied()
    }

    fn bump(&mut self, p: PixelCoord) {
        let v = self.impacts.get_mut(&p).expect("coverer is a live skeleton point");
        self.queue.remove(&(*v, p));
        *v += 1;
        self.queue.insert((*v, p));
    }

    fn absorb_last_removal(&mut self, state: &EvolutionState) {
        let mut touched: Vec<PixelCoord> = Vec::new();
        for mp in &self.last_removed {
            for_each_disc_pixel(mp.pos, mp.radius2, state.grid.dims(), |p| touched.push(p));
        }
        touched.sort_unstable();
        touched.dedup();
        for p in touched {
            if let Some(c) = state.grid.unique_coverer(p) {
                self.bump(c);
            }
        }
        self.last_removed.clear();
    }
}

/// Shorthand for [`CompressionPath::new`].
pub fn compression_path(per_step: usize) -> CompressionPath {
    CompressionPath::new(per_step)
}

impl PathGenerator for CompressionPath {
    fn name(&self) -> String {
        format!("compression(r={})", self.per_step)
    }

    fn start(&mut self, initial: &EvolutionState) {
        self.impacts = initial.skeleton.positions().map(|p| (p, 0)).collect();
        let (w, h) = initial.grid.dims();
        for y in 0..h {
            for x in 0..w {
                if let Some(c) = initial.grid.unique_coverer(PixelCoord::new(x, y)) {
                    *self.impacts.get_mut(&c).expect("coverer is a skeleton point") += 1;
                }
            }
        }
        self.queue = self.impacts.iter().map(|(&p, &v)| (v, p)).collect();
        self.last_removed.clear();
    }

    fn next_step(&mut self, state: &EvolutionState) -> Result<Vec<PixelCoord>, GeneratorError> {
        self.absorb_last_removal(state);
        let take = self.per_step.min(self.queue.len());
        let chosen: Vec<(usize, PixelCoord)> = self.queue.iter().take(take).copied().collect();
        for &(v, p) in &chosen {
            self.queue.remove(&(v, p));
            self.impacts.remove(&p);
            let mp = state
                .skeleton
                .point(p)
                .ok_or_else(|| GeneratorError(format!("tracked point {p} left the skeleton")))?;
            self.last_removed.push(mp);
        }
        Ok(chosen.into_iter().map(|(_, p)| p).collect())
    }
}
