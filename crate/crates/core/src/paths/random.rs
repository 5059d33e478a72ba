//! Uncommitted baseline: remove points in a seeded uniformly random order.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::grid::PixelCoord;
use crate::scale_space::{EvolutionState, GeneratorError, PathGenerator};

/// Shuffles `Σ_0` once and removes `min(r, |Σ_ℓ|)` points per step in that
/// order.
///
/// The shuffle is a Fisher-Yates pass (`rand`'s `SliceRandom::shuffle`) over
/// the row-major point list, driven by ChaCha8 seeded with
/// `seed_from_u64(seed)`. Both are platform independent, so a seed names the
/// same path everywhere.
#[derive(Debug, Clone)]
pub struct RandomPath {
    seed: u64,
    per_step: usize,
    order: Vec<PixelCoord>,
    cursor: usize,
}

impl RandomPath {
    /// Panics if `per_step` is zero.
    pub fn new(seed: u64, per_step: usize) -> Self {
        assert!(per_step >= 1, "points per step must be positive");
        Self {
            seed,
            per_step,
            order: Vec::new(),
            cursor: 0,
        }
    }

    /// The removal order fixed at start.
    pub fn order(&self) -> &[PixelCoord] {
        &self.order
    }
}

/// Shorthand for [`RandomPath::new`].
pub fn random_path(seed: u64, per_step: usize) -> RandomPath {
    RandomPath::new(seed, per_step)
}

impl PathGenerator for RandomPath {
    fn name(&self) -> String {
        format!("random(seed={},r={})", self.seed, self.per_step)
    }

    fn start(&mut self, initial: &EvolutionState) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        self.order = initial.skeleton.positions().collect();
        self.order.shuffle(&mut rng);
        self.cursor = 0;
    }

    fn next_step(&mut self, state: &EvolutionState) -> Result<Vec<PixelCoord>, GeneratorError> {
        let mut step = Vec::with_capacity(self.per_step);
        while step.len() < self.per_step && self.cursor < self.order.len() {
            let p = self.order[self.cursor];
            self.cursor += 1;
            if state.skeleton.contains(p) {
                step.push(p);
            }
        }
        Ok(step)
    }
}
