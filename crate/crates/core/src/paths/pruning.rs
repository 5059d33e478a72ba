//! Branch pruning path: remove whole branches that end in an endpoint,
//! cheapest reconstruction impact first, keeping branching points.

use std::collections::BTreeSet;

use super::coverage::reconstruction_impact;
use super::topology::{classify_points, extract_arcs, PointKind};
use crate::grid::PixelCoord;
use crate::scale_space::{EvolutionState, GeneratorError, PathGenerator};

/// Per step: among the arcs containing an endpoint (or the whole skeleton if
/// there is none) pick the one with the smallest `|I_{ℓ,A}|`, ties by the
/// row-major smallest pixel, and remove its non-branching points.
#[derive(Debug, Clone, Default)]
pub struct BranchPruningPath {
    diagnostics: Vec<String>,
}

impl BranchPruningPath {
    pub fn new() -> Self {
        Self::default()
    }

    /// Arc-tracing diagnostics collected during the run, prefixed by scale.
    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }
}

/// Shorthand for [`BranchPruningPath::new`].
pub fn branch_pruning_path() -> BranchPruningPath {
    BranchPruningPath::new()
}

impl PathGenerator for BranchPruningPath {
    fn name(&self) -> String {
        "prune".into()
    }

    fn next_step(&mut self, state: &EvolutionState) -> Result<Vec<PixelCoord>, GeneratorError> {
        let points: BTreeSet<PixelCoord> = state.skeleton.positions().collect();
        let classes = classify_points(&points);
        let arcs = extract_arcs(&points, &classes);
        self.diagnostics.extend(
            arcs.diagnostics
                .iter()
                .map(|d| format!("scale {}: {d}", state.scale)),
        );

        let mut candidates: Vec<Vec<PixelCoord>> = arcs
            .arcs
            .into_iter()
            .filter(|a| a.has_endpoint(&classes))
            .map(|a| a.pixels)
            .collect();
        if candidates.is_empty() {
            candidates.push(points.iter().copied().collect());
        }

        let mut best: Option<(usize, PixelCoord, Vec<PixelCoord>)> = None;
        for pixels in candidates {
            let mut unique = pixels.clone();
            unique.sort_unstable();
            unique.dedup();
            let impact = reconstruction_impact(&state.grid, &state.skeleton, &unique)
                .map_err(|e| GeneratorError(e.to_string()))?
                .len();
            let key = (impact, unique[0]);
            if best.as_ref().is_none_or(|(i, p, _)| key < (*i, *p)) {
                best = Some((impact, unique[0], unique));
            }
        }
        let (_, _, chosen) = best.expect("at least one candidate arc");
        let step: Vec<PixelCoord> = chosen
            .into_iter()
            .filter(|&p| classes.kind(p) != Some(PointKind::Branching))
            .collect();
        if step.is_empty() {
            return Err(GeneratorError(format!(
                "selected branch at scale {} consists of branching points only",
                state.scale
            )));
        }
        Ok(step)
    }
}
