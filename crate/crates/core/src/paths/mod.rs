//! Concrete sparsification paths and the machinery they share: disc
//! coverage counts, reconstruction impact and skeleton topology.

mod compression;
mod coverage;
mod pruning;
mod random;
mod topology;

pub use compression::{compression_path, CompressionPath};
pub use coverage::{reconstruction_impact, CoverageGrid, ImpactError};
pub use pruning::{branch_pruning_path, BranchPruningPath};
pub use random::{random_path, RandomPath};
pub use topology::{classify_point, classify_points, extract_arcs, Arc, ArcSet, PointClass, PointKind};
