//! Skeletonisation scale-spaces.
//!
//! A binary shape is reduced to its medial axis, the axis is sparsified step
//! by step along a [`SparsificationPath`](scale_space::SparsificationPath),
//! and the shape is reconstructed from the remaining discs at every scale.
//! The [`metrics`] module checks the monotone quantities and architectural
//! properties that such a family satisfies.

pub mod corpus;
pub mod grid;
pub mod medial_axis;
pub mod metrics;
pub mod paths;
pub mod pbm;
pub mod scale_space;

pub use grid::{BinaryImage, CanvasPolicy, Connectivity, PixelCoord, SquaredDistance, Transform};
pub use medial_axis::{Backend, MedialPoint, Skeleton};
