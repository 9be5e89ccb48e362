//! Packings of cut metrics and (2,3)-metrics that realize the distances
//! between vertices on up to three distinguished faces ("holes") of a planar
//! graph with cyclically even integer edge lengths.
//!
//! Every length reduction applied by the solver goes through a certified
//! good-reduction step, and the final packing is checked by an independent
//! verifier.

pub mod exec;
pub mod fixtures;
pub mod planar;

pub use exec::Parallelism;
pub use planar::{Instance, PlanarError, PlanarGraph, RotationSpec, VertexId};
pub mod geodesics;
pub mod metricspace;
pub mod twohole;
pub mod preprocess;
pub mod finalize;
pub mod reduce;
