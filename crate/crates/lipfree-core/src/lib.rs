//! Exact computation in Lipschitz-free spaces over finite pointed metric
//! spaces: transport norms with LP dual certificates, the weighted bounded
//! transform of a space together with its free-space isomorphisms, and the
//! weighted product turning Lipschitz functions into a Banach algebra.

// Dense index arithmetic over square matrices reads better with plain loops.
#![allow(clippy::needless_range_loop)]

pub mod algebra;
mod flow;
pub mod free;
pub mod generate;
pub mod metric;
pub mod transform;
pub mod weight;

pub use free::{
    dual_norm, free_norm, l1_isometry_values, line_isometry_values, FreeError, FreeVector,
    LinearFreeMap, SUPPORT_TOL,
};
pub use metric::{LipschitzFunction, MetricError, PointedMetricSpace, SpaceRef, TRIANGLE_REL_TOL};
pub use transform::{BoundedSpace, TransformError};
pub use weight::{WeightConstants, WeightError, WeightFunction, WeightKind};
