//! Numerical laboratory for pinched negatively curved model geometries.

// `!(x > 0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops read closer to the tensor formulas they implement.
#![allow(clippy::needless_range_loop)]

pub mod batch;
pub mod comparison;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod growth;
pub mod gtmetric;
pub mod linalg;
pub mod ode;
pub mod scalar;

pub use error::{GeomError, Result};
pub use scalar::Real;

/// Double-precision instantiations of the generic types.
pub type MetricModel64 = geometry::MetricModel<f64>;
pub type Point64 = geometry::Point<f64>;
pub type TangentVector64 = geometry::TangentVector<f64>;
pub type CurvatureRange64 = geometry::CurvatureRange<f64>;
pub type PhaseState64 = flow::PhaseState<f64>;
pub type JacobiState64 = flow::JacobiState<f64>;
pub type SmoothingSpec64 = gtmetric::SmoothingSpec<f64>;
pub type GTReport64 = gtmetric::GTReport<f64>;
pub type GrowthSample64 = growth::GrowthSample<f64>;
pub type GrowthFit64 = growth::GrowthFit<f64>;
pub type BoundReport64 = growth::BoundReport<f64>;
pub type BvpResult64 = comparison::BvpResult<f64>;
pub type DistortionReport64 = comparison::DistortionReport<f64>;
