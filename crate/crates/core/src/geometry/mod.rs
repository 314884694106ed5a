//! Charts, metric models and pointwise tensor computations.

mod curvature;
pub mod fd;
mod model;
mod point;
mod scan;
mod smooth;

pub use curvature::{riemann_from_jet, RiemannTensor, DEGENERATE_PLANE_TOL};
pub use model::{Christoffel, DiagJet, MetricJet, MetricModel, DEFAULT_R_EPS};
pub use point::{Point, TangentPlane, TangentVector};
pub use scan::{
    curvature_range_scan, linspace, point_planes, CoordinatePlaneExtrema, CurvatureRange, PlaneLabel, PlaneSample,
    ScanGrid, DEFAULT_RANDOM_PLANES,
};
pub use smooth::{Jet1, SmoothFunction1D};
