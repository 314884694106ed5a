//! Geodesics, Jacobi fields, Riccati operators and the normal flow.

mod geodesic;
mod jacobi;
mod normal;
mod riccati;
mod system;

pub use geodesic::{exp_map, integrate_geodesic, integrate_geodesic_at, GeodesicPath, PhaseState, DEFAULT_TOL};
pub use jacobi::{
    initial_frame, propagate_jacobi, propagate_jacobi_frame, JacobiFrameSample, JacobiSolution, JacobiState,
};
pub use normal::{dphi_at_times, dphi_batch, dphi_operator_norm, normal_flow, FlowDifferential, Hypersurface};
pub use riccati::{riccati_splitting, RiccatiOptions, RiccatiSplitting};
