//! Distances (closed form and by geodesic shooting) and sampled checks of
//! the distance-comparison inequalities for normal flows.

mod bvp;
mod closed;
mod distortion;

pub use bvp::{geodesic_distance_bvp, geodesic_distance_bvp_with, BvpOptions, BvpResult};
pub use closed::{
    closed_form_distance, fermi_to_half_space, half_space_point_at, half_space_to_fermi, hyperbolic_distance,
    warped_distance,
};
pub use distortion::{
    flow_map_f, lemma_checks, model_distance, BaseMap, DistortionPair, DistortionReport, LemmaOptions, PairSampler,
    MAX_SKIPPED_FRACTION,
};
