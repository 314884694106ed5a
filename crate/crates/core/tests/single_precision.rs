//! The generic core also runs in single precision with looser tolerances.

use pinchlab::comparison::{hyperbolic_distance, warped_distance};
use pinchlab::flow::{dphi_operator_norm, integrate_geodesic, Hypersurface, PhaseState};
use pinchlab::geometry::{MetricModel, Point, TangentPlane};
use pinchlab::gtmetric::{gt_plane_curvatures, SmoothingSpec};

#[test]
fn curvature_and_flows_in_f32() {
    let m = MetricModel::upper_half_space(3, 1.3_f32);
    let plane = TangentPlane::coordinate(Point::new(vec![0.1, 0.2, 0.7]), 0, 2);
    let k = m.sectional_curvature(&plane).unwrap();
    assert!((k + 1.69).abs() < 1e-3, "{k}");

    let start = PhaseState::new(Point::new(vec![0.0_f32, 1.0, 0.0]), vec![0.0, 0.0, 1.0]);
    let path = integrate_geodesic(&MetricModel::warped_hyperbolic(2, 1.0_f32), &start, 2.0, 1e-5).unwrap();
    assert!((path.end().unwrap().p.coords[2] - 2.0).abs() < 1e-4);

    let warped = MetricModel::warped_hyperbolic(2, 1.0_f32);
    let norm = dphi_operator_norm(&warped, Hypersurface::WarpedZeroSlice, &Point::new(vec![0.0, 1.0, 0.0]), 3.0, 1e-5)
        .unwrap()
        .operator_norm;
    assert!((norm / 3.0_f32.cosh() - 1.0).abs() < 1e-3, "{norm}");

    let d = hyperbolic_distance(&[0.0_f32, 1.0], &[0.0, std::f32::consts::E], 1.0).unwrap();
    assert!((d - 1.0).abs() < 1e-5);
    assert!((warped_distance(0.0_f32, 0.0, 0.5).unwrap() - 0.5).abs() < 1e-6);

    let spec = SmoothingSpec::with_quarter_r0(2, 6.0_f32).unwrap();
    let c = gt_plane_curvatures(&pinchlab::gtmetric::build_sigma(&spec).unwrap(), 3.0).unwrap();
    assert_eq!(c.r_x, -1.0);
}
