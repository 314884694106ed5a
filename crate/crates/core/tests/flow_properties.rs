use pinchlab::flow::{
    dphi_at_times, integrate_geodesic_at, propagate_jacobi_frame, riccati_splitting, Hypersurface, PhaseState,
    RiccatiOptions,
};
use pinchlab::geometry::{MetricModel, Point, SmoothFunction1D};
use pinchlab::growth::{bound_report, fit_growth_exponent, sample_norm_field};
use pinchlab::gtmetric::{pinching_report, PinchGrid, SmoothingSpec};
use pinchlab::linalg::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rescaled_gt(rho: f64) -> (MetricModel<f64>, f64) {
    let spec = SmoothingSpec::with_quarter_r0(2, rho).unwrap();
    let report = pinching_report(&spec, &PinchGrid::default(), 0).unwrap();
    let (model, rescaling) = report.rescaled_model(40.0).unwrap();
    (model, (-rescaling.kappa_min).sqrt())
}

/// Unit-speed start at radius `r` with no radial velocity, so the geodesic
/// moves away from the axis in both time directions.
fn tangential_start(model: &MetricModel<f64>, r: f64, angle: f64) -> PhaseState<f64> {
    let x = vec![r, 0.7, 0.2];
    let g = model.metric_diag_unchecked(&x);
    let v = vec![0.0, angle.cos() / g[1].sqrt(), angle.sin() / g[2].sqrt()];
    PhaseState::new(Point::new(x), v)
}

fn norms_along(
    model: &MetricModel<f64>,
    start: &PhaseState<f64>,
    frame: &[Vec<f64>],
    u: &Mat<f64>,
    times: &[f64],
) -> Vec<f64> {
    let p = model.dim() - 1;
    let y0 = Mat::identity(p);
    propagate_jacobi_frame(model, start, frame, &y0, u, times, 1e-12)
        .unwrap()
        .into_iter()
        .map(|s| s.y.operator_norm())
        .collect()
}

/// Stable Jacobi tensor normalized at time 0, built the way the stable
/// Riccati operator is: `Y(T) = I`, `Y'(T) = 0` at a far horizon `T`, then
/// integrated back to 0. Backward integration keeps the decaying solution
/// well conditioned, unlike forward integration from `U_s(0)`.
fn stable_norms_from_horizon(
    model: &MetricModel<f64>,
    start: &PhaseState<f64>,
    horizon: f64,
    times: &[f64],
) -> Vec<f64> {
    let p = model.dim() - 1;
    let frame0 = pinchlab::flow::initial_frame(model, start).unwrap();
    let far =
        propagate_jacobi_frame(model, start, &frame0, &Mat::identity(p), &Mat::zeros(p, p), &[horizon], 1e-12).unwrap();
    let far = &far[0];
    let mut back: Vec<f64> = times.iter().map(|t| t - horizon).collect();
    back.push(-horizon);
    let ys = propagate_jacobi_frame(model, &far.state, &far.frame, &Mat::identity(p), &Mat::zeros(p, p), &back, 1e-12)
        .unwrap();
    let y0_inv = ys.last().unwrap().y.inverse().unwrap();
    ys[..times.len()].iter().map(|s| s.y.matmul(&y0_inv).operator_norm()).collect()
}

#[test]
fn riccati_tensors_obey_exponential_bounds_on_rescaled_gt_model() {
    let (model, b) = rescaled_gt(6.0);
    let times: Vec<f64> = (1..=32).map(|i| 0.25 * i as f64).collect();
    for angle in [0.0, 0.6, 1.2, 1.5] {
        let start = tangential_start(&model, 3.0, angle);
        let split = riccati_splitting(&model, &start, &RiccatiOptions::default()).unwrap();
        assert!(split.converged, "residuals {} {}", split.residual_stable, split.residual_unstable);
        let s_eig = split.stable_eigenvalues();
        let u_eig = split.unstable_eigenvalues();
        assert!(s_eig.iter().all(|&e| e <= -1.0 + 1e-6), "{s_eig:?}");
        assert!(u_eig.iter().all(|&e| (1.0 - 1e-6..=b + 1e-6).contains(&e)), "{u_eig:?}");
        // Operator norms of the stable/unstable Jacobi tensors bound every field.
        let stable = stable_norms_from_horizon(&model, &start, 18.0, &times);
        let unstable = norms_along(&model, &start, &split.frame, &split.u_unstable, &times);
        for ((&t, &s), &u) in times.iter().zip(&stable).zip(&unstable) {
            assert!(s <= 1.02 * (-t).exp(), "stable t={t}: {s} vs {}", (-t).exp());
            assert!(u <= 1.02 * (b * t).exp(), "unstable t={t}: {u}");
        }
        // The forward solution from U_s(0) agrees with it while still accurate.
        let forward = norms_along(&model, &start, &split.frame, &split.u_stable, &times[..8]);
        for (f, s) in forward.iter().zip(&stable) {
            assert!((f - s).abs() <= 1e-3 * s, "{f} vs {s}");
        }
    }
}

#[test]
fn gt_normal_flow_bounds_and_exponent() {
    let (model, b) = rescaled_gt(6.0);
    let qs: Vec<Point<f64>> =
        (0..20).map(|i| Point::new(vec![0.5 + 0.4 * i as f64, 0.0, -1.0 + 0.1 * i as f64])).collect();
    let ts = pinchlab::geometry::linspace(-6.0, 6.0, 25);
    let field = sample_norm_field(&model, Hypersurface::ConeReflectionSlice, &qs, &ts, 1e-10, 0).unwrap();
    assert!(field.failures.is_empty(), "{:?}", field.failures);
    assert_eq!(field.samples.len(), 500);
    let report = bound_report(&field.samples, b).unwrap();
    assert!(report.c_lower > 0.0 && report.c_upper.is_finite());
    assert_eq!(report.violations, 0);
    // Rauch comparison with curvature <= -1 gives norm >= cosh t >= e^|t| / 2.
    assert!(report.c_lower >= 0.5 - 1e-9, "{}", report.c_lower);
    let fit = fit_growth_exponent(&field.samples, 2.0).unwrap();
    assert!(fit.beta_hat >= 1.0 - 0.05 && fit.beta_hat <= b * 1.05, "{} vs b {b}", fit.beta_hat);
}

#[test]
fn gt_growth_exponent_is_close_to_one_for_deep_smoothing() {
    let (model, b) = rescaled_gt(8.0);
    let qs: Vec<Point<f64>> = (0..5).map(|i| Point::new(vec![1.0 + 2.0 * i as f64, 0.0, 0.0])).collect();
    let ts = pinchlab::geometry::linspace(2.0, 10.0, 17);
    let field = sample_norm_field(&model, Hypersurface::ConeReflectionSlice, &qs, &ts, 1e-10, 0).unwrap();
    let fit = fit_growth_exponent(&field.samples, 2.0).unwrap();
    assert!(bound_report(&field.samples, b).unwrap().lower_bound_ok);
    assert!(fit.beta_hat <= b * 1.05, "{} vs {b}", fit.beta_hat);
}

#[test]
fn reflection_slice_is_totally_geodesic() {
    let spec = SmoothingSpec::with_quarter_r0(2, 6.0).unwrap();
    let model = pinchlab::gtmetric::gt_model(&spec, 1, 40.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for i in 0..50 {
        let theta = if i % 2 == 0 { 0.0 } else { std::f64::consts::PI };
        let x = vec![rng.random_range(0.3..8.0), theta, rng.random_range(-2.0..2.0)];
        let g = model.metric_diag_unchecked(&x);
        let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let v = vec![a.cos(), 0.0, a.sin() / g[2].sqrt()];
        let path = integrate_geodesic_at(&model, &PhaseState::new(Point::new(x), v), &[1.0, 2.5, 5.0], 1e-10).unwrap();
        for (_, s) in &path.samples {
            assert!((s.p.coords[1] - theta).abs() <= 1e-6);
        }
        assert!(path.speed_drift <= 1e-9, "{}", path.speed_drift);
    }
}

#[test]
fn speed_is_conserved_on_random_geodesics() {
    let models = vec![
        MetricModel::upper_half_space(3, 1.3),
        MetricModel::warped_hyperbolic(2, 1.0),
        MetricModel::cone_chart(1, SmoothFunction1D::Sinh, 40.0),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for m in &models {
        for _ in 0..10 {
            let x: Vec<f64> = match m {
                MetricModel::ConeChart { .. } => vec![rng.random_range(2.0..4.0), 0.3, 0.0],
                _ => vec![0.1, rng.random_range(0.5..2.0), 0.5],
            };
            let v: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let speed = m.norm_unchecked(&x, &v);
            let v: Vec<f64> = v.iter().map(|c| c / speed).collect();
            let tol = 1e-9;
            let path = integrate_geodesic_at(m, &PhaseState::new(Point::new(x), v), &[0.5, 1.0, 2.0], tol).unwrap();
            if !path.exited {
                assert!(path.speed_drift <= 10.0 * tol, "{m:?}: {}", path.speed_drift);
            }
        }
    }
}

#[test]
fn dphi_is_one_at_time_zero_everywhere() {
    let (model, _) = rescaled_gt(4.0);
    for r in [0.2, 1.0, 3.0] {
        let d = dphi_at_times(&model, Hypersurface::ConeReflectionSlice, &Point::new(vec![r, 0.0, 0.0]), &[0.0], 1e-9)
            .unwrap();
        assert!((d[0].operator_norm - 1.0).abs() < 1e-9);
    }
}
