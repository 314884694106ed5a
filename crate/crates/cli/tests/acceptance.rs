//! End-to-end acceptance run: every criterion prints one PASS/FAIL line and
//! the process exits nonzero if any of them fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use pinchlab::comparison::{
    geodesic_distance_bvp, half_space_point_at, half_space_to_fermi, hyperbolic_distance, lemma_checks, model_distance,
    warped_distance, BaseMap, BvpOptions, LemmaOptions, PairSampler,
};
use pinchlab::flow::{
    dphi_at_times, initial_frame, integrate_geodesic_at, propagate_jacobi_frame, riccati_splitting, Hypersurface,
    PhaseState, RiccatiOptions,
};
use pinchlab::geometry::{linspace, MetricModel, Point};
use pinchlab::growth::{bound_report, fit_growth_exponent, sample_norm_field, GrowthSample};
use pinchlab::gtmetric::{gt_model, pinching_report, PinchGrid, PinchStatus, SmoothingSpec};
use pinchlab::linalg::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ball_point(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vec<f64> {
    let dir: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    let dir: Vec<f64> = dir.iter().map(|x| x / norm).collect();
    half_space_point_at(&dir, rng.random_range(0.0..radius))
}

fn half_steps() -> Vec<f64> {
    (1..=20).map(|i| 0.5 * i as f64).collect()
}

fn warped_samples(b: f64) -> Result<Vec<GrowthSample<f64>>, String> {
    let model = MetricModel::warped_hyperbolic(2, b);
    let qs: Vec<Point<f64>> = (0..5).map(|i| Point::new(vec![0.3 * i as f64, 0.5 + 0.4 * i as f64, 0.0])).collect();
    let field = sample_norm_field(&model, Hypersurface::WarpedZeroSlice, &qs, &half_steps(), 1e-11, 0).map_err(err)?;
    if !field.failures.is_empty() {
        return Err(format!("{} flow samples failed", field.failures.len()));
    }
    Ok(field.samples)
}

fn cosh_law() -> Check {
    let model = MetricModel::warped_hyperbolic(2, 1.0);
    let times = half_steps();
    let mut worst: f64 = 0.0;
    for q in [vec![0.0, 1.0, 0.0], vec![1.5, 0.4, 0.0], vec![-3.0, 2.5, 0.0]] {
        let d = dphi_at_times(&model, Hypersurface::WarpedZeroSlice, &Point::new(q), &times, 1e-11).map_err(err)?;
        for s in d {
            worst = worst.max((s.operator_norm - s.t.cosh()).abs() / s.t.cosh());
        }
    }
    ensure(worst <= 1e-5, format!("max relative error {worst:.2e} against cosh(t), t in [0.5, 10]"))
}

fn growth_exponent() -> Check {
    let unit = fit_growth_exponent(&warped_samples(1.0)?, 2.0).map_err(err)?.beta_hat;
    let scaled = fit_growth_exponent(&warped_samples(1.3)?, 2.0).map_err(err)?.beta_hat;
    ensure(
        (0.99..=1.01).contains(&unit) && (1.29..=1.31).contains(&scaled),
        format!("beta_hat = {unit:.5} (curvature -1), {scaled:.5} (curvature -1.69)"),
    )
}

/// The rescaled cone chart with its pinching constant and `√|kappa_min|`.
fn rescaled_gt(rho: f64) -> Result<(MetricModel<f64>, f64, f64), String> {
    let spec = SmoothingSpec::with_quarter_r0(2, rho).map_err(err)?;
    let report = pinching_report(&spec, &PinchGrid::default(), 0).map_err(err)?;
    let (model, rescaling) = report.rescaled_model(40.0).map_err(err)?;
    Ok((model, report.pinch_c, (-rescaling.kappa_min).sqrt()))
}

fn cone_bounds() -> Check {
    let (model, pinch_c, _) = rescaled_gt(6.0)?;
    let b = pinch_c.sqrt();
    let qs: Vec<Point<f64>> =
        (0..20).map(|i| Point::new(vec![0.5 + 0.4 * i as f64, 0.0, -1.0 + 0.1 * i as f64])).collect();
    let ts = linspace(-6.0, 6.0, 25);
    let field = sample_norm_field(&model, Hypersurface::ConeReflectionSlice, &qs, &ts, 1e-10, 0).map_err(err)?;
    if !field.failures.is_empty() || field.samples.len() != 500 {
        return Err(format!("{} of 500 samples failed", field.failures.len()));
    }
    let report = bound_report(&field.samples, b).map_err(err)?;
    ensure(
        report.c_lower > 0.0 && report.c_upper.is_finite() && report.violations == 0,
        format!(
            "b = {b:.4}, C_emp = {:.4}, c_emp = {:.4}, {} violations over 20 x 25 samples",
            report.c_upper, report.c_lower, report.violations
        ),
    )
}

/// Operator norms of the stable Jacobi tensor normalized at time 0, started
/// from the Riccati initialization `U(T) = 0` at a far horizon and integrated
/// backwards so the decaying solution stays well conditioned.
fn stable_norms(model: &MetricModel<f64>, start: &PhaseState<f64>, times: &[f64]) -> Result<Vec<f64>, String> {
    let horizon = 18.0;
    let p = model.dim() - 1;
    let frame0 = initial_frame(model, start).map_err(err)?;
    let far = propagate_jacobi_frame(model, start, &frame0, &Mat::identity(p), &Mat::zeros(p, p), &[horizon], 1e-12)
        .map_err(err)?
        .remove(0);
    let mut back: Vec<f64> = times.iter().map(|t| t - horizon).collect();
    back.push(-horizon);
    let ys = propagate_jacobi_frame(model, &far.state, &far.frame, &Mat::identity(p), &Mat::zeros(p, p), &back, 1e-12)
        .map_err(err)?;
    let y0_inv = ys[times.len()].y.inverse().map_err(err)?;
    Ok(ys[..times.len()].iter().map(|s| s.y.matmul(&y0_inv).operator_norm()).collect())
}

fn knieper_inequalities() -> Check {
    let (gt, _, b_gt) = rescaled_gt(6.0)?;
    let scaled = MetricModel::upper_half_space(3, 1.3);
    let times: Vec<f64> = (1..=32).map(|i| 0.25 * i as f64).collect();
    let mut worst_stable: f64 = 0.0;
    let mut worst_unstable: f64 = 0.0;
    let mut launches = 0;
    for (model, b, upper, x) in [(&gt, b_gt, false, vec![3.0, 0.7, 0.2]), (&scaled, 1.3, true, vec![0.0, 0.0, 1.0])] {
        let g = model.metric_diag_unchecked(&x);
        for angle in [0.0_f64, 0.6, 1.2, 1.5] {
            let v = if upper {
                vec![angle.cos() / g[0].sqrt(), 0.0, angle.sin() / g[2].sqrt()]
            } else {
                vec![0.0, angle.cos() / g[1].sqrt(), angle.sin() / g[2].sqrt()]
            };
            let start = PhaseState::new(Point::new(x.clone()), v);
            let split = riccati_splitting(model, &start, &RiccatiOptions::default()).map_err(err)?;
            let stable = stable_norms(model, &start, &times)?;
            let p = model.dim() - 1;
            let unstable = propagate_jacobi_frame(
                model,
                &start,
                &split.frame,
                &Mat::identity(p),
                &split.u_unstable,
                &times,
                1e-12,
            )
            .map_err(err)?;
            for ((&t, s), u) in times.iter().zip(&stable).zip(&unstable) {
                worst_stable = worst_stable.max(s / (-t).exp());
                worst_unstable = worst_unstable.max(u.y.operator_norm() / (b * t).exp());
            }
            launches += 1;
        }
    }
    ensure(
        worst_stable <= 1.02 && worst_unstable <= 1.02,
        format!(
            "max |J(t)|/e^(-t) = {worst_stable:.4} (stable), max |J(t)|/e^(bt) = {worst_unstable:.4} (unstable), t in [0, 8], {launches} geodesics"
        ),
    )
}

fn distance_oracles() -> Check {
    let rel = |a: f64, b: f64| (a - b).abs() / b.max(1e-300);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let half_plane = MetricModel::upper_half_space(3, 1.0);
    let warped = MetricModel::warped_hyperbolic(2, 1.0);
    let (mut worst_h, mut worst_w): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let (a, b) = (ball_point(&mut rng, 3, 4.0), ball_point(&mut rng, 3, 4.0));
        let exact = hyperbolic_distance(&a, &b, 1.0).map_err(err)?;
        let r = geodesic_distance_bvp(&half_plane, &Point::new(a), &Point::new(b), 1e-10).map_err(err)?;
        worst_h = worst_h.max(rel(r.distance, exact));
        let a = half_space_to_fermi(&ball_point(&mut rng, 3, 4.0));
        let b = half_space_to_fermi(&ball_point(&mut rng, 3, 4.0));
        let exact =
            warped_distance(a[2], b[2], hyperbolic_distance(&a[..2], &b[..2], 1.0).map_err(err)?).map_err(err)?;
        let r = geodesic_distance_bvp(&warped, &Point::new(a), &Point::new(b), 1e-10).map_err(err)?;
        worst_w = worst_w.max(rel(r.distance, exact));
    }
    let spec = SmoothingSpec::with_quarter_r0(2, 6.0).map_err(err)?;
    let cone = gt_model(&spec, 1, 40.0).map_err(err)?;
    let opts = BvpOptions::with_tol(1e-10);
    let (mut asym, mut triangle): (f64, f64) = (0.0, f64::NEG_INFINITY);
    for _ in 0..200 {
        let mut point =
            || Point::new(vec![rng.random_range(0.5..3.0), rng.random_range(-0.8..0.8), rng.random_range(-1.0..1.0)]);
        let (a, b, c) = (point(), point(), point());
        let d = |p: &Point<f64>, q: &Point<f64>| model_distance(&cone, p, q, &opts).map_err(err);
        let (ab, bc, ac) = (d(&a, &b)?, d(&b, &c)?, d(&a, &c)?);
        asym = asym.max((ab - d(&b, &a)?).abs());
        triangle = triangle.max(ac - ab - bc);
    }
    ensure(
        worst_h <= 1e-5 && worst_w <= 1e-5 && asym <= 1e-6 && triangle <= 1e-6,
        format!(
            "relative error {worst_h:.1e} (half-space), {worst_w:.1e} (warped); asymmetry {asym:.1e}, triangle excess {triangle:.1e}"
        ),
    )
}

fn distortion_witness() -> Check {
    let b = 1.3_f64;
    let scaled = MetricModel::warped_hyperbolic(2, b);
    let sampler = PairSampler { seed: 7, n_pairs: 1000, radius: 3.0, t_max: 3.0 };
    let opts = LemmaOptions::default();
    let f = BaseMap::Scaling { lambda: 2.0 };
    let r = lemma_checks(&scaled, Hypersurface::WarpedZeroSlice, &f, b, &sampler, &opts).map_err(err)?;
    let unit = MetricModel::warped_hyperbolic(2, 1.0_f64);
    let iso =
        lemma_checks(&unit, Hypersurface::WarpedZeroSlice, &BaseMap::Identity, 1.0, &sampler, &opts).map_err(err)?;
    let iso_ok = (iso.c_upper - 1.0).abs() <= 1e-6 && (iso.c_lower - 1.0).abs() <= 1e-6;
    ensure(
        r.n_pairs == 1000 && r.c_upper.is_finite() && r.c_lower > 0.0 && iso_ok,
        format!(
            "beta = 1.3: C_emp = {:.4}, c_emp = {:.4} over {} pairs; isometric case: {:.8}, {:.8}",
            r.c_upper, r.c_lower, r.n_pairs, iso.c_upper, iso.c_lower
        ),
    )
}

fn pinching_trend() -> Check {
    let grid = PinchGrid::default();
    let mut values = Vec::new();
    let mut all_pinched = true;
    let mut r_x_dev: f64 = 0.0;
    for rho in [2.0_f64, 4.0, 6.0, 8.0] {
        let report = pinching_report(&SmoothingSpec::with_quarter_r0(2, rho).map_err(err)?, &grid, 0).map_err(err)?;
        all_pinched &= report.status == PinchStatus::Pinched;
        for e in report.plane_extrema.iter().filter(|e| e.plane == "r-x") {
            r_x_dev = r_x_dev.max((e.min + 1.0).abs()).max((e.max + 1.0).abs());
        }
        values.push(report.pinch_c);
    }
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let k1 = pinching_report(&SmoothingSpec::with_quarter_r0(1, 6.0_f64).map_err(err)?, &grid, 0).map_err(err)?.pinch_c;
    let shown: Vec<String> = values.iter().map(|v| format!("{v:.3}")).collect();
    ensure(
        decreasing && all_pinched && r_x_dev <= 1e-8 && (k1 - 1.0).abs() <= 1e-6,
        format!(
            "pinch_C = {} for rho = 2, 4, 6, 8; r-x deviation {r_x_dev:.1e}; k = 1 gives {k1:.8}",
            shown.join(", ")
        ),
    )
}

fn totally_geodesic_slice() -> Check {
    let spec = SmoothingSpec::with_quarter_r0(2, 6.0).map_err(err)?;
    let model = gt_model(&spec, 1, 40.0).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let times = linspace(0.25, 5.0, 20);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let theta = if i % 2 == 0 { 0.0 } else { std::f64::consts::PI };
        let x = vec![rng.random_range(0.3..8.0), theta, rng.random_range(-2.0..2.0)];
        let g = model.metric_diag_unchecked(&x);
        let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let v = vec![a.cos(), 0.0, a.sin() / g[2].sqrt()];
        let path = integrate_geodesic_at(&model, &PhaseState::new(Point::new(x), v), &times, 1e-10).map_err(err)?;
        for (_, s) in &path.samples {
            worst = worst.max((s.p.coords[1] - theta).abs());
        }
    }
    ensure(worst <= 1e-6, format!("max |theta drift| = {worst:.1e} over 50 launches, T <= 5"))
}

fn hash_dir(dir: &Path) -> Result<Vec<(String, String)>, String> {
    let mut entries: Vec<_> = std::fs::read_dir(dir).map_err(err)?.collect::<Result<_, _>>().map_err(err)?;
    entries.sort_by_key(|e| e.file_name());
    entries
        .iter()
        .map(|e| {
            let bytes = std::fs::read(e.path()).map_err(err)?;
            let digest = Sha256::digest(&bytes);
            let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
            Ok((e.file_name().to_string_lossy().into_owned(), hex))
        })
        .collect()
}

fn determinism() -> Check {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let tmp = tempfile::tempdir().map_err(err)?;
    let mut compared = 0;
    for name in ["gt_report", "growth_fit_warped", "distortion_scaled"] {
        let mut hashes = Vec::new();
        for (run, workers) in [(0, "1"), (1, "4")] {
            let out = tmp.path().join(format!("{name}-{run}"));
            let status = Command::new(env!("CARGO_BIN_EXE_pinchlab"))
                .arg("--config")
                .arg(configs.join(format!("{name}.toml")))
                .arg("--out")
                .arg(&out)
                .args(["--workers", workers])
                .output()
                .map_err(err)?;
            if !status.status.success() {
                return Err(format!("{name} exited with {}", status.status));
            }
            hashes.push(hash_dir(&out)?);
        }
        if hashes[0] != hashes[1] {
            return Err(format!("{name}: outputs differ between runs"));
        }
        compared += hashes[0].len();
    }
    Ok(format!("{compared} files hash-identical across repeated runs with 1 and 4 workers"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("cosh law for the totally geodesic slice", cosh_law),
        ("normal growth exponent", growth_exponent),
        ("exponential bounds on the rescaled cone chart", cone_bounds),
        ("stable and unstable Jacobi field bounds", knieper_inequalities),
        ("distance oracles", distance_oracles),
        ("bi-Lipschitz comparison witness", distortion_witness),
        ("pinching trend", pinching_trend),
        ("reflection slice is totally geodesic", totally_geodesic_slice),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} ({secs:.1} s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail} ({secs:.1} s)", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
