//! One runner per command. Each returns its artifacts, a one-line summary
//! and any validation failures; nothing touches the filesystem here.

use pinchlab::batch::map_ordered;
use pinchlab::comparison::{
    closed_form_distance, geodesic_distance_bvp_with, half_space_point_at, half_space_to_fermi, lemma_checks, BaseMap,
    BvpOptions, LemmaOptions, PairSampler,
};
use pinchlab::flow::Hypersurface;
use pinchlab::geometry::{curvature_range_scan, linspace, MetricModel, Point, ScanGrid, DEFAULT_RANDOM_PLANES};
use pinchlab::growth::{bound_report, fit_growth_exponent, sample_norm_field, BoundReport, NormField};
use pinchlab::gtmetric::{gt_model, pinching_report, PinchGrid, PinchStatus, SmoothingSpec, TransitionProfile};
use pinchlab::{MetricModel64, Point64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::config::{Command, ExperimentConfig, FlowSection, ModelSpec};
use crate::error::CliError;
use crate::output::{coord_columns, num, Artifacts};

/// Largest fraction of flow samples allowed to fail (chart exits).
const MAX_FAILED_FRACTION: f64 = 0.1;
/// Two-sided 95% normal quantile for the exponent interval.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub command: Command,
    pub summary: String,
    pub artifacts: Artifacts,
    /// Human-readable reasons for a validation failure; empty on success.
    pub failures: Vec<String>,
}

/// A model ready for experiments, with its curvature range.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltModel {
    pub model: MetricModel64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    /// `√(−kappa_min)`.
    pub b: f64,
    pub slice: Option<Hypersurface>,
    pub label: String,
}

fn parse_profile(name: &str) -> Result<TransitionProfile, CliError> {
    name.parse().map_err(|e: pinchlab::GeomError| CliError::Config(e.to_string()))
}

pub fn build_model(spec: &ModelSpec, seed: u64, workers: usize) -> Result<BuiltModel, CliError> {
    let hyperbolic = |model: MetricModel64, b: f64, slice, label| {
        if !(b > 0.0) {
            return Err(CliError::Config("b must be positive".into()));
        }
        model.validate()?;
        Ok(BuiltModel { model, kappa_min: -b * b, kappa_max: -b * b, b, slice, label })
    };
    match spec {
        ModelSpec::UpperHalfSpace { dim, b } => {
            hyperbolic(MetricModel::upper_half_space(*dim, *b), *b, None, format!("upper-half-space(dim={dim}, b={b})"))
        }
        ModelSpec::WarpedHyperbolic { base_dim, b } => hyperbolic(
            MetricModel::warped_hyperbolic(*base_dim, *b),
            *b,
            Some(Hypersurface::WarpedZeroSlice),
            format!("warped-hyperbolic(base_dim={base_dim}, b={b})"),
        ),
        ModelSpec::GtCone { k, rho, r0, fiber_dim, r_max, profile, rescale } => {
            let smoothing = SmoothingSpec::new(*k, r0.unwrap_or(rho / 4.0), *rho, parse_profile(profile)?)?;
            let grid = PinchGrid { fiber_dim: *fiber_dim, seed, ..PinchGrid::default() };
            let report = pinching_report(&smoothing, &grid, workers)?;
            if report.status != PinchStatus::Pinched {
                return Err(CliError::Validation(format!(
                    "cone metric is not pinched (kappa_max = {:.4})",
                    report.kappa_max
                )));
            }
            let (model, kappa_min, kappa_max) = if *rescale {
                let (model, r) = report.rescaled_model(*r_max)?;
                (model, r.kappa_min, r.kappa_max)
            } else {
                (gt_model(&smoothing, *fiber_dim, *r_max)?, report.kappa_min, report.kappa_max)
            };
            Ok(BuiltModel {
                model,
                kappa_min,
                kappa_max,
                b: (-kappa_min).sqrt(),
                slice: Some(Hypersurface::ConeReflectionSlice),
                label: format!(
                    "gt-cone(k={k}, r0={}, rho={rho}, profile={}, rescaled={rescale})",
                    smoothing.r0,
                    smoothing.profile.name()
                ),
            })
        }
    }
}

pub fn run(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    if config.command == Command::GtReport {
        return gt_report(config);
    }
    let spec = config.model.as_ref().ok_or_else(|| CliError::Config("missing [model] section".into()))?;
    let built = build_model(spec, config.seed, config.workers)?;
    match config.command {
        Command::Curvature => curvature(config, spec, &built),
        Command::FlowNorms => flow_norms(config, &built),
        Command::GrowthFit => growth_fit(config, &built),
        Command::DistanceCheck => distance_check(config, spec, &built),
        Command::Distortion => distortion(config, &built),
        Command::GtReport => unreachable!("handled above"),
    }
}

fn default_axes(spec: &ModelSpec) -> Vec<(f64, f64, usize)> {
    let half_space = |dim: usize| {
        let mut axes = vec![(-1.0, 1.0, 3); dim - 1];
        axes.push((0.5, 2.0, 4));
        axes
    };
    match spec {
        ModelSpec::UpperHalfSpace { dim, .. } => half_space(*dim),
        ModelSpec::WarpedHyperbolic { base_dim, .. } => {
            let mut axes = half_space(*base_dim);
            axes.push((-2.0, 2.0, 5));
            axes
        }
        ModelSpec::GtCone { rho, fiber_dim, .. } => {
            let mut axes = vec![(0.05, rho + 1.0, 60), (0.0, 0.0, 1)];
            if *fiber_dim == 1 {
                axes.push((0.0, 0.0, 1));
            } else {
                axes.extend(std::iter::repeat_n((0.0, 0.0, 1), fiber_dim - 1));
                axes.push((1.0, 1.0, 1));
            }
            axes
        }
    }
}

#[derive(Serialize)]
struct CurvatureSummary<'a> {
    command: &'a str,
    model: &'a str,
    kappa_min: f64,
    kappa_max: f64,
    n_points: usize,
    n_planes: usize,
    seed: u64,
}

fn curvature(config: &ExperimentConfig, spec: &ModelSpec, built: &BuiltModel) -> Result<Outcome, CliError> {
    let axes = config.curvature.axes.clone().unwrap_or_else(|| default_axes(spec));
    if axes.len() != built.model.dim() {
        return Err(CliError::Config(format!(
            "curvature grid has {} axes for a {}-dimensional model",
            axes.len(),
            built.model.dim()
        )));
    }
    let grid = ScanGrid::from_axes(&axes, config.curvature.random_planes.unwrap_or(DEFAULT_RANDOM_PLANES), config.seed);
    let scan = curvature_range_scan(&built.model, &grid, config.workers)?;
    let (lo, hi) = (scan.min.kappa, scan.max.kappa);
    let mut artifacts = Artifacts::default();
    let rows: Vec<Vec<String>> = scan
        .coordinate_extrema
        .iter()
        .map(|e| vec![format!("{}-{}", e.axes.0, e.axes.1), num(e.min), num(e.max)])
        .collect();
    artifacts.add_csv("curvature_extrema.csv", &["plane".into(), "kappa_min".into(), "kappa_max".into()], &rows)?;
    artifacts.add_json(
        "summary.json",
        &CurvatureSummary {
            command: "curvature",
            model: &built.label,
            kappa_min: lo,
            kappa_max: hi,
            n_points: grid.points.len(),
            n_planes: scan.n_planes,
            seed: config.seed,
        },
    )?;
    let mut failures = Vec::new();
    if hi >= 0.0 {
        failures.push(format!("non-negative sectional curvature {hi:.6} found"));
    }
    Ok(Outcome {
        command: Command::Curvature,
        summary: format!("curvature: range [{lo:.3}, {hi:.3}] over {} planes", scan.n_planes),
        artifacts,
        failures,
    })
}

fn slice_for(config: &ExperimentConfig, built: &BuiltModel) -> Result<Hypersurface, CliError> {
    match config.flow.hypersurface.as_deref() {
        None => built.slice.ok_or_else(|| CliError::Config(format!("{} has no built-in hypersurface", built.label))),
        Some("warped-zero-slice") => Ok(Hypersurface::WarpedZeroSlice),
        Some("cone-reflection-slice") => Ok(Hypersurface::ConeReflectionSlice),
        Some(other) => Err(CliError::Config(format!("unknown hypersurface {other:?}"))),
    }
}

/// A uniformly random unit vector.
fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Random point of the fiber chart (a line, or an upper half-space).
fn fiber_point(rng: &mut ChaCha8Rng, fiber_dim: usize, half_width: f64) -> Vec<f64> {
    if fiber_dim == 1 {
        return vec![rng.random_range(-half_width..=half_width)];
    }
    let mut x: Vec<f64> = (0..fiber_dim - 1).map(|_| rng.random_range(-half_width..=half_width)).collect();
    x.push(rng.random_range(-0.5_f64..=0.5).exp());
    x
}

fn q_points(flow: &FlowSection, slice: Hypersurface, built: &BuiltModel, seed: u64) -> Result<Vec<Point64>, CliError> {
    let model = &built.model;
    let points: Vec<Point64> = match &flow.q_points {
        Some(list) => list.iter().cloned().map(Point::new).collect(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = model.dim();
            (0..flow.q_count)
                .map(|_| match slice {
                    Hypersurface::WarpedZeroSlice => {
                        let dir = unit_vector(&mut rng, n - 1);
                        let r = rng.random_range(0.0..=1.0) * flow.q_radius * built.b;
                        let mut q = half_space_point_at(&dir, r);
                        q.push(0.0);
                        Point::new(q)
                    }
                    Hypersurface::ConeReflectionSlice => {
                        let r = rng.random_range(flow.q_r_range.0..=flow.q_r_range.1);
                        let mut q = vec![r, 0.0];
                        q.extend(fiber_point(&mut rng, n - 2, flow.q_radius));
                        Point::new(q)
                    }
                })
                .collect()
        }
    };
    for (i, q) in points.iter().enumerate() {
        if q.dim() != model.dim() || !slice.contains(model, q)? {
            return Err(CliError::Config(format!("q point {i} is not on the {} hypersurface", slice.name())));
        }
    }
    Ok(points)
}

struct FlowRun {
    slice: Hypersurface,
    field: NormField<f64>,
    n_q: usize,
    n_t: usize,
    bounds: Option<BoundReport<f64>>,
}

fn run_flow(config: &ExperimentConfig, built: &BuiltModel) -> Result<FlowRun, CliError> {
    let slice = slice_for(config, built)?;
    let qs = q_points(&config.flow, slice, built, config.seed)?;
    let ts = linspace(config.flow.t_min, config.flow.t_max, config.flow.t_count);
    let field = sample_norm_field(&built.model, slice, &qs, &ts, config.tol, config.workers)?;
    let total = qs.len() * ts.len();
    if field.failures.len() as f64 > MAX_FAILED_FRACTION * total as f64 {
        return Err(CliError::Numerical(format!(
            "{} of {total} normal-flow samples failed; first: {}",
            field.failures.len(),
            field.failures[0].error
        )));
    }
    // The exponential bounds presume curvature at most −1.
    let bounds = if built.b >= 1.0 && built.kappa_max <= -1.0 + 1e-9 {
        Some(bound_report(&field.samples, built.b)?)
    } else {
        None
    };
    Ok(FlowRun { slice, field, n_q: qs.len(), n_t: ts.len(), bounds })
}

fn samples_csv(artifacts: &mut Artifacts, field: &NormField<f64>) -> Result<(), CliError> {
    let rows: Vec<Vec<String>> =
        field.samples.iter().map(|s| vec![s.q_index.to_string(), num(s.t), num(s.norm)]).collect();
    artifacts.add_csv("growth_samples.csv", &["q_index".into(), "t".into(), "norm".into()], &rows)
}

fn bound_failures(bounds: &Option<BoundReport<f64>>) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(r) = bounds {
        if !r.upper_bound_ok {
            out.push("upper exponential bound constant is not finite".into());
        }
        if !r.lower_bound_ok {
            out.push("lower exponential bound constant is not positive".into());
        }
        if r.violations > 0 {
            out.push(format!("{} samples violate the exponential bounds", r.violations));
        }
    }
    out
}

#[derive(Serialize)]
struct FlowSummary<'a> {
    command: &'a str,
    model: &'a str,
    hypersurface: &'a str,
    n_q: usize,
    n_t: usize,
    n_samples: usize,
    n_failures: usize,
    b: f64,
    #[serde(rename = "C_emp")]
    c_upper: Option<f64>,
    c_emp: Option<f64>,
    violations: Option<usize>,
    seed: u64,
}

fn flow_norms(config: &ExperimentConfig, built: &BuiltModel) -> Result<Outcome, CliError> {
    let run = run_flow(config, built)?;
    let mut artifacts = Artifacts::default();
    samples_csv(&mut artifacts, &run.field)?;
    let rows: Vec<Vec<String>> = run
        .field
        .per_t
        .iter()
        .map(|s| vec![num(s.t), num(s.sup), num(s.inf), num(s.spread), s.count.to_string()])
        .collect();
    let header = ["t", "sup", "inf", "spread", "count"].map(String::from);
    artifacts.add_csv("flow_norms.csv", &header, &rows)?;
    artifacts.add_json(
        "summary.json",
        &FlowSummary {
            command: "flow-norms",
            model: &built.label,
            hypersurface: run.slice.name(),
            n_q: run.n_q,
            n_t: run.n_t,
            n_samples: run.field.samples.len(),
            n_failures: run.field.failures.len(),
            b: built.b,
            c_upper: run.bounds.as_ref().map(|r| r.c_upper),
            c_emp: run.bounds.as_ref().map(|r| r.c_lower),
            violations: run.bounds.as_ref().map(|r| r.violations),
            seed: config.seed,
        },
    )?;
    let max_norm = run.field.per_t.iter().map(|s| s.sup).fold(f64::NEG_INFINITY, f64::max);
    let summary = match &run.bounds {
        Some(r) => format!(
            "flow-norms: {} samples, max norm {max_norm:.4e}, C_emp = {:.4}, c_emp = {:.4}",
            run.field.samples.len(),
            r.c_upper,
            r.c_lower
        ),
        None => format!("flow-norms: {} samples, max norm {max_norm:.4e}", run.field.samples.len()),
    };
    Ok(Outcome { command: Command::FlowNorms, summary, artifacts, failures: bound_failures(&run.bounds) })
}

#[derive(Serialize)]
struct GrowthSummary<'a> {
    command: &'a str,
    model: &'a str,
    hypersurface: &'a str,
    beta_hat: f64,
    beta_stderr: f64,
    beta_ci95: (f64, f64),
    #[serde(rename = "logC_hat")]
    log_c_hat: f64,
    residual_rms: f64,
    side: &'a str,
    fit_t_min: f64,
    b: f64,
    #[serde(rename = "C_emp")]
    c_upper: Option<f64>,
    c_emp: Option<f64>,
    n_samples: usize,
    n_failures: usize,
    seed: u64,
}

fn growth_fit(config: &ExperimentConfig, built: &BuiltModel) -> Result<Outcome, CliError> {
    let run = run_flow(config, built)?;
    let fit = fit_growth_exponent(&run.field.samples, config.flow.fit_t_min)?;
    let mut artifacts = Artifacts::default();
    samples_csv(&mut artifacts, &run.field)?;
    let rows: Vec<Vec<String>> = fit
        .sides
        .iter()
        .map(|s| vec![num(s.beta), num(s.log_c), num(s.residual_rms), num(s.t_min), num(s.t_max), s.side.name().into()])
        .collect();
    let header = ["beta_hat", "logC_hat", "residual_rms", "t_min", "t_max", "side"].map(String::from);
    artifacts.add_csv("growth_fit.csv", &header, &rows)?;
    let ci = fit.confidence_interval(Z95);
    artifacts.add_json(
        "summary.json",
        &GrowthSummary {
            command: "growth-fit",
            model: &built.label,
            hypersurface: run.slice.name(),
            beta_hat: fit.beta_hat,
            beta_stderr: fit.beta_stderr,
            beta_ci95: ci,
            log_c_hat: fit.log_c_hat,
            residual_rms: fit.residual_rms,
            side: fit.side.name(),
            fit_t_min: config.flow.fit_t_min,
            b: built.b,
            c_upper: run.bounds.as_ref().map(|r| r.c_upper),
            c_emp: run.bounds.as_ref().map(|r| r.c_lower),
            n_samples: run.field.samples.len(),
            n_failures: run.field.failures.len(),
            seed: config.seed,
        },
    )?;
    let mut failures = bound_failures(&run.bounds);
    if run.bounds.is_some() && fit.beta_hat > built.b * 1.05 {
        failures.push(format!(
            "beta_hat {:.4} exceeds the curvature bound b = {:.4} by more than 5%",
            fit.beta_hat, built.b
        ));
    }
    Ok(Outcome {
        command: Command::GrowthFit,
        summary: format!(
            "growth-fit: beta_hat = {:.4} (95% CI [{:.4}, {:.4}], {} side, b = {:.4})",
            fit.beta_hat,
            ci.0,
            ci.1,
            fit.side.name(),
            built.b
        ),
        artifacts,
        failures,
    })
}

/// Random pair of points for the distance check: geodesic balls for the
/// hyperbolic models, a coordinate box near the axis for cone charts.
fn distance_point(rng: &mut ChaCha8Rng, spec: &ModelSpec, radius: f64) -> Vec<f64> {
    match spec {
        ModelSpec::UpperHalfSpace { dim, b } => {
            let dir = unit_vector(rng, *dim);
            half_space_point_at(&dir, rng.random_range(0.0..=1.0) * radius * b)
        }
        ModelSpec::WarpedHyperbolic { base_dim, b } => {
            let dir = unit_vector(rng, base_dim + 1);
            let mut p = half_space_to_fermi(&half_space_point_at(&dir, rng.random_range(0.0..=1.0) * radius * b));
            let last = p.len() - 1;
            p[last] /= b;
            p
        }
        ModelSpec::GtCone { fiber_dim, .. } => {
            let mut p = vec![rng.random_range(0.5..=3.0), rng.random_range(-0.8..=0.8)];
            p.extend(fiber_point(rng, *fiber_dim, 1.0));
            p
        }
    }
}

#[derive(Serialize)]
struct DistanceSummary<'a> {
    command: &'a str,
    model: &'a str,
    n_pairs: usize,
    radius: f64,
    max_rel_error: Option<f64>,
    max_symmetry_error: f64,
    mean_iterations: f64,
    seed: u64,
}

fn distance_check(config: &ExperimentConfig, spec: &ModelSpec, built: &BuiltModel) -> Result<Outcome, CliError> {
    let d = &config.distance;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..d.n_pairs)
        .map(|_| (distance_point(&mut rng, spec, d.radius), distance_point(&mut rng, spec, d.radius)))
        .collect();
    let opts = BvpOptions { tol: 100.0 * config.tol, ode_tol: 0.01 * config.tol, ..BvpOptions::default() };
    let model = &built.model;
    let results = map_ordered(&pairs, config.workers, |_, (a, b)| {
        let (p, q) = (Point::new(a.clone()), Point::new(b.clone()));
        let fwd = geodesic_distance_bvp_with(model, &p, &q, &opts)?;
        let rev = geodesic_distance_bvp_with(model, &q, &p, &opts)?;
        let closed = closed_form_distance(model, &p, &q).transpose()?;
        Ok::<_, pinchlab::GeomError>((closed, fwd, rev))
    });
    let n = model.dim();
    let mut header = coord_columns("p", n);
    header.extend(coord_columns("p_prime", n));
    header.extend(["d_closed", "d_bvp", "d_bvp_reverse", "rel_error", "symmetry_error"].map(String::from));
    let mut rows = Vec::with_capacity(pairs.len());
    let (mut max_rel, mut max_sym, mut iterations) = (None::<f64>, 0.0_f64, 0usize);
    for ((a, b), r) in pairs.iter().zip(results) {
        let (closed, fwd, rev) = r?;
        let sym = (fwd.distance - rev.distance).abs();
        let rel = closed.map(|c| (fwd.distance - c).abs() / c.max(f64::MIN_POSITIVE));
        max_sym = max_sym.max(sym);
        if let Some(e) = rel {
            max_rel = Some(max_rel.map_or(e, |m| m.max(e)));
        }
        iterations += fwd.iterations + rev.iterations;
        let mut row: Vec<String> = a.iter().chain(b).map(|&x| num(x)).collect();
        row.push(closed.map(num).unwrap_or_default());
        row.extend([num(fwd.distance), num(rev.distance), rel.map(num).unwrap_or_default(), num(sym)]);
        rows.push(row);
    }
    let mut artifacts = Artifacts::default();
    artifacts.add_csv("distance_check.csv", &header, &rows)?;
    artifacts.add_json(
        "summary.json",
        &DistanceSummary {
            command: "distance-check",
            model: &built.label,
            n_pairs: pairs.len(),
            radius: d.radius,
            max_rel_error: max_rel,
            max_symmetry_error: max_sym,
            mean_iterations: iterations as f64 / (2 * pairs.len()) as f64,
            seed: config.seed,
        },
    )?;
    let mut failures = Vec::new();
    if let Some(e) = max_rel.filter(|&e| e > d.rel_tol) {
        failures.push(format!("shooting distance deviates from the closed form by {e:.3e} (relative)"));
    }
    if max_sym > d.symmetry_tol {
        failures.push(format!("distance asymmetry {max_sym:.3e} exceeds {:.1e}", d.symmetry_tol));
    }
    let summary = match max_rel {
        Some(e) => format!("distance-check: max distance error {e:.3e} (relative), max asymmetry {max_sym:.3e}"),
        None => format!("distance-check: no closed form; max asymmetry {max_sym:.3e}"),
    };
    Ok(Outcome { command: Command::DistanceCheck, summary, artifacts, failures })
}

#[derive(Serialize)]
struct DistortionSummary<'a> {
    command: &'a str,
    model: &'a str,
    map: &'a str,
    #[serde(rename = "C_emp")]
    c_upper: f64,
    c_emp: f64,
    beta: f64,
    #[serde(rename = "L")]
    lipschitz: f64,
    n_pairs: usize,
    n_skipped: usize,
    seed: u64,
}

fn distortion(config: &ExperimentConfig, built: &BuiltModel) -> Result<Outcome, CliError> {
    let s = &config.distortion;
    let f = match s.map.as_str() {
        "identity" => BaseMap::Identity,
        "scaling" => BaseMap::Scaling { lambda: s.lambda },
        "shear" => BaseMap::Shear { a: s.a },
        other => return Err(CliError::Config(format!("unknown base map {other:?}"))),
    };
    let sampler = PairSampler { seed: config.seed, n_pairs: s.n_pairs, radius: s.radius, t_max: s.t_max };
    let opts = LemmaOptions {
        bvp: BvpOptions { tol: 100.0 * config.tol, ode_tol: 0.01 * config.tol, ..BvpOptions::default() },
        workers: config.workers,
    };
    let report = lemma_checks(&built.model, Hypersurface::WarpedZeroSlice, &f, s.beta, &sampler, &opts)?;
    let n = built.model.dim();
    let mut header = coord_columns("p", n);
    header.extend(coord_columns("p_prime", n));
    header.extend(["d_X", "d_H_beta", "d_H_1", "ratio41", "ratio42"].map(String::from));
    let rows: Vec<Vec<String>> = report
        .pairs
        .iter()
        .map(|p| {
            let mut row: Vec<String> = p.p.iter().chain(&p.p2).map(|&x| num(x)).collect();
            row.extend([num(p.d_x), num(p.d_h_beta), num(p.d_h_1), num(p.ratio_upper), num(p.ratio_lower)]);
            row
        })
        .collect();
    let mut artifacts = Artifacts::default();
    artifacts.add_csv("distortion_pairs.csv", &header, &rows)?;
    artifacts.add_json(
        "summary.json",
        &DistortionSummary {
            command: "distortion",
            model: &built.label,
            map: &s.map,
            c_upper: report.c_upper,
            c_emp: report.c_lower,
            beta: report.beta,
            lipschitz: report.lipschitz,
            n_pairs: report.n_pairs,
            n_skipped: report.skipped.len(),
            seed: config.seed,
        },
    )?;
    // On the unit-curvature space the exponent-1 map is exactly as distorting
    // as the base map, so its ratios must stay within [1/L, L].
    let mut failures = Vec::new();
    let unit_space = (built.kappa_min + 1.0).abs() < 1e-12 && (built.kappa_max + 1.0).abs() < 1e-12;
    if unit_space && s.beta == 1.0 {
        let l = report.lipschitz;
        if report.c_upper > l * (1.0 + 1e-9) || report.c_lower < (1.0 - 1e-9) / l {
            failures.push(format!(
                "distortion ratios [{:.6}, {:.6}] leave [1/L, L] with L = {l:.6}",
                report.c_lower, report.c_upper
            ));
        }
    }
    Ok(Outcome {
        command: Command::Distortion,
        summary: format!(
            "distortion: C_emp = {:.4}, c_emp = {:.4} over {} pairs (beta = {}, L = {:.4})",
            report.c_upper, report.c_lower, report.n_pairs, report.beta, report.lipschitz
        ),
        artifacts,
        failures,
    })
}

#[derive(Serialize)]
struct GtRow {
    rho: f64,
    r0: f64,
    kappa_min: f64,
    kappa_max: f64,
    #[serde(rename = "pinch_C")]
    pinch_c: f64,
    status: &'static str,
}

#[derive(Serialize)]
struct GtSummary<'a> {
    command: &'a str,
    k: u32,
    profile: &'a str,
    rows: Vec<GtRow>,
    #[serde(rename = "pinch_C_decreasing")]
    decreasing: bool,
    seed: u64,
}

fn gt_report(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let g = &config.gt;
    let profile = parse_profile(&g.profile)?;
    let frac = g.r0_fraction.unwrap_or(0.25);
    let grid = PinchGrid {
        n_r: g.n_r,
        random_planes: g.random_planes.unwrap_or(DEFAULT_RANDOM_PLANES),
        seed: config.seed,
        fiber_dim: g.fiber_dim,
        ..PinchGrid::default()
    };
    let mut reports = Vec::with_capacity(g.rho.len());
    for &rho in &g.rho {
        let spec = SmoothingSpec::new(g.k, frac * rho, rho, profile)?;
        reports.push(pinching_report(&spec, &grid, config.workers)?);
    }
    let pinch_rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.spec.k.to_string(),
                num(r.spec.r0),
                num(r.spec.rho),
                num(r.kappa_min),
                num(r.kappa_max),
                num(r.pinch_c),
                r.status.name().into(),
            ]
        })
        .collect();
    let mut profile_rows = Vec::new();
    for r in &reports {
        for row in &r.profile {
            let c = &row.curvatures;
            profile_rows.push(vec![
                r.spec.k.to_string(),
                num(r.spec.rho),
                num(row.r),
                num(c.r_theta),
                num(c.r_x),
                num(c.theta_x),
            ]);
        }
    }
    let mut artifacts = Artifacts::default();
    let header = ["k", "r0", "rho", "kappa_min", "kappa_max", "pinch_C", "status"].map(String::from);
    artifacts.add_csv("gt_pinching.csv", &header, &pinch_rows)?;
    let header = ["k", "rho", "r", "K_r_theta", "K_r_x", "K_theta_x"].map(String::from);
    artifacts.add_csv("curvature_profile.csv", &header, &profile_rows)?;
    let decreasing = reports.windows(2).all(|w| w[1].pinch_c < w[0].pinch_c);
    artifacts.add_json(
        "summary.json",
        &GtSummary {
            command: "gt-report",
            k: g.k,
            profile: profile.name(),
            rows: reports
                .iter()
                .map(|r| GtRow {
                    rho: r.spec.rho,
                    r0: r.spec.r0,
                    kappa_min: r.kappa_min,
                    kappa_max: r.kappa_max,
                    pinch_c: r.pinch_c,
                    status: r.status.name(),
                })
                .collect(),
            decreasing,
            seed: config.seed,
        },
    )?;
    let failures: Vec<String> = reports
        .iter()
        .filter(|r| r.status != PinchStatus::Pinched)
        .map(|r| format!("rho = {}: positive curvature {:.4} found", r.spec.rho, r.kappa_max))
        .collect();
    let values: Vec<String> = reports.iter().map(|r| format!("{:.3}", r.pinch_c)).collect();
    Ok(Outcome {
        command: Command::GtReport,
        summary: format!("gt-report: k = {}, pinch_C = {} for rho = {:?}", g.k, values.join(", "), g.rho),
        artifacts,
        failures,
    })
}
