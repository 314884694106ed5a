//! Smoothed cone metrics `dr² + σ(r)² dθ² + cosh²(r) dx²` and their
//! curvature pinching.
//!
//! `σ` equals `sinh` below `r0`, `k·sinh` above `rho`, and blends the two with
//! the quintic step `s(u) = 6u⁵ − 15u⁴ + 10u³`, `u = (r − r0)/(rho − r0)`.

use crate::error::{GeomError, Result};
use crate::geometry::{
    curvature_range_scan, linspace, CurvatureRange, Jet1, MetricModel, Point, ScanGrid, SmoothFunction1D,
    DEFAULT_RANDOM_PLANES, DEFAULT_R_EPS,
};
use crate::scalar::Real;

/// How the factor in front of `sinh` moves from 1 to `k` across `[r0, rho]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TransitionProfile {
    /// `σ = (1 + (k − 1)·s(u))·sinh(r)`.
    #[default]
    LinearQuintic,
    /// `σ = k^{s(u)}·sinh(r)`. Develops positive curvature for short
    /// transitions (e.g. `k = 2, r0 = 0.5, rho = 2`).
    LogQuintic,
}

impl TransitionProfile {
    pub fn name(self) -> &'static str {
        match self {
            Self::LinearQuintic => "linear-quintic",
            Self::LogQuintic => "log-quintic",
        }
    }
}

impl std::str::FromStr for TransitionProfile {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear-quintic" => Ok(Self::LinearQuintic),
            "log-quintic" => Ok(Self::LogQuintic),
            other => Err(GeomError::InvalidArgument(format!("unknown transition profile {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingSpec<T> {
    /// Branching degree.
    pub k: u32,
    pub r0: T,
    /// Outer edge of the transition (normal injectivity radius surrogate).
    pub rho: T,
    pub profile: TransitionProfile,
}

/// Quintic smooth step and its first two derivatives in `u`, clamped to `[0, 1]`.
pub fn quintic_step<T: Real>(u: T) -> Jet1<T> {
    if u <= T::zero() {
        return Jet1 { f: T::zero(), df: T::zero(), d2f: T::zero() };
    }
    if u >= T::one() {
        return Jet1 { f: T::one(), df: T::zero(), d2f: T::zero() };
    }
    let u2 = u * u;
    let u3 = u2 * u;
    let one = T::one();
    Jet1 {
        f: u3 * (T::lit(10.0) + u * (T::lit(-15.0) + T::lit(6.0) * u)),
        df: T::lit(30.0) * u2 * (u - one) * (u - one),
        d2f: T::lit(60.0) * u * (u - one) * (T::lit(2.0) * u - one),
    }
}

impl<T: Real> SmoothingSpec<T> {
    pub fn new(k: u32, r0: T, rho: T, profile: TransitionProfile) -> Result<Self> {
        let spec = Self { k, r0, rho, profile };
        spec.validate()?;
        Ok(spec)
    }

    /// Default geometry `r0 = rho / 4`.
    pub fn with_quarter_r0(k: u32, rho: T) -> Result<Self> {
        Self::new(k, rho / T::lit(4.0), rho, TransitionProfile::default())
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(GeomError::InvalidArgument("branching degree k must be >= 1".into()));
        }
        if !(self.r0 > T::zero() && self.rho > self.r0) || !self.rho.is_finite() {
            return Err(GeomError::InvalidArgument("smoothing spec needs 0 < r0 < rho".into()));
        }
        Ok(())
    }

    /// `σ`, `σ'`, `σ''` at `r`.
    pub fn sigma_jet(&self, r: T) -> Jet1<T> {
        let (sh, ch) = (r.sinh(), r.cosh());
        let k = T::from_u32(self.k).expect("k representable");
        if r <= self.r0 {
            return Jet1 { f: sh, df: ch, d2f: sh };
        }
        if r >= self.rho {
            return Jet1 { f: k * sh, df: k * ch, d2f: k * sh };
        }
        let width = self.rho - self.r0;
        let s = quintic_step((r - self.r0) / width);
        let s1 = s.df / width;
        let s2 = s.d2f / (width * width);
        let two = T::lit(2.0);
        match self.profile {
            TransitionProfile::LinearQuintic => {
                let km1 = k - T::one();
                let m = T::one() + km1 * s.f;
                let m1 = km1 * s1;
                let m2 = km1 * s2;
                Jet1 { f: m * sh, df: m1 * sh + m * ch, d2f: m2 * sh + two * m1 * ch + m * sh }
            }
            TransitionProfile::LogQuintic => {
                let l = k.ln();
                let e = (l * s.f).exp();
                Jet1 {
                    f: e * sh,
                    df: e * (l * s1 * sh + ch),
                    d2f: e * ((l * s2 + l * l * s1 * s1) * sh + two * l * s1 * ch + sh),
                }
            }
        }
    }
}

/// The smoothed circumferential function for `spec`.
pub fn build_sigma<T: Real>(spec: &SmoothingSpec<T>) -> Result<SmoothFunction1D<T>> {
    spec.validate()?;
    Ok(SmoothFunction1D::Smoothed(spec.clone()))
}

/// Cone chart carrying the smoothed metric.
pub fn gt_model<T: Real>(spec: &SmoothingSpec<T>, fiber_dim: usize, r_max: T) -> Result<MetricModel<T>> {
    let model = MetricModel::cone_chart(fiber_dim, build_sigma(spec)?, r_max);
    model.validate()?;
    Ok(model)
}

/// Sectional curvatures of the three coordinate plane types.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneCurvatures<T> {
    pub r_theta: T,
    pub r_x: T,
    pub theta_x: T,
}

/// Closed forms `K(∂r,∂θ) = −σ''/σ`, `K(∂r,∂x) = −1`,
/// `K(∂θ,∂x) = −σ' sinh r / (σ cosh r)`.
pub fn gt_plane_curvatures<T: Real>(sigma: &SmoothFunction1D<T>, r: T) -> Result<PlaneCurvatures<T>> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(GeomError::Domain(format!("r = {r} outside (0, inf)")));
    }
    let s = sigma.jet(r);
    if !(s.f > T::zero()) {
        return Err(GeomError::Numerical(format!("sigma({r}) = {} is not positive", s.f)));
    }
    Ok(PlaneCurvatures { r_theta: -s.d2f / s.f, r_x: -T::one(), theta_x: -(s.df * r.tanh()) / s.f })
}

/// Radial grid for a pinching scan.
#[derive(Debug, Clone, PartialEq)]
pub struct PinchGrid<T> {
    pub r_eps: T,
    /// Upper end of the scan; `None` means `rho + 1`.
    pub r_hi: Option<T>,
    pub n_r: usize,
    pub random_planes: usize,
    pub seed: u64,
    pub fiber_dim: usize,
}

impl<T: Real> Default for PinchGrid<T> {
    fn default() -> Self {
        Self {
            r_eps: T::lit(DEFAULT_R_EPS),
            r_hi: None,
            n_r: 400,
            random_planes: DEFAULT_RANDOM_PLANES,
            seed: 0,
            fiber_dim: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinchStatus {
    Pinched,
    NotPinched,
}

impl PinchStatus {
    pub fn name(self) -> &'static str {
        match self {
            Self::Pinched => "pinched",
            Self::NotPinched => "not pinched",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneExtrema<T> {
    pub plane: &'static str,
    pub min: T,
    pub max: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureProfileRow<T> {
    pub r: T,
    pub curvatures: PlaneCurvatures<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GTReport<T> {
    pub spec: SmoothingSpec<T>,
    pub kappa_min: T,
    pub kappa_max: T,
    /// `max(−kappa_min, −1/kappa_max)`; infinite when not pinched.
    pub pinch_c: T,
    pub status: PinchStatus,
    pub grid: PinchGrid<T>,
    /// Coordinate-plane extrema from the tensor scan: `r-theta`, `r-x`, `theta-x`.
    pub plane_extrema: Vec<PlaneExtrema<T>>,
    /// Closed-form plane curvatures at each scanned radius.
    pub profile: Vec<CurvatureProfileRow<T>>,
    pub scan: CurvatureRange<T>,
}

fn plane_name(i: usize, j: usize) -> &'static str {
    let kind = |a: usize| a.min(2);
    match (kind(i), kind(j)) {
        (0, 1) => "r-theta",
        (0, 2) => "r-x",
        (1, 2) => "theta-x",
        _ => "x-x",
    }
}

/// Scans the smoothed cone metric over `[r_eps, r_hi]` and reports its
/// curvature range and pinching constant.
pub fn pinching_report<T: Real>(spec: &SmoothingSpec<T>, grid: &PinchGrid<T>, workers: usize) -> Result<GTReport<T>> {
    spec.validate()?;
    if grid.n_r == 0 {
        return Err(GeomError::InvalidArgument("pinching grid needs n_r >= 1".into()));
    }
    let r_hi = grid.r_hi.unwrap_or(spec.rho + T::one());
    if !(r_hi > grid.r_eps) {
        return Err(GeomError::InvalidArgument("pinching grid needs r_hi > r_eps".into()));
    }
    let model =
        MetricModel::ConeChart { fiber_dim: grid.fiber_dim, sigma: build_sigma(spec)?, r_max: r_hi, r_eps: grid.r_eps };
    model.validate()?;
    let radii = linspace(grid.r_eps, r_hi, grid.n_r);
    let points: Vec<Point<T>> = radii
        .iter()
        .map(|&r| {
            let mut x = vec![r, T::zero()];
            x.extend(std::iter::repeat_n(T::zero(), grid.fiber_dim));
            if grid.fiber_dim > 1 {
                *x.last_mut().unwrap() = T::one();
            }
            Point::new(x)
        })
        .collect();
    let scan_grid = ScanGrid { points, random_planes: grid.random_planes, seed: grid.seed };
    let scan = curvature_range_scan(&model, &scan_grid, workers)?;
    let mut plane_extrema: Vec<PlaneExtrema<T>> = Vec::new();
    for c in &scan.coordinate_extrema {
        let name = plane_name(c.axes.0, c.axes.1);
        match plane_extrema.iter_mut().find(|p| p.plane == name) {
            Some(p) => {
                p.min = p.min.min(c.min);
                p.max = p.max.max(c.max);
            }
            None => plane_extrema.push(PlaneExtrema { plane: name, min: c.min, max: c.max }),
        }
    }
    let sigma = build_sigma(spec)?;
    let profile = radii
        .iter()
        .map(|&r| Ok(CurvatureProfileRow { r, curvatures: gt_plane_curvatures(&sigma, r)? }))
        .collect::<Result<Vec<_>>>()?;
    let kappa_min = scan.min.kappa;
    let kappa_max = scan.max.kappa;
    let (status, pinch_c) = if kappa_max < T::zero() {
        (PinchStatus::Pinched, (-kappa_min).max(-T::one() / kappa_max))
    } else {
        (PinchStatus::NotPinched, T::infinity())
    };
    Ok(GTReport {
        spec: spec.clone(),
        kappa_min,
        kappa_max,
        pinch_c,
        status,
        grid: grid.clone(),
        plane_extrema,
        profile,
        scan,
    })
}

/// Metric rescaling `g ↦ λ² g` that moves the maximal curvature to `−1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rescaling<T> {
    pub lambda: T,
    /// Curvature range of the rescaled metric.
    pub kappa_min: T,
    pub kappa_max: T,
    /// Rescaled range is `[−1 − epsilon, −1]`.
    pub epsilon: T,
}

impl<T: Real> Rescaling<T> {
    pub fn from_range(kappa_min: T, kappa_max: T) -> Result<Self> {
        if !(kappa_max < T::zero()) || kappa_min > kappa_max {
            return Err(GeomError::InvalidArgument(format!(
                "curvature range [{kappa_min}, {kappa_max}] is not negatively pinched"
            )));
        }
        let lambda_sq = -kappa_max;
        Ok(Self {
            lambda: lambda_sq.sqrt(),
            kappa_min: kappa_min / lambda_sq,
            kappa_max: -T::one(),
            epsilon: kappa_min / kappa_max - T::one(),
        })
    }
}

pub fn rescale_to_pinched<T: Real>(report: &GTReport<T>) -> Result<Rescaling<T>> {
    if report.status != PinchStatus::Pinched {
        return Err(GeomError::InvalidArgument("cannot rescale a report that is not pinched".into()));
    }
    Rescaling::from_range(report.kappa_min, report.kappa_max)
}

impl<T: Real> GTReport<T> {
    /// The cone model rescaled so that its maximal curvature is `−1`.
    pub fn rescaled_model(&self, r_max: T) -> Result<(MetricModel<T>, Rescaling<T>)> {
        let rescaling = rescale_to_pinched(self)?;
        let model = gt_model(&self.spec, self.grid.fiber_dim, r_max)?.rescaled(rescaling.lambda);
        Ok((model, rescaling))
    }
}
