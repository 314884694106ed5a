//! Geodesic integration and the exponential map.

use crate::error::{GeomError, Result};
use crate::flow::system::{solve_times, Block, JointSystem};
use crate::geometry::{MetricModel, Point, TangentVector};
use crate::scalar::Real;

/// Default integration tolerance (relative and absolute).
pub const DEFAULT_TOL: f64 = 1e-9;

/// Position and velocity (chart-basis components at `p`).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState<T> {
    pub p: Point<T>,
    pub v: Vec<T>,
}

impl<T: Real> PhaseState<T> {
    pub fn new(p: Point<T>, v: Vec<T>) -> Self {
        Self { p, v }
    }

    pub fn velocity(&self) -> TangentVector<T> {
        TangentVector::new(self.p.clone(), self.v.clone())
    }

    pub fn speed(&self, model: &MetricModel<T>) -> T {
        model.norm_unchecked(&self.p.coords, &self.v)
    }

    /// Checks the point's domain and the velocity's dimension.
    pub fn validate(&self, model: &MetricModel<T>) -> Result<()> {
        model.check(&self.p)?;
        if self.v.len() != model.dim() {
            return Err(GeomError::Dimension { expected: model.dim(), got: self.v.len() });
        }
        if self.v.iter().any(|c| !c.is_finite()) {
            return Err(GeomError::InvalidArgument("non-finite velocity".into()));
        }
        Ok(())
    }
}

/// A geodesic sampled at requested times.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPath<T> {
    /// `(t, state)` for every requested time that was reached, in request order.
    pub samples: Vec<(T, PhaseState<T>)>,
    /// Set when the geodesic left the chart before the last requested time.
    pub exited: bool,
    /// Time of the last valid state when `exited` is set.
    pub exit_time: Option<T>,
    pub initial_speed: T,
    /// Largest `| |γ'(t)| − |γ'(0)| |` over the returned samples.
    pub speed_drift: T,
}

impl<T: Real> GeodesicPath<T> {
    /// The state at the last sample.
    pub fn end(&self) -> Option<&PhaseState<T>> {
        self.samples.last().map(|(_, s)| s)
    }
}

/// Integrates the geodesic equation from `start` to time `duration` (either
/// sign) and returns the start and end states.
pub fn integrate_geodesic<T: Real>(
    model: &MetricModel<T>,
    start: &PhaseState<T>,
    duration: T,
    tol: T,
) -> Result<GeodesicPath<T>> {
    integrate_geodesic_at(model, start, &[T::zero(), duration], tol)
}

/// Integrates the geodesic equation and reports the state at each of `times`.
///
/// Times may have either sign; the path is integrated forward and backward
/// from `t = 0` as needed. If the chart is left, the samples reached before
/// the exit are returned with `exited` set.
pub fn integrate_geodesic_at<T: Real>(
    model: &MetricModel<T>,
    start: &PhaseState<T>,
    times: &[T],
    tol: T,
) -> Result<GeodesicPath<T>> {
    start.validate(model)?;
    if !(tol > T::zero()) {
        return Err(GeomError::InvalidArgument("tolerance must be positive".into()));
    }
    let sys = JointSystem::new(model, Block::None);
    let y0 = sys.pack(&start.p.coords, &start.v, &[]);
    let solved = solve_times(&sys, &y0, times, tol)?;
    let initial_speed = start.speed(model);
    let mut drift = T::zero();
    let mut samples = Vec::with_capacity(times.len());
    for (&t, state) in times.iter().zip(&solved.states) {
        if let Some(y) = state {
            let s = sys.phase(y);
            drift = drift.max((s.speed(model) - initial_speed).abs());
            samples.push((t, s));
        }
    }
    Ok(GeodesicPath {
        samples,
        exited: solved.exit_time.is_some(),
        exit_time: solved.exit_time,
        initial_speed,
        speed_drift: drift,
    })
}

/// `exp_p(w)`: the endpoint of the geodesic with initial velocity `w / |w|`
/// after time `|w|`. Leaving the chart is an error here.
pub fn exp_map<T: Real>(model: &MetricModel<T>, w: &TangentVector<T>, tol: T) -> Result<Point<T>> {
    let len = model.norm(w)?;
    if len == T::zero() {
        return Ok(w.base.clone());
    }
    let v = w.components.iter().map(|&c| c / len).collect();
    let path = integrate_geodesic(model, &PhaseState::new(w.base.clone(), v), len, tol)?;
    if let Some(t) = path.exit_time {
        return Err(GeomError::ExitedDomain(t.to_f64_lossy()));
    }
    Ok(path.end().expect("end sample present").p.clone())
}
