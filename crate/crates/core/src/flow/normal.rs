//! Totally geodesic hypersurfaces, their normal flow and its differential.

use crate::batch::map_ordered;
use crate::error::{GeomError, Result};
use crate::flow::geodesic::{exp_map, PhaseState};
use crate::flow::jacobi::propagate_jacobi_frame;
use crate::geometry::{MetricModel, Point, TangentVector};
use crate::linalg::Mat;
use crate::scalar::Real;

/// Coordinates closer than this to the slice count as lying on it.
const ON_SLICE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypersurface {
    /// `{t = 0}` in a warped slice model; unit normal along `∂_t`.
    WarpedZeroSlice,
    /// `{θ = 0} ∪ {θ = π}` in a cone chart; unit normal along `∂_θ`.
    ConeReflectionSlice,
}

impl Hypersurface {
    pub fn name(self) -> &'static str {
        match self {
            Self::WarpedZeroSlice => "warped-zero-slice",
            Self::ConeReflectionSlice => "cone-reflection-slice",
        }
    }

    /// Chart axis the unit normal points along.
    pub fn normal_axis<T: Real>(self, model: &MetricModel<T>) -> Result<usize> {
        match (self, model.unscaled().0) {
            (Self::WarpedZeroSlice, MetricModel::WarpedSlice { .. }) => Ok(model.dim() - 1),
            (Self::ConeReflectionSlice, MetricModel::ConeChart { .. }) => Ok(1),
            _ => Err(GeomError::InvalidArgument(format!("{} does not fit model {model:?}", self.name()))),
        }
    }

    /// Whether `q` lies on the hypersurface (domain checks included).
    pub fn contains<T: Real>(self, model: &MetricModel<T>, q: &Point<T>) -> Result<bool> {
        let axis = self.normal_axis(model)?;
        model.check(q)?;
        let c = q.coords[axis];
        let tol = T::lit(ON_SLICE_TOL);
        Ok(match self {
            Self::WarpedZeroSlice => c.abs() <= tol,
            Self::ConeReflectionSlice => {
                let half_turns = c / T::PI();
                (half_turns - half_turns.round()).abs() * T::PI() <= tol
            }
        })
    }

    fn require_on<T: Real>(self, model: &MetricModel<T>, q: &Point<T>) -> Result<usize> {
        if !self.contains(model, q)? {
            return Err(GeomError::InvalidArgument(format!("point {:?} is not on {}", q.coords, self.name())));
        }
        self.normal_axis(model)
    }

    /// Unit normal `ν(q)` in chart components.
    pub fn normal<T: Real>(self, model: &MetricModel<T>, q: &Point<T>) -> Result<Vec<T>> {
        let axis = self.require_on(model, q)?;
        let g = model.metric_diag_unchecked(&q.coords);
        let mut nu = vec![T::zero(); model.dim()];
        nu[axis] = T::one() / g[axis].sqrt();
        Ok(nu)
    }

    /// Orthonormal frame of `T_qΣ` (the normalized coordinate axes other
    /// than the normal axis).
    pub fn tangent_frame<T: Real>(self, model: &MetricModel<T>, q: &Point<T>) -> Result<Vec<Vec<T>>> {
        let axis = self.require_on(model, q)?;
        let g = model.metric_diag_unchecked(&q.coords);
        Ok((0..model.dim())
            .filter(|&k| k != axis)
            .map(|k| {
                let mut e = vec![T::zero(); model.dim()];
                e[k] = T::one() / g[k].sqrt();
                e
            })
            .collect())
    }

    /// The full frame `(ν, tangent frame)` at `q`.
    pub fn adapted_frame<T: Real>(self, model: &MetricModel<T>, q: &Point<T>) -> Result<Vec<Vec<T>>> {
        let mut frame = vec![self.normal(model, q)?];
        frame.extend(self.tangent_frame(model, q)?);
        Ok(frame)
    }
}

/// `Φ_t^ν(q) = exp_q(t ν(q))`. Exact on warped slices, where normal
/// geodesics are the coordinate lines `s ↦ (q, s)`.
pub fn normal_flow<T: Real>(
    model: &MetricModel<T>,
    sigma: Hypersurface,
    q: &Point<T>,
    t: T,
    tol: T,
) -> Result<Point<T>> {
    let nu = sigma.normal(model, q)?;
    match sigma {
        Hypersurface::WarpedZeroSlice => {
            let axis = model.dim() - 1;
            let mut coords = q.coords.clone();
            coords[axis] = coords[axis] + t * nu[axis];
            let out = Point::new(coords);
            model.check(&out)?;
            Ok(out)
        }
        Hypersurface::ConeReflectionSlice => {
            let w = TangentVector::new(q.clone(), nu.iter().map(|&c| c * t).collect());
            exp_map(model, &w, tol)
        }
    }
}

/// The differential of the normal flow restricted to `T_qΣ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowDifferential<T> {
    pub base: Point<T>,
    pub t: T,
    /// Column `i` holds the image of the `i`-th tangent frame vector of `Σ`
    /// in the perpendicular parallel frame at `Φ_t(q)`.
    pub frame_image: Mat<T>,
    pub operator_norm: T,
}

/// `dΦ_t^ν(q)` at each time in `times`, from one joint solve per side.
///
/// Because `Σ` is totally geodesic its shape operator vanishes, so the
/// images of the tangent frame are the Jacobi fields with `J(0) = e_i` and
/// `J'(0) = 0`.
pub fn dphi_at_times<T: Real>(
    model: &MetricModel<T>,
    sigma: Hypersurface,
    q: &Point<T>,
    times: &[T],
    tol: T,
) -> Result<Vec<FlowDifferential<T>>> {
    let frame = sigma.adapted_frame(model, q)?;
    let start = PhaseState::new(q.clone(), frame[0].clone());
    let p = model.dim() - 1;
    let samples = propagate_jacobi_frame(model, &start, &frame, &Mat::identity(p), &Mat::zeros(p, p), times, tol)?;
    Ok(samples
        .into_iter()
        .map(|s| FlowDifferential { base: q.clone(), t: s.t, operator_norm: s.y.operator_norm(), frame_image: s.y })
        .collect())
}

pub fn dphi_operator_norm<T: Real>(
    model: &MetricModel<T>,
    sigma: Hypersurface,
    q: &Point<T>,
    t: T,
    tol: T,
) -> Result<FlowDifferential<T>> {
    Ok(dphi_at_times(model, sigma, q, &[t], tol)?.remove(0))
}

/// [`dphi_at_times`] for many base points on `workers` threads; results are
/// in the order of `points` regardless of the worker count.
pub fn dphi_batch<T: Real>(
    model: &MetricModel<T>,
    sigma: Hypersurface,
    points: &[Point<T>],
    times: &[T],
    tol: T,
    workers: usize,
) -> Vec<Result<Vec<FlowDifferential<T>>>> {
    map_ordered(points, workers, |_, q| dphi_at_times(model, sigma, q, times, tol))
}
