//! Closed-form distances and coordinate changes between hyperbolic models.

use crate::error::{GeomError, Result};
use crate::geometry::{MetricModel, Point, SmoothFunction1D};
use crate::scalar::Real;

/// `arcosh(1 + a)` for `a ≥ 0`, written to stay accurate when `a` is tiny.
fn arcosh1p<T: Real>(a: T) -> T {
    T::lit(2.0) * (a * T::lit(0.5)).sqrt().asinh()
}

/// Distance in the upper half-space model of curvature `-b²`; the height is
/// the last coordinate.
pub fn hyperbolic_distance<T: Real>(p: &[T], q: &[T], b: T) -> Result<T> {
    if p.len() != q.len() || p.is_empty() {
        return Err(GeomError::Dimension { expected: p.len(), got: q.len() });
    }
    if !(b > T::zero()) {
        return Err(GeomError::InvalidArgument("curvature scale b must be positive".into()));
    }
    let n = p.len();
    let (y, y2) = (p[n - 1], q[n - 1]);
    if !(y > T::zero()) || !(y2 > T::zero()) {
        return Err(GeomError::Domain("upper half-space points need a positive height".into()));
    }
    let sq: T = p.iter().zip(q).map(|(&a, &c)| (a - c) * (a - c)).sum();
    if !sq.is_finite() {
        return Err(GeomError::Numerical("non-finite coordinates".into()));
    }
    Ok(arcosh1p(sq / (T::lit(2.0) * y * y2)) / b)
}

/// Distance in `ℍ^{n+1}` between Fermi points `(q, t)` and `(q', t')` over a
/// totally geodesic `ℍⁿ`, given the base distance `d0 = d(q, q')`.
pub fn warped_distance<T: Real>(t: T, t2: T, d0: T) -> Result<T> {
    if !(d0 >= T::zero()) || !d0.is_finite() || !t.is_finite() || !t2.is_finite() {
        return Err(GeomError::InvalidArgument(format!("invalid warped distance input ({t}, {t2}, {d0})")));
    }
    // cosh t cosh t' cosh d0 − sinh t sinh t' − 1, split into nonnegative terms.
    let half = T::lit(0.5);
    let a = T::lit(2.0) * ((t - t2) * half).sinh().powi(2)
        + T::lit(2.0) * t.cosh() * t2.cosh() * (d0 * half).sinh().powi(2);
    if !a.is_finite() {
        return Err(GeomError::Numerical("warped distance overflow".into()));
    }
    Ok(arcosh1p(a))
}

/// Maps Fermi coordinates `(x…, y, t)` over the vertical hyperplane
/// `{u_{n-1} = 0}` of the upper half-space to half-space coordinates
/// `(x…, y tanh t, y sech t)`.
pub fn fermi_to_half_space<T: Real>(fermi: &[T]) -> Vec<T> {
    let n = fermi.len();
    let (y, t) = (fermi[n - 2], fermi[n - 1]);
    let mut out = fermi[..n - 2].to_vec();
    out.push(y * t.tanh());
    out.push(y / t.cosh());
    out
}

/// Inverse of [`fermi_to_half_space`].
pub fn half_space_to_fermi<T: Real>(u: &[T]) -> Vec<T> {
    let n = u.len();
    let (a, h) = (u[n - 2], u[n - 1]);
    let y = a.hypot(h);
    let mut out = u[..n - 2].to_vec();
    out.push(y);
    out.push((a / y).atanh());
    out
}

/// The point at distance `r` from `(0, …, 0, 1)` in the unit-curvature
/// half-space, along the unit direction `dir` (Euclidean unit vector).
pub fn half_space_point_at<T: Real>(dir: &[T], r: T) -> Vec<T> {
    let n = dir.len();
    let up = dir[n - 1].max(-T::one()).min(T::one());
    let horizontal: T = dir[..n - 1].iter().map(|&c| c * c).sum::<T>().sqrt();
    // Rotate the vertical geodesic `i e^r` about `i` by the direction's angle.
    let phi = horizontal.atan2(up);
    let (s, c) = ((-phi * T::lit(0.5)).sin(), (-phi * T::lit(0.5)).cos());
    let e = r.exp();
    let den = c * c + s * s * e * e;
    let x = s * c * (T::one() - e * e) / den;
    let y = e / den;
    let mut out: Vec<T> = if horizontal > T::zero() {
        dir[..n - 1].iter().map(|&d| x * d / horizontal).collect()
    } else {
        vec![T::zero(); n - 1]
    };
    out.push(y);
    out
}

/// Closed-form distance for models where one is known: upper half-spaces,
/// hyperbolic warped products `cosh²(bt) g_b + dt²`, flat diagonal metrics,
/// and rescalings of those. Returns `None` for other models.
pub fn closed_form_distance<T: Real>(model: &MetricModel<T>, p: &Point<T>, q: &Point<T>) -> Option<Result<T>> {
    match model {
        MetricModel::UpperHalfSpace { b, .. } => Some(hyperbolic_distance(&p.coords, &q.coords, *b)),
        MetricModel::WarpedSlice { base, warp: SmoothFunction1D::Cosh { rate } } => {
            match base.as_ref() {
                MetricModel::UpperHalfSpace { b, .. } if b == rate => {
                    let n = p.coords.len();
                    let b = *b;
                    Some(hyperbolic_distance(&p.coords[..n - 1], &q.coords[..n - 1], b).and_then(|d0| {
                        warped_distance(b * p.coords[n - 1], b * q.coords[n - 1], b * d0).map(|d| d / b)
                    }))
                }
                _ => None,
            }
        }
        MetricModel::Rescaled { inner, lambda } => closed_form_distance(inner, p, q).map(|d| d.map(|d| d * *lambda)),
        MetricModel::ConstantDiagonal { diag } => Some(Ok(diag
            .iter()
            .zip(p.coords.iter().zip(&q.coords))
            .map(|(&g, (&a, &c))| g * (a - c) * (a - c))
            .sum::<T>()
            .sqrt())),
        _ => None,
    }
}
