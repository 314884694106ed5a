//! Grid scans of sectional curvature.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::batch::map_ordered;
use crate::error::{GeomError, Result};
use crate::geometry::model::MetricModel;
use crate::geometry::point::Point;
use crate::scalar::Real;

/// Random planes sampled per grid point unless overridden.
pub const DEFAULT_RANDOM_PLANES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid<T> {
    pub points: Vec<Point<T>>,
    pub random_planes: usize,
    pub seed: u64,
}

impl<T: Real> ScanGrid<T> {
    pub fn new(points: Vec<Point<T>>, seed: u64) -> Self {
        Self { points, random_planes: DEFAULT_RANDOM_PLANES, seed }
    }

    /// Tensor-product grid from per-axis `(lo, hi, count)` ranges.
    pub fn from_axes(axes: &[(T, T, usize)], random_planes: usize, seed: u64) -> Self {
        let mut points = vec![Vec::new()];
        for &(lo, hi, count) in axes {
            let values = linspace(lo, hi, count);
            points = points
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        Self { points: points.into_iter().map(Point::new).collect(), random_planes, seed }
    }
}

pub fn linspace<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / T::from_usize_lossy(count - 1);
            (0..count).map(|i| if i + 1 == count { hi } else { lo + step * T::from_usize_lossy(i) }).collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneLabel {
    Coordinate(usize, usize),
    Random(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneSample<T> {
    pub point_index: usize,
    pub label: PlaneLabel,
    pub u: Vec<T>,
    pub v: Vec<T>,
    pub kappa: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoordinatePlaneExtrema<T> {
    pub axes: (usize, usize),
    pub min: T,
    pub max: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureRange<T> {
    pub min: PlaneSample<T>,
    pub max: PlaneSample<T>,
    pub argmin_point: Point<T>,
    pub argmax_point: Point<T>,
    pub n_planes: usize,
    pub coordinate_extrema: Vec<CoordinatePlaneExtrema<T>>,
}

/// Per-point sectional curvatures of all coordinate planes followed by the
/// seeded random planes.
pub fn point_planes<T: Real>(
    model: &MetricModel<T>,
    point_index: usize,
    p: &Point<T>,
    random_planes: usize,
    seed: u64,
) -> Result<Vec<PlaneSample<T>>> {
    let riemann = model.riemann_at(p)?;
    let n = p.dim();
    let mut out = Vec::with_capacity(n * (n - 1) / 2 + random_planes);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut u = vec![T::zero(); n];
            let mut v = vec![T::zero(); n];
            u[i] = T::one();
            v[j] = T::one();
            let kappa = riemann.sectional(&u, &v)?;
            out.push(PlaneSample { point_index, label: PlaneLabel::Coordinate(i, j), u, v, kappa });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(point_index as u64);
    let mut drawn = 0;
    while drawn < random_planes {
        let u: Vec<T> = (0..n).map(|_| T::lit(rng.random_range(-1.0..1.0))).collect();
        let v: Vec<T> = (0..n).map(|_| T::lit(rng.random_range(-1.0..1.0))).collect();
        match riemann.sectional(&u, &v) {
            Ok(kappa) => {
                out.push(PlaneSample { point_index, label: PlaneLabel::Random(drawn), u, v, kappa });
                drawn += 1;
            }
            Err(GeomError::DegeneratePlane(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Extremes of sectional curvature over a grid of points and planes.
pub fn curvature_range_scan<T: Real>(
    model: &MetricModel<T>,
    grid: &ScanGrid<T>,
    workers: usize,
) -> Result<CurvatureRange<T>> {
    if grid.points.is_empty() {
        return Err(GeomError::InvalidArgument("empty curvature grid".into()));
    }
    let per_point = map_ordered(&grid.points, workers, |i, p| point_planes(model, i, p, grid.random_planes, grid.seed));
    let mut min: Option<PlaneSample<T>> = None;
    let mut max: Option<PlaneSample<T>> = None;
    let mut n_planes = 0;
    let mut coordinate: Vec<CoordinatePlaneExtrema<T>> = Vec::new();
    for samples in per_point {
        for s in samples? {
            n_planes += 1;
            if !s.kappa.is_finite() {
                return Err(GeomError::Numerical(format!("non-finite curvature at point {}", s.point_index)));
            }
            if let PlaneLabel::Coordinate(i, j) = s.label {
                match coordinate.iter_mut().find(|c| c.axes == (i, j)) {
                    Some(c) => {
                        c.min = c.min.min(s.kappa);
                        c.max = c.max.max(s.kappa);
                    }
                    None => coordinate.push(CoordinatePlaneExtrema { axes: (i, j), min: s.kappa, max: s.kappa }),
                }
            }
            if min.as_ref().is_none_or(|m| s.kappa < m.kappa) {
                min = Some(s.clone());
            }
            if max.as_ref().is_none_or(|m| s.kappa > m.kappa) {
                max = Some(s);
            }
        }
    }
    let min = min.expect("nonempty grid");
    let max = max.expect("nonempty grid");
    Ok(CurvatureRange {
        argmin_point: grid.points[min.point_index].clone(),
        argmax_point: grid.points[max.point_index].clone(),
        min,
        max,
        n_planes,
        coordinate_extrema: coordinate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SmoothFunction1D;

    #[test]
    fn hyperbolic_cone_scan_is_constant() {
        let m = MetricModel::cone_chart(1, SmoothFunction1D::Sinh, 10.0_f64);
        let grid = ScanGrid::from_axes(&[(0.05, 6.0, 30), (0.0, 1.0, 2), (0.0, 0.0, 1)], 8, 1);
        let range = curvature_range_scan(&m, &grid, 2).unwrap();
        assert!((range.min.kappa + 1.0).abs() < 1e-8);
        assert!((range.max.kappa + 1.0).abs() < 1e-8);
        assert_eq!(range.n_planes, 60 * (3 + 8));
    }

    #[test]
    fn constant_curvature_scan_in_dimension_four() {
        let m = MetricModel::upper_half_space(4, 1.3_f64);
        let grid = ScanGrid::from_axes(&[(-1.0, 1.0, 3), (0.0, 0.0, 1), (0.5, 0.5, 1), (0.2, 5.0, 5)], 8, 9);
        let range = curvature_range_scan(&m, &grid, 0).unwrap();
        assert!((range.min.kappa + 1.69).abs() < 1e-8);
        assert!((range.max.kappa + 1.69).abs() < 1e-8);
        assert_eq!(range.coordinate_extrema.len(), 6);
    }

    #[test]
    fn scan_is_deterministic_across_worker_counts() {
        let m = MetricModel::warped_hyperbolic(2, 1.0);
        let grid = ScanGrid::from_axes(&[(-1.0, 1.0, 4), (0.5, 2.0, 3), (-1.0, 1.0, 3)], 8, 42);
        let a = curvature_range_scan(&m, &grid, 1).unwrap();
        let b = curvature_range_scan(&m, &grid, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_grid_is_an_error() {
        let m = MetricModel::upper_half_space(2, 1.0);
        let grid: ScanGrid<f64> = ScanGrid::new(Vec::new(), 0);
        assert!(curvature_range_scan(&m, &grid, 1).is_err());
    }
}
