//! Finite-difference fallback for Christoffel symbols and curvature.
//!
//! Uses only `metric_diag_unchecked` (the metric values), never the analytic
//! jet, so it serves as an independent check of the closed-form path.

use crate::error::Result;
use crate::geometry::model::{christoffel_from_full, Christoffel, MetricModel};
use crate::linalg::Mat;
use crate::scalar::Real;

/// Centered step used by the Christoffel fallback.
pub const CHRISTOFFEL_STEP: f64 = 1e-5;

fn step<T: Real>(h: T, xi: T) -> T {
    h * xi.abs().max(T::lit(0.1))
}

fn metric_full<T: Real>(model: &MetricModel<T>, x: &[T]) -> Mat<T> {
    Mat::from_diag(&model.metric_diag_unchecked(x))
}

/// Christoffel symbols from centered differences of the metric.
pub fn christoffel_fd<T: Real>(model: &MetricModel<T>, x: &[T], h: T) -> Result<Christoffel<T>> {
    let n = x.len();
    let g = metric_full(model, x);
    let g_inv = g.inverse()?;
    let mut dg = Vec::with_capacity(n);
    for i in 0..n {
        let hi = step(h, x[i]);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] = xp[i] + hi;
        xm[i] = xm[i] - hi;
        let gp = metric_full(model, &xp);
        let gm = metric_full(model, &xm);
        dg.push(gp.sub(&gm).scale(T::one() / (T::lit(2.0) * hi)));
    }
    Ok(christoffel_from_full(&g_inv, &dg))
}

/// Curvature endomorphism `R^l_{ijk}` (so that `R(∂_i, ∂_j)∂_k = R^l_{ijk} ∂_l`)
/// from centered differences of finite-difference Christoffel symbols.
#[derive(Debug, Clone)]
pub struct FdCurvature<T> {
    pub dim: usize,
    pub metric: Mat<T>,
    data: Vec<T>,
}

impl<T: Real> FdCurvature<T> {
    #[inline]
    fn get(&self, l: usize, i: usize, j: usize, k: usize) -> T {
        self.data[((l * self.dim + i) * self.dim + j) * self.dim + k]
    }

    /// `⟨R(u, v) v, u⟩ / (|u|²|v|² − ⟨u,v⟩²)`.
    pub fn sectional(&self, u: &[T], v: &[T]) -> T {
        let n = self.dim;
        let mut rvec = vec![T::zero(); n];
        for (l, out) in rvec.iter_mut().enumerate() {
            let mut s = T::zero();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        s = s + self.get(l, i, j, k) * u[i] * v[j] * v[k];
                    }
                }
            }
            *out = s;
        }
        let ip = |a: &[T], b: &[T]| crate::scalar::dot(a, &self.metric.matvec(b));
        let gram = ip(u, u) * ip(v, v) - ip(u, v) * ip(u, v);
        ip(&rvec, u) / gram
    }
}

/// Default outer and inner steps tuned for `f64`.
pub fn riemann_fd<T: Real>(model: &MetricModel<T>, x: &[T]) -> Result<FdCurvature<T>> {
    riemann_fd_with_steps(model, x, T::lit(2e-4), T::lit(2e-5))
}

pub fn riemann_fd_with_steps<T: Real>(model: &MetricModel<T>, x: &[T], outer: T, inner: T) -> Result<FdCurvature<T>> {
    let n = x.len();
    let gamma = christoffel_fd(model, x, inner)?;
    let mut dgamma: Vec<Christoffel<T>> = Vec::with_capacity(n);
    for i in 0..n {
        let hi = step(outer, x[i]);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] = xp[i] + hi;
        xm[i] = xm[i] - hi;
        let gp = christoffel_fd(model, &xp, inner)?;
        let gm = christoffel_fd(model, &xm, inner)?;
        let mut d = Christoffel::zeros(n);
        for l in 0..n {
            for a in 0..n {
                for b in 0..n {
                    d.set(l, a, b, (gp.get(l, a, b) - gm.get(l, a, b)) / (T::lit(2.0) * hi));
                }
            }
        }
        dgamma.push(d);
    }
    let mut data = vec![T::zero(); n * n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut s = dgamma[i].get(l, j, k) - dgamma[j].get(l, i, k);
                    for m in 0..n {
                        s = s + gamma.get(l, i, m) * gamma.get(m, j, k) - gamma.get(l, j, m) * gamma.get(m, i, k);
                    }
                    data[((l * n + i) * n + j) * n + k] = s;
                }
            }
        }
    }
    Ok(FdCurvature { dim: n, metric: metric_full(model, x), data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SmoothFunction1D;
    use crate::gtmetric::{build_sigma, SmoothingSpec, TransitionProfile};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type PointSampler = Box<dyn Fn(&mut ChaCha8Rng) -> Vec<f64>>;

    fn models() -> Vec<(MetricModel<f64>, PointSampler)> {
        let spec = SmoothingSpec::new(2, 1.0, 6.0, TransitionProfile::LinearQuintic).unwrap();
        let sigma = build_sigma(&spec).unwrap();
        vec![
            (
                MetricModel::upper_half_space(3, 1.3),
                Box::new(|rng: &mut ChaCha8Rng| {
                    vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.3..3.0)]
                }),
            ),
            (
                MetricModel::warped_hyperbolic(2, 1.0),
                Box::new(|rng: &mut ChaCha8Rng| {
                    vec![rng.random_range(-1.0..1.0), rng.random_range(0.3..3.0), rng.random_range(-2.0..2.0)]
                }),
            ),
            (
                MetricModel::cone_chart(1, sigma.clone(), 20.0),
                Box::new(|rng: &mut ChaCha8Rng| {
                    vec![rng.random_range(0.2..7.0), rng.random_range(0.0..6.0), rng.random_range(-1.0..1.0)]
                }),
            ),
            (
                MetricModel::cone_chart(2, sigma, 20.0).rescaled(0.9),
                Box::new(|rng: &mut ChaCha8Rng| {
                    vec![
                        rng.random_range(0.2..7.0),
                        rng.random_range(0.0..6.0),
                        rng.random_range(-1.0..1.0),
                        rng.random_range(0.5..2.0),
                    ]
                }),
            ),
            (
                MetricModel::cone_chart(1, SmoothFunction1D::Sinh, 20.0),
                Box::new(|rng: &mut ChaCha8Rng| {
                    vec![rng.random_range(0.2..5.0), rng.random_range(0.0..6.0), rng.random_range(-1.0..1.0)]
                }),
            ),
        ]
    }

    #[test]
    fn christoffel_fallback_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (model, sample) in models() {
            for _ in 0..20 {
                let x = sample(&mut rng);
                let exact = model.christoffel_unchecked(&x);
                let fd = christoffel_fd(&model, &x, CHRISTOFFEL_STEP).unwrap();
                let n = x.len();
                for k in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            let (a, b) = (exact.get(k, i, j), fd.get(k, i, j));
                            assert!(
                                (a - b).abs() <= 1e-6 * a.abs().max(1.0),
                                "{model:?} {x:?} Γ^{k}_{i}{j}: {a} vs {b}"
                            );
                        }
                    }
                }
            }
        }
    }

    /// Closed-form sectional curvature agrees with the finite-difference
    /// curvature at 100 random points and planes per model.
    #[test]
    fn sectional_curvature_matches_fd_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (model, sample) in models() {
            for _ in 0..100 {
                let x = sample(&mut rng);
                let n = x.len();
                let u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let exact = model.riemann_unchecked(&x).unwrap().sectional(&u, &v).unwrap();
                let oracle = riemann_fd(&model, &x).unwrap().sectional(&u, &v);
                assert!((exact - oracle).abs() <= 1e-4 * exact.abs(), "{model:?} at {x:?}: {exact} vs {oracle}");
            }
        }
    }
}
