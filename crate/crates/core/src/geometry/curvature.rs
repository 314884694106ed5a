//! Riemann tensor assembly and sectional curvature.

use crate::error::{GeomError, Result};
use crate::geometry::model::{christoffel_from_full, MetricJet, MetricModel};
use crate::geometry::point::TangentPlane;
use crate::linalg::Mat;
use crate::scalar::Real;

/// Planes whose normalized Gram determinant falls below this are rejected.
pub const DEGENERATE_PLANE_TOL: f64 = 1e-12;

/// Fully covariant curvature tensor `R_{iklm} = ⟨R(∂_l, ∂_m) ∂_k, ∂_i⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannTensor<T> {
    pub dim: usize,
    pub metric: Mat<T>,
    data: Vec<T>,
}

impl<T: Real> RiemannTensor<T> {
    #[inline]
    fn idx(&self, i: usize, k: usize, l: usize, m: usize) -> usize {
        ((i * self.dim + k) * self.dim + l) * self.dim + m
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize, l: usize, m: usize) -> T {
        self.data[self.idx(i, k, l, m)]
    }

    /// `R_{iklm} a^i b^k c^l d^m`.
    pub fn form(&self, a: &[T], b: &[T], c: &[T], d: &[T]) -> T {
        let n = self.dim;
        let mut s = T::zero();
        for i in 0..n {
            if a[i] == T::zero() {
                continue;
            }
            for k in 0..n {
                if b[k] == T::zero() {
                    continue;
                }
                for l in 0..n {
                    if c[l] == T::zero() {
                        continue;
                    }
                    let abc = a[i] * b[k] * c[l];
                    for m in 0..n {
                        s = s + self.get(i, k, l, m) * abc * d[m];
                    }
                }
            }
        }
        s
    }

    /// `⟨R(u, v) v, u⟩`, the numerator of the sectional curvature.
    pub fn sectional_numerator(&self, u: &[T], v: &[T]) -> T {
        self.form(u, v, u, v)
    }

    /// Sectional curvature of the plane spanned by `u` and `v`.
    pub fn sectional(&self, u: &[T], v: &[T]) -> Result<T> {
        let uu = quad(&self.metric, u, u);
        let vv = quad(&self.metric, v, v);
        let uv = quad(&self.metric, u, v);
        let gram = uu * vv - uv * uv;
        let scale = uu * vv;
        if !(scale > T::zero()) || !(gram / scale > T::lit(DEGENERATE_PLANE_TOL)) {
            let normalized = if scale > T::zero() { (gram / scale).to_f64_lossy() } else { 0.0 };
            return Err(GeomError::DegeneratePlane(normalized));
        }
        Ok(self.sectional_numerator(u, v) / gram)
    }

    /// Symmetric matrix `M_ab = ⟨R(e_a, w) w, e_b⟩` for the given vectors.
    pub fn jacobi_operator(&self, frame: &[Vec<T>], w: &[T]) -> Mat<T> {
        let m = frame.len();
        let mut out = Mat::zeros(m, m);
        for a in 0..m {
            for b in a..m {
                let v = self.form(&frame[a], w, &frame[b], w);
                out[(a, b)] = v;
                out[(b, a)] = v;
            }
        }
        out
    }
}

fn quad<T: Real>(g: &Mat<T>, u: &[T], v: &[T]) -> T {
    crate::scalar::dot(u, &g.matvec(v))
}

/// Assembles the covariant Riemann tensor from a full metric jet:
/// `R_{iklm} = ½(∂_k∂_l g_im + ∂_i∂_m g_kl − ∂_k∂_m g_il − ∂_i∂_l g_km)
///           + g_np (Γ^n_kl Γ^p_im − Γ^n_km Γ^p_il)`.
pub fn riemann_from_jet<T: Real>(jet: &MetricJet<T>) -> Result<RiemannTensor<T>> {
    let n = jet.g.rows();
    let g_inv = jet.g.inverse()?;
    let gamma = christoffel_from_full(&g_inv, &jet.dg);
    let half = T::lit(0.5);
    let mut data = vec![T::zero(); n * n * n * n];
    for i in 0..n {
        for k in 0..n {
            for l in 0..n {
                for m in 0..n {
                    let second = half
                        * (jet.ddg[k][l][(i, m)] + jet.ddg[i][m][(k, l)]
                            - jet.ddg[k][m][(i, l)]
                            - jet.ddg[i][l][(k, m)]);
                    let mut quadratic = T::zero();
                    for a in 0..n {
                        for b in 0..n {
                            let gab = jet.g[(a, b)];
                            if gab == T::zero() {
                                continue;
                            }
                            quadratic = quadratic
                                + gab
                                    * (gamma.get(a, k, l) * gamma.get(b, i, m)
                                        - gamma.get(a, k, m) * gamma.get(b, i, l));
                        }
                    }
                    data[((i * n + k) * n + l) * n + m] = second + quadratic;
                }
            }
        }
    }
    Ok(RiemannTensor { dim: n, metric: jet.g.clone(), data })
}

impl<T: Real> MetricModel<T> {
    /// Riemann tensor from the closed-form metric jet, without domain check.
    pub fn riemann_unchecked(&self, x: &[T]) -> Result<RiemannTensor<T>> {
        riemann_from_jet(&self.diag_jet_unchecked(x).to_full())
    }

    pub fn riemann_at(&self, p: &crate::geometry::Point<T>) -> Result<RiemannTensor<T>> {
        self.check(p)?;
        self.riemann_unchecked(&p.coords)
    }

    /// `K(u, v) = ⟨R(u,v)v,u⟩ / (|u|²|v|² − ⟨u,v⟩²)`.
    pub fn sectional_curvature(&self, plane: &TangentPlane<T>) -> Result<T> {
        self.check(&plane.base)?;
        let n = self.dim();
        if plane.u.len() != n || plane.v.len() != n {
            return Err(GeomError::Dimension { expected: n, got: plane.u.len().min(plane.v.len()) });
        }
        self.riemann_unchecked(&plane.base.coords)?.sectional(&plane.u, &plane.v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point, SmoothFunction1D};

    #[test]
    fn upper_half_space_has_curvature_minus_b_squared() {
        for (dim, b) in [(2, 1.0_f64), (3, 1.0), (4, 1.3)] {
            let m = MetricModel::upper_half_space(dim, b);
            let mut x = vec![0.3; dim];
            x[dim - 1] = 0.7;
            let p = Point::new(x);
            for i in 0..dim {
                for j in (i + 1)..dim {
                    let k = m.sectional_curvature(&TangentPlane::coordinate(p.clone(), i, j)).unwrap();
                    assert!((k + b * b).abs() < 1e-12, "dim {dim} plane ({i},{j}): {k}");
                }
            }
        }
    }

    #[test]
    fn cone_chart_sinh_is_hyperbolic() {
        let m = MetricModel::cone_chart(1, SmoothFunction1D::Sinh, 10.0_f64);
        let p = Point::new(vec![1.0, 0.0, 0.0]);
        let k = m.sectional_curvature(&TangentPlane::coordinate(p, 0, 1)).unwrap();
        assert!((k + 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_plane_is_rejected() {
        let m = MetricModel::upper_half_space(3, 1.0);
        let p = Point::new(vec![0.0, 0.0, 1.0]);
        let plane = TangentPlane::new(p, vec![1.0, 2.0, 0.0], vec![2.0, 4.0, 0.0]);
        assert!(matches!(m.sectional_curvature(&plane), Err(GeomError::DegeneratePlane(_))));
    }

    #[test]
    fn riemann_tensor_symmetries() {
        let m = MetricModel::cone_chart(2, SmoothFunction1D::Sinh, 10.0_f64);
        let r = m.riemann_unchecked(&[1.2, 0.4, 0.1, 0.8]).unwrap();
        let n = r.dim;
        for i in 0..n {
            for k in 0..n {
                for l in 0..n {
                    for mm in 0..n {
                        let v = r.get(i, k, l, mm);
                        assert!((v + r.get(k, i, l, mm)).abs() < 1e-10);
                        assert!((v + r.get(i, k, mm, l)).abs() < 1e-10);
                        assert!((v - r.get(l, mm, i, k)).abs() < 1e-10);
                    }
                }
            }
        }
    }
}
