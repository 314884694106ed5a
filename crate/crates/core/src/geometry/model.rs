//! Metric models on global coordinate charts.
//!
//! Every model here has a diagonal metric tensor whose entries are products
//! of one-variable functions, so the metric and its first two derivatives are
//! available in closed form. Curvature is assembled from that jet.

use crate::error::{GeomError, Result};
use crate::geometry::point::{Point, TangentVector};
use crate::geometry::smooth::{Jet1, SmoothFunction1D};
use crate::linalg::Mat;
use crate::scalar::Real;

/// Default inner radius of the cone chart; the axis `r = 0` is excluded.
pub const DEFAULT_R_EPS: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub enum MetricModel<T> {
    /// Upper half-space of dimension `dim` with the hyperbolic metric scaled
    /// by `1/b²`; sectional curvature `-b²`. The last coordinate is the height.
    UpperHalfSpace { dim: usize, b: T },
    /// `warp(t)² · g_base + dt²` in coordinates `(q, t)`; `t` is last.
    WarpedSlice { base: Box<MetricModel<T>>, warp: SmoothFunction1D<T> },
    /// `dr² + σ(r)² dθ² + cosh²(r) h` in coordinates `(r, θ, x)`, where `h` is
    /// the metric of the hyperbolic fiber of dimension `fiber_dim` (a line for
    /// `fiber_dim = 1`, an upper half-space chart otherwise).
    ConeChart { fiber_dim: usize, sigma: SmoothFunction1D<T>, r_max: T, r_eps: T },
    /// `lambda² · g_inner`; curvature scales by `1/lambda²`.
    Rescaled { inner: Box<MetricModel<T>>, lambda: T },
    /// Constant diagonal metric (flat test double).
    ConstantDiagonal { diag: Vec<T> },
}

/// Diagonal metric entries with their first and, optionally, second partial
/// derivatives: `dg(k, i) = ∂_i g_kk`, `ddg(k, i, j) = ∂_i ∂_j g_kk`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagJet<T> {
    pub g: Vec<T>,
    dg: Vec<T>,
    /// Empty for first-order jets.
    ddg: Vec<T>,
}

impl<T: Real> DiagJet<T> {
    fn zeros(n: usize, second_order: bool) -> Self {
        Self {
            g: vec![T::zero(); n],
            dg: vec![T::zero(); n * n],
            ddg: if second_order { vec![T::zero(); n * n * n] } else { Vec::new() },
        }
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn has_second_order(&self) -> bool {
        !self.ddg.is_empty()
    }

    #[inline]
    pub fn dg(&self, k: usize, i: usize) -> T {
        self.dg[k * self.g.len() + i]
    }

    /// Second derivative; zero for first-order jets.
    #[inline]
    pub fn ddg(&self, k: usize, i: usize, j: usize) -> T {
        let n = self.g.len();
        self.ddg.get((k * n + i) * n + j).copied().unwrap_or_else(T::zero)
    }

    fn set_dg(&mut self, k: usize, i: usize, v: T) {
        let n = self.g.len();
        self.dg[k * n + i] = v;
    }

    fn set_ddg(&mut self, k: usize, i: usize, j: usize, v: T) {
        let n = self.g.len();
        if let Some(slot) = self.ddg.get_mut((k * n + i) * n + j) {
            *slot = v;
        }
    }

    fn scaled(mut self, s: T) -> Self {
        for c in self.g.iter_mut().chain(self.dg.iter_mut()).chain(self.ddg.iter_mut()) {
            *c = *c * s;
        }
        self
    }

    /// Copies `block` (a jet in its own coordinates) into `self` at
    /// coordinate `offset`, multiplied by the squared warp `w(x_var)²`.
    fn insert_warped(&mut self, block: &DiagJet<T>, offset: usize, var: usize, w: Jet1<T>) {
        let a = w.f * w.f;
        let da = T::lit(2.0) * w.f * w.df;
        let dda = T::lit(2.0) * (w.df * w.df + w.f * w.d2f);
        let m = block.g.len();
        for kb in 0..m {
            let k = offset + kb;
            self.g[k] = a * block.g[kb];
            for ib in 0..m {
                self.set_dg(k, offset + ib, a * block.dg(kb, ib));
                for jb in 0..m {
                    self.set_ddg(k, offset + ib, offset + jb, a * block.ddg(kb, ib, jb));
                }
                self.set_ddg(k, offset + ib, var, da * block.dg(kb, ib));
                self.set_ddg(k, var, offset + ib, da * block.dg(kb, ib));
            }
            self.set_dg(k, var, da * block.g[kb]);
            self.set_ddg(k, var, var, dda * block.g[kb]);
        }
    }

    /// Christoffel symbols from the diagonal-metric formula.
    pub fn christoffel(&self) -> Christoffel<T> {
        christoffel_from_diag(self)
    }

    /// The jet as full matrices; second derivatives are zero for
    /// first-order jets.
    pub fn to_full(&self) -> MetricJet<T> {
        let n = self.g.len();
        let g = Mat::from_diag(&self.g);
        let dg = (0..n).map(|i| Mat::from_diag(&(0..n).map(|k| self.dg(k, i)).collect::<Vec<_>>())).collect();
        let ddg = (0..n)
            .map(|i| (0..n).map(|j| Mat::from_diag(&(0..n).map(|k| self.ddg(k, i, j)).collect::<Vec<_>>())).collect())
            .collect();
        MetricJet { g, dg, ddg }
    }
}

/// Full metric jet: `dg[i] = ∂_i g`, `ddg[i][j] = ∂_i ∂_j g`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJet<T> {
    pub g: Mat<T>,
    pub dg: Vec<Mat<T>>,
    pub ddg: Vec<Vec<Mat<T>>>,
}

/// Christoffel symbols of the second kind, `Γ^k_{ij}` at `[k][i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel<T> {
    pub dim: usize,
    data: Vec<T>,
}

impl<T: Real> Christoffel<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![T::zero(); dim * dim * dim] }
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> T {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, k: usize, i: usize, j: usize, value: T) {
        self.data[(k * self.dim + i) * self.dim + j] = value;
    }

    /// `Γ^k_{ij} a^i b^j` for every `k`.
    pub fn contract(&self, a: &[T], b: &[T]) -> Vec<T> {
        let n = self.dim;
        (0..n)
            .map(|k| {
                let mut s = T::zero();
                for i in 0..n {
                    if a[i] == T::zero() {
                        continue;
                    }
                    for j in 0..n {
                        s = s + self.get(k, i, j) * a[i] * b[j];
                    }
                }
                s
            })
            .collect()
    }

    /// Largest `|Γ^k_{ij} − Γ^k_{ji}|`.
    pub fn lower_asymmetry(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        worst
    }
}

impl<T: Real> MetricModel<T> {
    pub fn upper_half_space(dim: usize, b: T) -> Self {
        Self::UpperHalfSpace { dim, b }
    }

    /// Hyperbolic space of curvature `-b²` written as `cosh²(bt) g_base + dt²`
    /// over a totally geodesic hyperplane of dimension `base_dim`.
    pub fn warped_hyperbolic(base_dim: usize, b: T) -> Self {
        Self::WarpedSlice {
            base: Box::new(Self::UpperHalfSpace { dim: base_dim, b }),
            warp: SmoothFunction1D::Cosh { rate: b },
        }
    }

    pub fn cone_chart(fiber_dim: usize, sigma: SmoothFunction1D<T>, r_max: T) -> Self {
        Self::ConeChart { fiber_dim, sigma, r_max, r_eps: T::lit(DEFAULT_R_EPS) }
    }

    pub fn rescaled(self, lambda: T) -> Self {
        Self::Rescaled { inner: Box::new(self), lambda }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::UpperHalfSpace { dim, .. } => *dim,
            Self::WarpedSlice { base, .. } => base.dim() + 1,
            Self::ConeChart { fiber_dim, .. } => fiber_dim + 2,
            Self::Rescaled { inner, .. } => inner.dim(),
            Self::ConstantDiagonal { diag } => diag.len(),
        }
    }

    /// The model with any outer rescaling removed, and the total scale.
    pub fn unscaled(&self) -> (&MetricModel<T>, T) {
        match self {
            Self::Rescaled { inner, lambda } => {
                let (m, s) = inner.unscaled();
                (m, s * *lambda)
            }
            other => (other, T::one()),
        }
    }

    /// Validates the model parameters themselves.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::UpperHalfSpace { dim, b } => {
                if *dim < 2 {
                    return Err(GeomError::InvalidArgument("upper half-space needs dim >= 2".into()));
                }
                if !(*b > T::zero()) {
                    return Err(GeomError::InvalidArgument("curvature scale b must be positive".into()));
                }
                Ok(())
            }
            Self::WarpedSlice { base, .. } => match base.as_ref() {
                Self::UpperHalfSpace { .. } => base.validate(),
                _ => Err(GeomError::InvalidArgument("warped slice base must be a constant-curvature model".into())),
            },
            Self::ConeChart { fiber_dim, r_max, r_eps, .. } => {
                if *fiber_dim < 1 {
                    return Err(GeomError::InvalidArgument("cone fiber dimension must be >= 1".into()));
                }
                if !(*r_eps > T::zero() && r_max > r_eps) {
                    return Err(GeomError::InvalidArgument("cone chart needs 0 < r_eps < r_max".into()));
                }
                Ok(())
            }
            Self::Rescaled { inner, lambda } => {
                if !(*lambda > T::zero()) {
                    return Err(GeomError::InvalidArgument("rescaling factor must be positive".into()));
                }
                inner.validate()
            }
            Self::ConstantDiagonal { diag } => {
                if diag.iter().all(|&d| d > T::zero()) {
                    Ok(())
                } else {
                    Err(GeomError::InvalidArgument("constant metric must be positive".into()))
                }
            }
        }
    }

    /// Checks dimension and domain of a coordinate vector.
    pub fn check_coords(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(GeomError::Dimension { expected: self.dim(), got: x.len() });
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(GeomError::Domain(format!("non-finite coordinates {x:?}")));
        }
        if self.in_domain(x) {
            Ok(())
        } else {
            Err(GeomError::Domain(format!("{x:?}")))
        }
    }

    pub fn check(&self, p: &Point<T>) -> Result<()> {
        self.check_coords(&p.coords)
    }

    /// Domain predicate without dimension checks.
    pub fn in_domain(&self, x: &[T]) -> bool {
        match self {
            Self::UpperHalfSpace { .. } => x[x.len() - 1] > T::zero(),
            Self::WarpedSlice { base, .. } => base.in_domain(&x[..x.len() - 1]),
            Self::ConeChart { fiber_dim, r_max, r_eps, .. } => {
                let r = x[0];
                let fiber_ok = *fiber_dim == 1 || x[x.len() - 1] > T::zero();
                r >= *r_eps && r <= *r_max && fiber_ok
            }
            Self::Rescaled { inner, .. } => inner.in_domain(x),
            Self::ConstantDiagonal { .. } => true,
        }
    }

    /// Closed-form diagonal metric jet to second order. No domain check.
    pub fn diag_jet_unchecked(&self, x: &[T]) -> DiagJet<T> {
        self.jet_of_order(x, true)
    }

    /// Metric entries and first derivatives only, enough for Christoffel
    /// symbols. No domain check.
    pub fn diag_jet1_unchecked(&self, x: &[T]) -> DiagJet<T> {
        self.jet_of_order(x, false)
    }

    fn jet_of_order(&self, x: &[T], second: bool) -> DiagJet<T> {
        let n = x.len();
        match self {
            Self::UpperHalfSpace { b, .. } => {
                let y = x[n - 1];
                let inv = T::one() / (*b * *b * y * y);
                let d1 = -T::lit(2.0) * inv / y;
                let d2 = T::lit(6.0) * inv / (y * y);
                let mut jet = DiagJet::zeros(n, second);
                for k in 0..n {
                    jet.g[k] = inv;
                    jet.set_dg(k, n - 1, d1);
                    jet.set_ddg(k, n - 1, n - 1, d2);
                }
                jet
            }
            Self::WarpedSlice { base, warp } => {
                let base_jet = base.jet_of_order(&x[..n - 1], second);
                let mut jet = DiagJet::zeros(n, second);
                jet.insert_warped(&base_jet, 0, n - 1, warp.jet(x[n - 1]));
                jet.g[n - 1] = T::one();
                jet
            }
            Self::ConeChart { fiber_dim, sigma, .. } => {
                let r = x[0];
                let s = sigma.jet(r);
                let mut jet = DiagJet::zeros(n, second);
                jet.g[0] = T::one();
                jet.g[1] = s.f * s.f;
                jet.set_dg(1, 0, T::lit(2.0) * s.f * s.df);
                jet.set_ddg(1, 0, 0, T::lit(2.0) * (s.df * s.df + s.f * s.d2f));
                let fiber_jet = if *fiber_dim == 1 {
                    let mut flat = DiagJet::zeros(1, second);
                    flat.g[0] = T::one();
                    flat
                } else {
                    MetricModel::UpperHalfSpace { dim: *fiber_dim, b: T::one() }.jet_of_order(&x[2..], second)
                };
                jet.insert_warped(&fiber_jet, 2, 0, SmoothFunction1D::cosh().jet(r));
                jet
            }
            Self::Rescaled { inner, lambda } => inner.jet_of_order(x, second).scaled(*lambda * *lambda),
            Self::ConstantDiagonal { diag } => {
                let mut jet = DiagJet::zeros(n, second);
                jet.g.clone_from(diag);
                jet
            }
        }
    }

    pub fn diag_jet(&self, p: &Point<T>) -> Result<DiagJet<T>> {
        self.check(p)?;
        Ok(self.diag_jet_unchecked(&p.coords))
    }

    /// Diagonal metric entries without the derivative jet.
    pub fn metric_diag_unchecked(&self, x: &[T]) -> Vec<T> {
        let n = x.len();
        match self {
            Self::UpperHalfSpace { b, .. } => {
                let y = x[n - 1];
                vec![T::one() / (*b * *b * y * y); n]
            }
            Self::WarpedSlice { base, warp } => {
                let w = warp.value(x[n - 1]);
                let mut g: Vec<T> = base.metric_diag_unchecked(&x[..n - 1]).into_iter().map(|v| v * w * w).collect();
                g.push(T::one());
                g
            }
            Self::ConeChart { fiber_dim, sigma, .. } => {
                let r = x[0];
                let s = sigma.value(r);
                let c2 = r.cosh() * r.cosh();
                let h = if *fiber_dim == 1 {
                    T::one()
                } else {
                    let y = x[n - 1];
                    T::one() / (y * y)
                };
                let mut g = vec![T::one(), s * s];
                g.extend(std::iter::repeat_n(c2 * h, *fiber_dim));
                g
            }
            Self::Rescaled { inner, lambda } => {
                inner.metric_diag_unchecked(x).into_iter().map(|v| v * *lambda * *lambda).collect()
            }
            Self::ConstantDiagonal { diag } => diag.clone(),
        }
    }

    /// Metric tensor in the chart basis.
    pub fn metric_at(&self, p: &Point<T>) -> Result<Mat<T>> {
        self.check(p)?;
        let g = self.metric_diag_unchecked(&p.coords);
        if g.iter().any(|&v| !(v > T::zero()) || !v.is_finite()) {
            return Err(GeomError::Numerical(format!("metric not positive definite at {:?}", p.coords)));
        }
        Ok(Mat::from_diag(&g))
    }

    /// Closed-form Christoffel symbols from the diagonal-metric formula
    /// `Γ^k_{ij} = (δ_kj ∂_i g_kk + δ_ki ∂_j g_kk − δ_ij ∂_k g_ii) / (2 g_kk)`.
    pub fn christoffel_unchecked(&self, x: &[T]) -> Christoffel<T> {
        let jet = self.diag_jet1_unchecked(x);
        christoffel_from_diag(&jet)
    }

    pub fn christoffel_at(&self, p: &Point<T>) -> Result<Christoffel<T>> {
        self.check(p)?;
        Ok(self.christoffel_unchecked(&p.coords))
    }

    /// `⟨u, v⟩` at chart coordinates `x`.
    pub fn inner_unchecked(&self, x: &[T], u: &[T], v: &[T]) -> T {
        let g = self.metric_diag_unchecked(x);
        g.iter().zip(u).zip(v).map(|((&gk, &a), &b)| gk * a * b).sum()
    }

    pub fn norm_unchecked(&self, x: &[T], u: &[T]) -> T {
        self.inner_unchecked(x, u, u).max(T::zero()).sqrt()
    }

    pub fn inner(&self, p: &Point<T>, u: &[T], v: &[T]) -> Result<T> {
        self.check(p)?;
        if u.len() != p.dim() || v.len() != p.dim() {
            return Err(GeomError::Dimension { expected: p.dim(), got: u.len().min(v.len()) });
        }
        Ok(self.inner_unchecked(&p.coords, u, v))
    }

    pub fn norm(&self, w: &TangentVector<T>) -> Result<T> {
        Ok(self.inner(&w.base, &w.components, &w.components)?.max(T::zero()).sqrt())
    }

    /// Orthonormal frame at `x` whose first vector is `lead / |lead|`,
    /// completed by Gram-Schmidt on the coordinate basis.
    pub fn orthonormal_frame_unchecked(&self, x: &[T], lead: &[T]) -> Result<Vec<Vec<T>>> {
        let n = x.len();
        let g = self.metric_diag_unchecked(x);
        let ip = |a: &[T], b: &[T]| -> T { g.iter().zip(a).zip(b).map(|((&gk, &p), &q)| gk * p * q).sum() };
        let mut frame: Vec<Vec<T>> = Vec::with_capacity(n);
        let lead_norm = ip(lead, lead).sqrt();
        if !(lead_norm > T::zero()) {
            return Err(GeomError::InvalidArgument("frame lead vector is zero".into()));
        }
        frame.push(lead.iter().map(|&c| c / lead_norm).collect());
        // Coordinate axes ordered by how little they overlap the lead vector.
        let mut axes: Vec<usize> = (0..n).collect();
        let overlap = |k: usize| (frame[0][k] * g[k].sqrt()).abs();
        axes.sort_by(|&a, &b| overlap(a).partial_cmp(&overlap(b)).unwrap());
        for k in axes {
            if frame.len() == n {
                break;
            }
            let mut e = vec![T::zero(); n];
            e[k] = T::one();
            for _ in 0..2 {
                for f in &frame {
                    let c = ip(&e, f);
                    for (ei, &fi) in e.iter_mut().zip(f) {
                        *ei = *ei - c * fi;
                    }
                }
            }
            let nn = ip(&e, &e).sqrt();
            if nn > T::lit(1e-8) * g[k].sqrt() {
                frame.push(e.iter().map(|&c| c / nn).collect());
            }
        }
        if frame.len() != n {
            return Err(GeomError::Numerical("could not complete orthonormal frame".into()));
        }
        Ok(frame)
    }
}

pub(crate) fn christoffel_from_diag<T: Real>(jet: &DiagJet<T>) -> Christoffel<T> {
    let n = jet.g.len();
    let half = T::lit(0.5);
    let mut gamma = Christoffel::zeros(n);
    for k in 0..n {
        let inv = half / jet.g[k];
        for i in 0..n {
            // Γ^k_{ki} = Γ^k_{ik} = ∂_i g_kk / (2 g_kk)
            let v = jet.dg(k, i) * inv;
            gamma.set(k, k, i, v);
            gamma.set(k, i, k, v);
        }
        for i in 0..n {
            if i != k {
                // Γ^k_{ii} = −∂_k g_ii / (2 g_kk)
                gamma.set(k, i, i, -jet.dg(i, k) * inv);
            }
        }
    }
    gamma
}

/// General Christoffel symbols from a full metric jet.
pub(crate) fn christoffel_from_full<T: Real>(g_inv: &Mat<T>, dg: &[Mat<T>]) -> Christoffel<T> {
    let n = g_inv.rows();
    let half = T::lit(0.5);
    let mut gamma = Christoffel::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = T::zero();
                for m in 0..n {
                    s = s + g_inv[(k, m)] * (dg[i][(m, j)] + dg[j][(m, i)] - dg[m][(i, j)]);
                }
                gamma.set(k, i, j, half * s);
            }
        }
    }
    gamma
}
