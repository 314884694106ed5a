//! Sampled distortion of the comparison maps `(q, t) ↦ (f(q), βt)`.
//!
//! `X` is a warped product `w(t)² g_Σ + dt²` over a totally geodesic slice
//! `Σ = {t = 0}` carrying an upper half-space metric, so `(q, t)` are Fermi
//! coordinates. For sampled pairs the module compares `d_X(p, p′)` with the
//! hyperbolic distance between the images under the comparison flow with
//! exponent `β` and with exponent 1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::batch::map_ordered;
use crate::comparison::bvp::{geodesic_distance_bvp_with, BvpOptions};
use crate::comparison::closed::{closed_form_distance, half_space_point_at, hyperbolic_distance, warped_distance};
use crate::error::{GeomError, Result};
use crate::flow::Hypersurface;
use crate::geometry::{MetricModel, Point};
use crate::scalar::Real;

/// Largest fraction of pairs that may fail before a scan is rejected.
pub const MAX_SKIPPED_FRACTION: f64 = 0.1;

/// Built-in bi-Lipschitz maps from the slice to the unit-curvature
/// half-space, all acting on upper half-space coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseMap<T> {
    Identity,
    /// `q ↦ λ q`, a hyperbolic isometry in these coordinates.
    Scaling {
        lambda: T,
    },
    /// `(x_0, …, y) ↦ (x_0 + a y, …, y)`; its differential is the same shear
    /// matrix at every point, so its distortion is that matrix's largest
    /// singular value.
    Shear {
        a: T,
    },
}

impl<T: Real> BaseMap<T> {
    pub fn apply(&self, q: &[T]) -> Result<Vec<T>> {
        match *self {
            Self::Identity => Ok(q.to_vec()),
            Self::Scaling { lambda } => {
                if !(lambda > T::zero()) {
                    return Err(GeomError::InvalidArgument("scaling factor must be positive".into()));
                }
                Ok(q.iter().map(|&c| c * lambda).collect())
            }
            Self::Shear { a } => {
                if q.len() < 2 {
                    return Err(GeomError::InvalidArgument("shear needs a horizontal coordinate".into()));
                }
                let mut out = q.to_vec();
                out[0] = out[0] + a * q[q.len() - 1];
                Ok(out)
            }
        }
    }

    /// Bi-Lipschitz constant with respect to the unit-curvature metric on
    /// both sides.
    pub fn hyperbolic_lipschitz(&self) -> T {
        match *self {
            Self::Identity | Self::Scaling { .. } => T::one(),
            Self::Shear { a } => (a.abs() + (a * a + T::lit(4.0)).sqrt()) * T::lit(0.5),
        }
    }
}

/// The comparison map `(q, t) ↦ (f(q), β t)` into Fermi coordinates of the
/// unit-curvature warped model.
pub fn flow_map_f<T: Real>(q: &[T], t: T, f: &BaseMap<T>, beta: T) -> Result<Point<T>> {
    let mut coords = f.apply(q)?;
    coords.push(beta * t);
    Ok(Point::new(coords))
}

/// Seeded sampler of Fermi-coordinate pairs: base points uniform in geodesic
/// radius (uniform direction) within `radius` of `(0, …, 0, 1)`, normal
/// coordinates uniform in `[−t_max, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSampler<T> {
    pub seed: u64,
    pub n_pairs: usize,
    pub radius: T,
    pub t_max: T,
}

impl<T: Real> Default for PairSampler<T> {
    fn default() -> Self {
        Self { seed: 0, n_pairs: 1000, radius: T::lit(3.0), t_max: T::lit(3.0) }
    }
}

impl<T: Real> PairSampler<T> {
    /// A base point at slice distance at most `radius`, for a slice whose
    /// metric is `scale²` times the unit-curvature one.
    fn base_point(&self, rng: &mut ChaCha8Rng, base_dim: usize, scale: T) -> Vec<T> {
        let dir: Vec<f64> = loop {
            let d: Vec<f64> = (0..base_dim).map(|_| rng.sample(StandardNormal)).collect();
            let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                break d.into_iter().map(|x| x / norm).collect();
            }
        };
        let r: f64 = rng.random_range(0.0..=1.0);
        let dir: Vec<T> = dir.into_iter().map(T::lit).collect();
        half_space_point_at(&dir, T::lit(r) * self.radius / scale)
    }

    fn fermi_point(&self, rng: &mut ChaCha8Rng, base_dim: usize, scale: T) -> Vec<T> {
        let mut p = self.base_point(rng, base_dim, scale);
        let u: f64 = rng.random_range(-1.0..=1.0);
        p.push(T::lit(u) * self.t_max);
        p
    }

    /// `n_pairs` pairs of Fermi points over a `base_dim`-dimensional slice.
    pub fn sample(&self, base_dim: usize, scale: T) -> Result<Vec<(Vec<T>, Vec<T>)>> {
        if base_dim < 1 || !(self.radius > T::zero()) || !(self.t_max >= T::zero()) || !(scale > T::zero()) {
            return Err(GeomError::InvalidArgument("pair sampler needs positive radius and scale".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        Ok((0..self.n_pairs)
            .map(|_| {
                let a = self.fermi_point(&mut rng, base_dim, scale);
                let b = self.fermi_point(&mut rng, base_dim, scale);
                (a, b)
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaOptions<T> {
    pub bvp: BvpOptions<T>,
    /// Worker threads (0 = machine parallelism).
    pub workers: usize,
}

impl<T: Real> Default for LemmaOptions<T> {
    fn default() -> Self {
        Self { bvp: BvpOptions::default(), workers: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionPair<T> {
    pub p: Vec<T>,
    pub p2: Vec<T>,
    pub d_x: T,
    /// Distance between the images under the exponent-`β` comparison map.
    pub d_h_beta: T,
    /// Distance between the images under the exponent-1 comparison map.
    pub d_h_1: T,
    /// `d_x / d_h_beta`, bounded above by the upper comparison inequality.
    pub ratio_upper: T,
    /// `d_x / d_h_1`, bounded below by the lower comparison inequality.
    pub ratio_lower: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionReport<T> {
    /// Largest `ratio_upper` over the evaluated pairs.
    pub c_upper: T,
    /// Smallest `ratio_lower` over the evaluated pairs.
    pub c_lower: T,
    pub n_pairs: usize,
    /// Index and error of each pair that could not be evaluated.
    pub skipped: Vec<(usize, GeomError)>,
    pub beta: T,
    /// Bi-Lipschitz constant of the base map between the slice and `ℍⁿ`.
    pub lipschitz: T,
    pub pairs: Vec<DistortionPair<T>>,
}

/// `d(p, q)` in closed form where available, otherwise by shooting.
pub fn model_distance<T: Real>(model: &MetricModel<T>, p: &Point<T>, q: &Point<T>, bvp: &BvpOptions<T>) -> Result<T> {
    match closed_form_distance(model, p, q) {
        Some(d) => d,
        None => geodesic_distance_bvp_with(model, p, q, bvp).map(|r| r.distance),
    }
}

/// Curvature scale `b` of the half-space slice of a warped model.
fn slice_scale<T: Real>(model: &MetricModel<T>) -> Result<T> {
    match model {
        MetricModel::WarpedSlice { base, .. } => match base.as_ref() {
            MetricModel::UpperHalfSpace { b, .. } => Ok(*b),
            _ => Err(GeomError::InvalidArgument("the slice must be an upper half-space".into())),
        },
        _ => Err(GeomError::InvalidArgument("distortion checks need a warped product over its zero slice".into())),
    }
}

fn evaluate_pair<T: Real>(
    model: &MetricModel<T>,
    f: &BaseMap<T>,
    beta: T,
    p: &[T],
    p2: &[T],
    bvp: &BvpOptions<T>,
) -> Result<DistortionPair<T>> {
    let n = p.len();
    let d_x = model_distance(model, &Point::new(p.to_vec()), &Point::new(p2.to_vec()), bvp)?;
    let (fq, fq2) = (f.apply(&p[..n - 1])?, f.apply(&p2[..n - 1])?);
    let d0 = hyperbolic_distance(&fq, &fq2, T::one())?;
    let d_h_beta = warped_distance(beta * p[n - 1], beta * p2[n - 1], d0)?;
    let d_h_1 = warped_distance(p[n - 1], p2[n - 1], d0)?;
    if !(d_h_beta > T::zero()) || !(d_h_1 > T::zero()) {
        return Err(GeomError::Numerical("coincident comparison images".into()));
    }
    Ok(DistortionPair {
        p: p.to_vec(),
        p2: p2.to_vec(),
        d_x,
        d_h_beta,
        d_h_1,
        ratio_upper: d_x / d_h_beta,
        ratio_lower: d_x / d_h_1,
    })
}

/// Samples pairs in `X` and reports the extreme ratios of `d_X` to the
/// comparison distances. Failed pairs are skipped and listed; more than
/// [`MAX_SKIPPED_FRACTION`] of them fails the scan.
pub fn lemma_checks<T: Real>(
    model: &MetricModel<T>,
    sigma: Hypersurface,
    f: &BaseMap<T>,
    beta: T,
    sampler: &PairSampler<T>,
    opts: &LemmaOptions<T>,
) -> Result<DistortionReport<T>> {
    model.validate()?;
    if sigma != Hypersurface::WarpedZeroSlice {
        return Err(GeomError::InvalidArgument(format!(
            "distortion checks need Fermi coordinates; got {}",
            sigma.name()
        )));
    }
    if !(beta >= T::one()) || !beta.is_finite() {
        return Err(GeomError::InvalidArgument("beta must be at least 1".into()));
    }
    let b = slice_scale(model)?;
    let scale = T::one() / b;
    let pairs = sampler.sample(model.dim() - 1, scale)?;
    if pairs.is_empty() {
        return Err(GeomError::InsufficientSamples("no pairs requested".into()));
    }
    let results = map_ordered(&pairs, opts.workers, |_, (p, p2)| evaluate_pair(model, f, beta, p, p2, &opts.bvp));
    let mut good = Vec::with_capacity(results.len());
    let mut skipped = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(pair) => good.push(pair),
            Err(e) => skipped.push((i, e)),
        }
    }
    let n = pairs.len();
    if skipped.len() as f64 > MAX_SKIPPED_FRACTION * n as f64 {
        return Err(GeomError::NonConvergence(format!("{} of {n} pairs could not be evaluated", skipped.len())));
    }
    let c_upper = good.iter().map(|p| p.ratio_upper).fold(T::neg_infinity(), T::max);
    let c_lower = good.iter().map(|p| p.ratio_lower).fold(T::infinity(), T::min);
    if !c_upper.is_finite() || !(c_lower > T::zero()) {
        return Err(GeomError::Numerical("distortion ratios are not finite and positive".into()));
    }
    let lipschitz = f.hyperbolic_lipschitz() * b.max(scale);
    Ok(DistortionReport { c_upper, c_lower, n_pairs: n, skipped, beta, lipschitz, pairs: good })
}
