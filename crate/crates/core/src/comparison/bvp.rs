//! Geodesic distance by shooting.
//!
//! The unknown is the initial velocity `w` of a geodesic run for unit time,
//! so its length is the distance once the endpoint hits the target. Newton
//! iterations use a central-difference Jacobian of the endpoint map with a
//! backtracking line search. When the direct solve stalls, the target is
//! moved along the chart segment from `p` and approached by continuation.

use crate::error::{GeomError, Result};
use crate::flow::{integrate_geodesic, PhaseState};
use crate::geometry::{MetricModel, Point, TangentVector};
use crate::linalg::Mat;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BvpOptions<T> {
    /// Endpoint tolerance, measured in the metric at the target.
    pub tol: T,
    /// Tolerance for each geodesic integration.
    pub ode_tol: T,
    /// Budget of Newton iterations across all continuation stages.
    pub max_iter: usize,
}

impl<T: Real> BvpOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        Self { tol, ..Self::default() }
    }
}

impl<T: Real> Default for BvpOptions<T> {
    fn default() -> Self {
        Self { tol: T::lit(1e-9), ode_tol: T::lit(1e-12), max_iter: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BvpResult<T> {
    pub distance: T,
    /// Initial velocity of the unit-time geodesic from `p` to `p′`.
    pub initial_direction: TangentVector<T>,
    pub converged: bool,
    pub iterations: usize,
    pub endpoint_error: T,
}

struct Shooter<'a, T> {
    model: &'a MetricModel<T>,
    p: &'a Point<T>,
    ode_tol: T,
}

impl<T: Real> Shooter<'_, T> {
    fn endpoint(&self, w: &[T]) -> Option<Vec<T>> {
        if w.iter().all(|c| *c == T::zero()) {
            return Some(self.p.coords.clone());
        }
        let start = PhaseState::new(self.p.clone(), w.to_vec());
        let path = integrate_geodesic(self.model, &start, T::one(), self.ode_tol).ok()?;
        if path.exited {
            return None;
        }
        path.end().map(|s| s.p.coords.clone())
    }

    /// Central-difference Jacobian of the endpoint map.
    fn jacobian(&self, w: &[T]) -> Option<Mat<T>> {
        let n = w.len();
        let scale = w.iter().fold(T::one(), |m, c| m.max(c.abs()));
        let h = T::lit(1e-6) * scale;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut a = w.to_vec();
            let mut b = w.to_vec();
            a[j] = a[j] + h;
            b[j] = b[j] - h;
            let (ea, eb) = (self.endpoint(&a)?, self.endpoint(&b)?);
            cols.push(ea.iter().zip(&eb).map(|(&x, &y)| (x - y) / (T::lit(2.0) * h)).collect::<Vec<T>>());
        }
        Some(Mat::from_fn(n, n, |i, j| cols[j][i]))
    }
}

fn error_at<T: Real>(model: &MetricModel<T>, end: &[T], target: &[T]) -> T {
    let diff: Vec<T> = end.iter().zip(target).map(|(&a, &b)| a - b).collect();
    model.norm_unchecked(target, &diff)
}

enum Stage<T> {
    Converged(Vec<T>, T),
    Stalled,
    OutOfBudget,
}

/// Newton iterations allowed per continuation stage. Inside the basin of a
/// stage convergence is quadratic, so a stage needing more is cut in half.
const STAGE_ITERATIONS: usize = 10;
/// Integration and endpoint tolerances for the continuation stages.
const ROUGH_ODE_TOL: f64 = 1e-8;
const ROUGH_ENDPOINT_TOL: f64 = 1e-5;
/// Backtracking halvings before a Newton step counts as stalled.
const MAX_HALVINGS: usize = 5;

/// Newton iterations toward `target` from `w`; `used` counts iterations.
fn newton<T: Real>(
    shooter: &Shooter<'_, T>,
    target: &[T],
    mut w: Vec<T>,
    tol: T,
    budget: usize,
    used: &mut usize,
) -> Stage<T> {
    let model = shooter.model;
    let Some(mut end) = shooter.endpoint(&w) else { return Stage::Stalled };
    let mut err = error_at(model, &end, target);
    let mut stage_iterations = 0;
    loop {
        if err <= tol {
            return Stage::Converged(w, err);
        }
        if *used >= budget {
            return Stage::OutOfBudget;
        }
        if stage_iterations == STAGE_ITERATIONS {
            return Stage::Stalled;
        }
        stage_iterations += 1;
        *used += 1;
        let Some(jac) = shooter.jacobian(&w) else { return Stage::Stalled };
        let rhs: Vec<T> = end.iter().zip(target).map(|(&a, &b)| b - a).collect();
        let Ok(step) = jac.solve(&rhs) else { return Stage::Stalled };
        let mut alpha = T::one();
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<T> = w.iter().zip(&step).map(|(&a, &d)| a + alpha * d).collect();
            if let Some(e) = shooter.endpoint(&trial) {
                let trial_err = error_at(model, &e, target);
                if trial_err < err * (T::one() - T::lit(1e-4) * alpha) {
                    accepted = Some((trial, e, trial_err));
                    break;
                }
            }
            alpha = alpha * T::lit(0.5);
        }
        match accepted {
            Some((nw, ne, nerr)) => {
                w = nw;
                end = ne;
                err = nerr;
            }
            None => return Stage::Stalled,
        }
    }
}

/// Distance between `p` and `q` by geodesic shooting with default options
/// and endpoint tolerance `tol`.
pub fn geodesic_distance_bvp<T: Real>(
    model: &MetricModel<T>,
    p: &Point<T>,
    q: &Point<T>,
    tol: T,
) -> Result<BvpResult<T>> {
    geodesic_distance_bvp_with(model, p, q, &BvpOptions::with_tol(tol))
}

pub fn geodesic_distance_bvp_with<T: Real>(
    model: &MetricModel<T>,
    p: &Point<T>,
    q: &Point<T>,
    opts: &BvpOptions<T>,
) -> Result<BvpResult<T>> {
    model.check(p)?;
    model.check(q)?;
    if !(opts.tol > T::zero()) || !(opts.ode_tol > T::zero()) {
        return Err(GeomError::InvalidArgument("tolerances must be positive".into()));
    }
    let n = model.dim();
    // Continuation stages only need a rough solution; the last one is then
    // polished at full accuracy.
    let rough = Shooter { model, p, ode_tol: opts.ode_tol.max(T::lit(ROUGH_ODE_TOL)) };
    let rough_tol = opts.tol.max(T::lit(ROUGH_ENDPOINT_TOL));
    let delta: Vec<T> = q.coords.iter().zip(&p.coords).map(|(&a, &b)| a - b).collect();
    let mut w = vec![T::zero(); n];
    let mut used = 0;
    let mut reached = T::zero();
    // Start with a stage of roughly unit metric length along the segment.
    let seg_len = model.norm_unchecked(&p.coords, &delta);
    let mut step = if seg_len > T::one() { T::one() / seg_len } else { T::one() };
    let min_step = T::lit(1.0 / 1024.0);
    let stop = |reached: T, used: usize| {
        GeomError::NonConvergence(format!(
            "geodesic shooting stopped at fraction {} of the segment after {used} iterations",
            reached.to_f64_lossy()
        ))
    };
    while reached < T::one() {
        let s = (reached + step).min(T::one());
        let target: Vec<T> = p.coords.iter().zip(&delta).map(|(&a, &d)| a + s * d).collect();
        let guess = if reached > T::zero() { w.clone() } else { delta.iter().map(|&d| d * s).collect() };
        match newton(&rough, &target, guess, rough_tol, opts.max_iter, &mut used) {
            Stage::Converged(nw, _) => {
                w = nw;
                reached = s;
                step = (step * T::lit(4.0)).min(T::one());
            }
            Stage::Stalled if step > min_step => step = step * T::lit(0.5),
            Stage::Stalled | Stage::OutOfBudget => return Err(stop(reached, used)),
        }
    }
    let exact = Shooter { model, p, ode_tol: opts.ode_tol };
    let (w, last_err) = match newton(&exact, &q.coords, w, opts.tol, opts.max_iter, &mut used) {
        Stage::Converged(w, err) => (w, err),
        _ => return Err(stop(reached, used)),
    };
    let distance = model.norm_unchecked(&p.coords, &w);
    Ok(BvpResult {
        distance,
        initial_direction: TangentVector::new(p.clone(), w),
        converged: true,
        iterations: used,
        endpoint_error: last_err,
    })
}
