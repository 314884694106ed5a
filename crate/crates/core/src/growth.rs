//! Sampling `‖dΦ_t^ν‖` and fitting the normal growth exponent.

use crate::error::{GeomError, Result};
use crate::flow::{dphi_batch, Hypersurface};
use crate::geometry::{MetricModel, Point};
use crate::scalar::Real;

/// Default lower cutoff on `|t|` for the exponent fit.
pub const DEFAULT_T_MIN: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthSample<T> {
    pub q_index: usize,
    pub t: T,
    pub norm: T,
}

/// A base point whose flow computation failed; none of its times are sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleFailure {
    pub q_index: usize,
    pub error: GeomError,
}

/// Supremum and spread of the norm over the base grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSummary<T> {
    pub t: T,
    pub sup: T,
    pub inf: T,
    /// `(sup − inf) / sup`, the grid-supremum gap across base points.
    pub spread: T,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormField<T> {
    /// One sample per successful `(q, t)`, base-point major.
    pub samples: Vec<GrowthSample<T>>,
    pub failures: Vec<SampleFailure>,
    /// In the order of the time grid.
    pub per_t: Vec<TimeSummary<T>>,
}

/// Evaluates `‖dΦ_t^ν(q)‖` over `q_grid × t_grid`. Failures are recorded per
/// base point rather than aborting the batch.
pub fn sample_norm_field<T: Real>(
    model: &MetricModel<T>,
    sigma: Hypersurface,
    q_grid: &[Point<T>],
    t_grid: &[T],
    tol: T,
    workers: usize,
) -> Result<NormField<T>> {
    if q_grid.is_empty() || t_grid.is_empty() {
        return Err(GeomError::InvalidArgument("growth sampling needs nonempty grids".into()));
    }
    let results = dphi_batch(model, sigma, q_grid, t_grid, tol, workers);
    let mut samples = Vec::with_capacity(q_grid.len() * t_grid.len());
    let mut failures = Vec::new();
    for (q_index, res) in results.into_iter().enumerate() {
        match res {
            Ok(diffs) => {
                samples.extend(diffs.into_iter().map(|d| GrowthSample { q_index, t: d.t, norm: d.operator_norm }))
            }
            Err(error) => failures.push(SampleFailure { q_index, error }),
        }
    }
    let per_t = summarize(&samples, t_grid);
    Ok(NormField { samples, failures, per_t })
}

fn summarize<T: Real>(samples: &[GrowthSample<T>], t_grid: &[T]) -> Vec<TimeSummary<T>> {
    t_grid
        .iter()
        .map(|&t| {
            let norms: Vec<T> = samples.iter().filter(|s| s.t == t).map(|s| s.norm).collect();
            let sup = norms.iter().copied().fold(T::neg_infinity(), T::max);
            let inf = norms.iter().copied().fold(T::infinity(), T::min);
            let spread = if norms.is_empty() { T::zero() } else { (sup - inf) / sup };
            TimeSummary { t, sup, inf, spread, count: norms.len() }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitSide {
    Positive,
    Negative,
}

impl FitSide {
    pub fn name(self) -> &'static str {
        match self {
            Self::Positive => "positive",
            Self::Negative => "negative",
        }
    }
}

/// Least-squares fit of `log sup_q norm ≈ logC + β|t|` on one time side.
#[derive(Debug, Clone, PartialEq)]
pub struct SideFit<T> {
    pub side: FitSide,
    pub beta: T,
    pub log_c: T,
    pub residual_rms: T,
    /// Standard error of the slope; zero when the fit is exact or has only
    /// two points.
    pub beta_stderr: T,
    pub n_points: usize,
    pub t_min: T,
    pub t_max: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit<T> {
    pub beta_hat: T,
    pub log_c_hat: T,
    pub residual_rms: T,
    /// `|t|` window of the side that produced `beta_hat`.
    pub t_min: T,
    pub t_max: T,
    pub side: FitSide,
    pub beta_stderr: T,
    /// Every side with enough data, positive first.
    pub sides: Vec<SideFit<T>>,
}

impl<T: Real> GrowthFit<T> {
    /// `beta_hat ± z · stderr`.
    pub fn confidence_interval(&self, z: T) -> (T, T) {
        (self.beta_hat - z * self.beta_stderr, self.beta_hat + z * self.beta_stderr)
    }
}

fn ols<T: Real>(side: FitSide, pts: &[(T, T)]) -> SideFit<T> {
    let n = T::from_usize_lossy(pts.len());
    let mean_x = pts.iter().map(|p| p.0).sum::<T>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxx: T = pts.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: T = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let beta = sxy / sxx;
    let log_c = mean_y - beta * mean_x;
    let sse: T = pts.iter().map(|p| (p.1 - log_c - beta * p.0).powi(2)).sum();
    let beta_stderr = if pts.len() > 2 { (sse / (n - T::lit(2.0)) / sxx).sqrt() } else { T::zero() };
    let t_min = pts.iter().map(|p| p.0).fold(T::infinity(), T::min);
    let t_max = pts.iter().map(|p| p.0).fold(T::neg_infinity(), T::max);
    SideFit { side, beta, log_c, residual_rms: (sse / n).sqrt(), beta_stderr, n_points: pts.len(), t_min, t_max }
}

/// Fits the growth exponent from per-time suprema `(t, sup_q norm)`.
pub fn fit_sup_series<T: Real>(series: &[(T, T)], t_min: T) -> Result<GrowthFit<T>> {
    if let Some(bad) = series.iter().find(|(_, v)| !(*v > T::zero()) || !v.is_finite()) {
        return Err(GeomError::InvalidArgument(format!("nonpositive norm {} at t = {}", bad.1, bad.0)));
    }
    let mut sides = Vec::new();
    for side in [FitSide::Positive, FitSide::Negative] {
        let mut pts: Vec<(T, T)> = series
            .iter()
            .filter(|(t, _)| match side {
                FitSide::Positive => *t > T::zero(),
                FitSide::Negative => *t < T::zero(),
            })
            .filter(|(t, _)| t.abs() >= t_min)
            .map(|&(t, v)| (t.abs(), v.ln()))
            .collect();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let distinct = pts.windows(2).filter(|w| w[0].0 != w[1].0).count() + usize::from(!pts.is_empty());
        if distinct >= 2 {
            sides.push(ols(side, &pts));
        }
    }
    if sides.is_empty() {
        return Err(GeomError::InsufficientSamples(format!("need at least two distinct |t| >= {t_min} on one side")));
    }
    let best = sides.iter().fold(&sides[0], |acc, s| if s.beta > acc.beta { s } else { acc }).clone();
    Ok(GrowthFit {
        beta_hat: best.beta,
        log_c_hat: best.log_c,
        residual_rms: best.residual_rms,
        t_min: best.t_min,
        t_max: best.t_max,
        side: best.side,
        beta_stderr: best.beta_stderr,
        sides,
    })
}

/// Per-time suprema of a sample list, ordered by first appearance of `t`.
pub fn sup_series<T: Real>(samples: &[GrowthSample<T>]) -> Vec<(T, T)> {
    let mut out: Vec<(T, T)> = Vec::new();
    for s in samples {
        match out.iter_mut().find(|(t, _)| *t == s.t) {
            Some(entry) => entry.1 = entry.1.max(s.norm),
            None => out.push((s.t, s.norm)),
        }
    }
    out
}

/// OLS of `log(sup_q norm)` against `|t|` for `|t| ≥ t_min`, each time side
/// separately; the larger slope is reported.
pub fn fit_growth_exponent<T: Real>(samples: &[GrowthSample<T>], t_min: T) -> Result<GrowthFit<T>> {
    fit_sup_series(&sup_series(samples), t_min)
}

/// Empirical constants of the exponential upper and lower bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<T> {
    pub b: T,
    /// `max norm · e^{−b|t|}`.
    pub c_upper: T,
    /// `min norm · e^{−|t|}`.
    pub c_lower: T,
    pub upper_bound_ok: bool,
    pub lower_bound_ok: bool,
    /// Samples above `c_upper e^{b|t|}` or below `c_lower e^{|t|}` (relative
    /// slack 1e-12); zero unless the inputs contain non-finite values.
    pub violations: usize,
    pub n_samples: usize,
}

pub fn bound_report<T: Real>(samples: &[GrowthSample<T>], b: T) -> Result<BoundReport<T>> {
    if !(b >= T::one()) {
        return Err(GeomError::InvalidArgument(format!("bound exponent b = {b} must be at least 1")));
    }
    if samples.is_empty() {
        return Err(GeomError::InsufficientSamples("bound report needs samples".into()));
    }
    let mut c_upper = T::neg_infinity();
    let mut c_lower = T::infinity();
    for s in samples {
        c_upper = c_upper.max(s.norm * (-b * s.t.abs()).exp());
        c_lower = c_lower.min(s.norm * (-s.t.abs()).exp());
    }
    let slack = T::lit(1e-12);
    let violations = samples
        .iter()
        .filter(|s| {
            let hi = c_upper * (b * s.t.abs()).exp() * (T::one() + slack);
            let lo = c_lower * s.t.abs().exp() * (T::one() - slack);
            !(s.norm <= hi && s.norm >= lo)
        })
        .count();
    Ok(BoundReport {
        b,
        c_upper,
        c_lower,
        upper_bound_ok: c_upper.is_finite(),
        lower_bound_ok: c_lower > T::zero(),
        violations,
        n_samples: samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn law(f: impl Fn(f64) -> f64, ts: &[f64]) -> Vec<GrowthSample<f64>> {
        ts.iter().map(|&t| GrowthSample { q_index: 0, t, norm: f(t) }).collect()
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        crate::geometry::linspace(lo, hi, n)
    }

    #[test]
    fn cosh_samples_fit_exponent_one() {
        let fit = fit_growth_exponent(&law(f64::cosh, &grid(2.0, 10.0, 17)), 2.0).unwrap();
        assert!((0.99..=1.01).contains(&fit.beta_hat), "{}", fit.beta_hat);
        let fit13 = fit_growth_exponent(&law(|t| (1.3 * t).cosh(), &grid(2.0, 10.0, 17)), 2.0).unwrap();
        assert!((1.29..=1.31).contains(&fit13.beta_hat));
    }

    #[test]
    fn constant_samples_have_zero_slope() {
        let fit = fit_growth_exponent(&law(|_| 1.0, &grid(-8.0, 8.0, 9)), 2.0).unwrap();
        assert_eq!(fit.beta_hat, 0.0);
        assert_eq!(fit.residual_rms, 0.0);
    }

    #[test]
    fn window_stability_for_cosh() {
        let a = fit_growth_exponent(&law(f64::cosh, &grid(2.0, 10.0, 33)), 2.0).unwrap();
        let b = fit_growth_exponent(&law(f64::cosh, &grid(4.0, 12.0, 33)), 4.0).unwrap();
        assert!((a.beta_hat - b.beta_hat).abs() < 0.01);
    }

    #[test]
    fn two_sided_fit_returns_larger_slope() {
        let samples = law(|t: f64| if t > 0.0 { (0.8 * t).exp() } else { (-1.2 * t).exp() }, &grid(-6.0, 6.0, 13));
        let fit = fit_growth_exponent(&samples, 2.0).unwrap();
        assert_eq!(fit.side, FitSide::Negative);
        assert!((fit.beta_hat - 1.2).abs() < 1e-12);
        assert_eq!(fit.sides.len(), 2);
    }

    #[test]
    fn fit_input_errors() {
        assert!(matches!(
            fit_growth_exponent(&law(f64::cosh, &[0.0, 1.0, 3.0]), 2.0),
            Err(GeomError::InsufficientSamples(_))
        ));
        assert!(matches!(fit_growth_exponent(&law(|_| 0.0, &[2.0, 3.0]), 2.0), Err(GeomError::InvalidArgument(_))));
    }

    #[test]
    fn bound_report_cosh_and_identity() {
        let r = bound_report(&law(f64::cosh, &grid(-10.0, 10.0, 41)), 1.0).unwrap();
        assert!(r.c_upper <= 1.0 && r.c_lower >= 0.5);
        assert!(r.upper_bound_ok && r.lower_bound_ok);
        assert_eq!(r.violations, 0);
        let r0 = bound_report(&law(|_| 1.0, &[0.0]), 1.3).unwrap();
        assert_eq!((r0.c_upper, r0.c_lower), (1.0, 1.0));
        assert!(bound_report(&law(|_| 1.0, &[0.0]), 0.5).is_err());
    }

    #[test]
    fn sup_is_taken_over_base_points() {
        let mut samples = law(f64::cosh, &[2.0, 4.0]);
        samples.push(GrowthSample { q_index: 1, t: 2.0, norm: 10.0 });
        assert_eq!(sup_series(&samples), vec![(2.0, 10.0), (4.0, 4.0_f64.cosh())]);
    }

    proptest! {
        #[test]
        fn exact_exponentials_are_recovered(beta in 0.0f64..3.0, log_a in -3.0f64..3.0, extra in 0usize..10) {
            let ts = grid(2.0, 8.0, 7 + extra);
            let samples = law(|t| (log_a + beta * t).exp(), &ts);
            let fit = fit_growth_exponent(&samples, 2.0).unwrap();
            prop_assert!((fit.beta_hat - beta).abs() < 1e-9);
            prop_assert!((fit.log_c_hat - log_a).abs() < 1e-9);
            // Refitting on a superset drawn from the same law.
            let mut more = samples.clone();
            more.extend(law(|t| (log_a + beta * t).exp(), &grid(8.5, 11.0, 4)));
            let refit = fit_growth_exponent(&more, 2.0).unwrap();
            prop_assert!((refit.beta_hat - fit.beta_hat).abs() < 1e-9);
        }

        #[test]
        fn residual_is_nonnegative_and_beta_finite(vals in proptest::collection::vec(0.1f64..100.0, 3..20)) {
            let ts: Vec<f64> = (0..vals.len()).map(|i| 2.0 + i as f64 * 0.5).collect();
            let samples: Vec<GrowthSample<f64>> =
                ts.iter().zip(&vals).map(|(&t, &v)| GrowthSample { q_index: 0, t, norm: v }).collect();
            let fit = fit_growth_exponent(&samples, 2.0).unwrap();
            prop_assert!(fit.residual_rms >= 0.0 && fit.beta_hat.is_finite());
        }
    }
}
