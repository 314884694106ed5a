//! Adaptive Dormand–Prince 5(4) integrator.
//!
//! Integrates in either time direction and lands exactly on requested sample
//! times. A domain predicate is checked after every accepted step; when a step
//! would leave the domain it is shrunk until it either fits or underflows.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions<T> {
    pub rtol: T,
    pub atol: T,
    pub h_init: Option<T>,
    pub max_steps: usize,
}

impl<T: Real> OdeOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        Self { rtol: tol, atol: tol, h_init: None, max_steps: 2_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeStatus {
    Completed,
    /// The solution left the domain; the outcome holds the last valid state.
    ExitedDomain,
    StepUnderflow,
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeOutcome<T> {
    pub status: OdeStatus,
    /// Time and state of the last accepted step.
    pub t: T,
    pub y: Vec<T>,
    /// States at the requested sample times that were reached.
    pub samples: Vec<(T, Vec<T>)>,
    pub accepted: usize,
    pub rejected: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combo<T: Real>(y: &[T], h: T, terms: &[(f64, &[T])], out: &mut [T]) {
    for i in 0..y.len() {
        let mut acc = T::zero();
        for &(c, k) in terms {
            acc = acc + T::lit(c) * k[i];
        }
        out[i] = y[i] + h * acc;
    }
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`.
///
/// `sample_times` must be ordered in the direction of integration and lie
/// between `t0` and `t_end`.
pub fn integrate<T, F, D>(
    mut rhs: F,
    t0: T,
    y0: &[T],
    t_end: T,
    sample_times: &[T],
    opts: &OdeOptions<T>,
    mut in_domain: D,
) -> OdeOutcome<T>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]),
    D: FnMut(&[T]) -> bool,
{
    let n = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut samples = Vec::with_capacity(sample_times.len());
    let mut next_sample = 0;
    let dir = if t_end >= t0 { T::one() } else { -T::one() };
    let span = (t_end - t0).abs();

    while next_sample < sample_times.len() && (sample_times[next_sample] - t0).abs() <= T::zero() {
        samples.push((t0, y.clone()));
        next_sample += 1;
    }
    if span == T::zero() {
        return OdeOutcome { status: OdeStatus::Completed, t, y, samples, accepted: 0, rejected: 0 };
    }

    let mut k1 = vec![T::zero(); n];
    let mut k2 = vec![T::zero(); n];
    let mut k3 = vec![T::zero(); n];
    let mut k4 = vec![T::zero(); n];
    let mut k5 = vec![T::zero(); n];
    let mut k6 = vec![T::zero(); n];
    let mut k7 = vec![T::zero(); n];
    let mut stage = vec![T::zero(); n];
    let mut y_new = vec![T::zero(); n];
    rhs(t, &y, &mut k1);

    let scale_of = |a: T, b: T| opts.atol + opts.rtol * a.abs().max(b.abs());
    let mut h = match opts.h_init {
        Some(h0) => h0.abs().min(span),
        None => {
            let d0 =
                (y.iter().map(|&v| (v / scale_of(v, v)).powi(2)).sum::<T>() / T::from_usize_lossy(n.max(1))).sqrt();
            let d1 = (y.iter().zip(&k1).map(|(&v, &f)| (f / scale_of(v, v)).powi(2)).sum::<T>()
                / T::from_usize_lossy(n.max(1)))
            .sqrt();
            let guess = if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) { T::lit(1e-6) } else { T::lit(0.01) * d0 / d1 };
            guess.min(span).min(T::lit(0.1))
        }
    };
    let h_floor = T::epsilon() * T::lit(64.0);
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let mut last_rejected = false;

    loop {
        if accepted + rejected >= opts.max_steps {
            return OdeOutcome { status: OdeStatus::MaxSteps, t, y, samples, accepted, rejected };
        }
        let remaining = (t_end - t) * dir;
        if remaining <= T::zero() {
            break;
        }
        let target = if next_sample < sample_times.len() { (sample_times[next_sample] - t) * dir } else { remaining };
        let mut step = h.min(target).min(remaining);
        let lands_on_sample = next_sample < sample_times.len() && step >= target;
        if step <= h_floor * t.abs().max(T::one()) {
            if target <= h_floor * t.abs().max(T::one()) && lands_on_sample {
                samples.push((t, y.clone()));
                next_sample += 1;
                continue;
            }
            return OdeOutcome { status: OdeStatus::StepUnderflow, t, y, samples, accepted, rejected };
        }
        step = step * dir;

        combo(&y, step, &[(A21, &k1)], &mut stage);
        rhs(t + T::lit(C2) * step, &stage, &mut k2);
        combo(&y, step, &[(A31, &k1), (A32, &k2)], &mut stage);
        rhs(t + T::lit(C3) * step, &stage, &mut k3);
        combo(&y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)], &mut stage);
        rhs(t + T::lit(C4) * step, &stage, &mut k4);
        combo(&y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], &mut stage);
        rhs(t + T::lit(C5) * step, &stage, &mut k5);
        combo(&y, step, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], &mut stage);
        rhs(t + step, &stage, &mut k6);
        combo(&y, step, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)], &mut y_new);
        rhs(t + step, &y_new, &mut k7);

        let mut err_sq = T::zero();
        let mut finite = true;
        for i in 0..n {
            let e = step
                * (T::lit(E1) * k1[i]
                    + T::lit(E3) * k3[i]
                    + T::lit(E4) * k4[i]
                    + T::lit(E5) * k5[i]
                    + T::lit(E6) * k6[i]
                    + T::lit(E7) * k7[i]);
            let sc = scale_of(y[i], y_new[i]);
            err_sq = err_sq + (e / sc) * (e / sc);
            finite &= y_new[i].is_finite() && k7[i].is_finite();
        }
        let err = (err_sq / T::from_usize_lossy(n.max(1))).sqrt();

        if !finite || !(err <= T::one()) {
            rejected += 1;
            let factor = if finite && err.is_finite() {
                (T::lit(0.9) * err.powf(T::lit(-0.2))).max(T::lit(0.2))
            } else {
                T::lit(0.25)
            };
            h = step.abs() * factor.min(T::one());
            last_rejected = true;
            continue;
        }
        if !in_domain(&y_new) {
            rejected += 1;
            h = step.abs() * T::lit(0.5);
            if h <= h_floor * t.abs().max(T::one()) * T::lit(1e3) {
                return OdeOutcome { status: OdeStatus::ExitedDomain, t, y, samples, accepted, rejected };
            }
            last_rejected = true;
            continue;
        }

        accepted += 1;
        t = if lands_on_sample {
            sample_times[next_sample]
        } else if step.abs() >= remaining {
            t_end
        } else {
            t + step
        };
        std::mem::swap(&mut y, &mut y_new);
        std::mem::swap(&mut k1, &mut k7);
        if lands_on_sample {
            samples.push((t, y.clone()));
            next_sample += 1;
        }
        let grow = if err == T::zero() { T::lit(5.0) } else { (T::lit(0.9) * err.powf(T::lit(-0.2))).min(T::lit(5.0)) };
        let grow = if last_rejected { grow.min(T::one()) } else { grow };
        h = step.abs() * grow.max(T::lit(0.2));
        last_rejected = false;
    }
    while next_sample < sample_times.len() {
        samples.push((t, y.clone()));
        next_sample += 1;
    }
    OdeOutcome { status: OdeStatus::Completed, t, y, samples, accepted, rejected }
}
