//! Perpendicular Jacobi fields in parallel orthonormal frames.
//!
//! Along a geodesic with velocity `γ'`, the frame `E_0 = γ'/|γ'|, E_1, …` is
//! parallel transported and a perpendicular field is written `J = Σ y_a E_a`
//! (`a ≥ 1`). The Jacobi equation becomes `y'' = −M y` with the symmetric
//! matrix `M_ab = ⟨R(E_a, γ')γ', E_b⟩`.

use crate::error::{GeomError, Result};
use crate::flow::geodesic::PhaseState;
use crate::flow::system::{solve_times, Block, JointSystem};
use crate::geometry::MetricModel;
use crate::linalg::Mat;
use crate::scalar::Real;

/// A Jacobi field value and its covariant derivative, in chart components.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiState<T> {
    pub j: Vec<T>,
    pub j_prime: Vec<T>,
}

impl<T: Real> JacobiState<T> {
    pub fn new(j: Vec<T>, j_prime: Vec<T>) -> Self {
        Self { j, j_prime }
    }

    /// `|J|² + |J'|²` at chart coordinates `x`.
    pub fn sasaki_norm_sq(&self, model: &MetricModel<T>, x: &[T]) -> T {
        model.inner_unchecked(x, &self.j, &self.j) + model.inner_unchecked(x, &self.j_prime, &self.j_prime)
    }
}

/// Outcome of [`propagate_jacobi`].
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiSolution<T> {
    pub end: PhaseState<T>,
    pub state: JacobiState<T>,
    /// Components of `J` and `J'` in the perpendicular parallel frame.
    pub frame_j: Vec<T>,
    pub frame_j_prime: Vec<T>,
    /// `|⟨J, γ'⟩| / (|J| |γ'|)` at the end point.
    pub orthogonality_error: T,
}

/// The Jacobi matrix `Y` (and `Y'`) at one time along the geodesic.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiFrameSample<T> {
    pub t: T,
    pub state: PhaseState<T>,
    /// Parallel frame at `state.p`; entry 0 is the unit tangent.
    pub frame: Vec<Vec<T>>,
    pub y: Mat<T>,
    pub y_prime: Mat<T>,
}

/// Orthonormal frame at the start of a geodesic: the unit tangent first, then
/// Gram–Schmidt on the coordinate axes.
pub fn initial_frame<T: Real>(model: &MetricModel<T>, start: &PhaseState<T>) -> Result<Vec<Vec<T>>> {
    model.orthonormal_frame_unchecked(&start.p.coords, &start.v)
}

/// Solves `Y'' = −M Y` for a matrix of perpendicular Jacobi fields given in
/// the frame `frame0` (which must start with the unit tangent), reporting
/// `(Y, Y')` at each requested time. Times past a chart exit yield an
/// [`GeomError::ExitedDomain`] error.
pub fn propagate_jacobi_frame<T: Real>(
    model: &MetricModel<T>,
    start: &PhaseState<T>,
    frame0: &[Vec<T>],
    y0: &Mat<T>,
    y_prime0: &Mat<T>,
    times: &[T],
    tol: T,
) -> Result<Vec<JacobiFrameSample<T>>> {
    start.validate(model)?;
    let n = model.dim();
    let p = n - 1;
    if frame0.len() != n || y0.rows() != p || y_prime0.rows() != p || y0.cols() != y_prime0.cols() {
        return Err(GeomError::Dimension { expected: p, got: y0.rows() });
    }
    let cols = y0.cols();
    let sys = JointSystem::new(model, Block::Jacobi { cols });
    let mut state = sys.pack(&start.p.coords, &start.v, frame0);
    sys.set_block_mat(&mut state, 0, y0);
    sys.set_block_mat(&mut state, p * cols, y_prime0);
    let solved = solve_times(&sys, &state, times, tol)?;
    times
        .iter()
        .zip(solved.states)
        .map(|(&t, s)| {
            let y = s.ok_or_else(|| GeomError::ExitedDomain(solved.exit_time.unwrap_or(t).to_f64_lossy()))?;
            Ok(JacobiFrameSample {
                t,
                state: sys.phase(&y),
                frame: sys.frame(&y),
                y: sys.block_mat(&y, 0, p, cols),
                y_prime: sys.block_mat(&y, p * cols, p, cols),
            })
        })
        .collect()
}

fn frame_components<T: Real>(model: &MetricModel<T>, x: &[T], frame: &[Vec<T>], w: &[T]) -> Vec<T> {
    frame.iter().map(|e| model.inner_unchecked(x, w, e)).collect()
}

fn from_frame<T: Real>(frame: &[Vec<T>], comps: &[T]) -> Vec<T> {
    let n = frame[0].len();
    let mut out = vec![T::zero(); n];
    for (c, e) in comps.iter().zip(frame) {
        for k in 0..n {
            out[k] = out[k] + *c * e[k];
        }
    }
    out
}

/// Propagates a perpendicular Jacobi field along the geodesic from `start`
/// for time `duration` (either sign).
pub fn propagate_jacobi<T: Real>(
    model: &MetricModel<T>,
    start: &PhaseState<T>,
    init: &JacobiState<T>,
    duration: T,
    tol: T,
) -> Result<JacobiSolution<T>> {
    start.validate(model)?;
    let n = model.dim();
    if init.j.len() != n || init.j_prime.len() != n {
        return Err(GeomError::Dimension { expected: n, got: init.j.len().min(init.j_prime.len()) });
    }
    let x0 = &start.p.coords;
    let frame0 = initial_frame(model, start)?;
    let c_j = frame_components(model, x0, &frame0, &init.j);
    let c_jp = frame_components(model, x0, &frame0, &init.j_prime);
    let slack = T::lit(1e-8);
    let norm_j = model.norm_unchecked(x0, &init.j).max(T::one());
    let norm_jp = model.norm_unchecked(x0, &init.j_prime).max(T::one());
    if c_j[0].abs() > slack * norm_j || c_jp[0].abs() > slack * norm_jp {
        return Err(GeomError::InvalidArgument("Jacobi data must be perpendicular to the geodesic".into()));
    }
    if duration == T::zero() {
        return Ok(JacobiSolution {
            end: start.clone(),
            state: init.clone(),
            frame_j: c_j[1..].to_vec(),
            frame_j_prime: c_jp[1..].to_vec(),
            orthogonality_error: T::zero(),
        });
    }
    let y0 = Mat::from_row_slice(n - 1, 1, &c_j[1..]);
    let yp0 = Mat::from_row_slice(n - 1, 1, &c_jp[1..]);
    let sample = propagate_jacobi_frame(model, start, &frame0, &y0, &yp0, &[duration], tol)?.remove(0);
    let frame_j = sample.y.column(0);
    let frame_j_prime = sample.y_prime.column(0);
    let j = from_frame(&sample.frame[1..], &frame_j);
    let j_prime = from_frame(&sample.frame[1..], &frame_j_prime);
    let x = &sample.state.p.coords;
    let denom = model.norm_unchecked(x, &j) * sample.state.speed(model);
    let orthogonality_error =
        if denom > T::zero() { model.inner_unchecked(x, &j, &sample.state.v).abs() / denom } else { T::zero() };
    Ok(JacobiSolution {
        end: sample.state,
        state: JacobiState { j, j_prime },
        frame_j,
        frame_j_prime,
        orthogonality_error,
    })
}
