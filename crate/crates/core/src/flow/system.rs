//! The joint ODE behind every flow computation.
//!
//! State layout: position `x`, velocity `v`, then optionally a parallel frame
//! `E_0 … E_{n-1}` (row-major, one frame vector per row), then a matrix block
//! expressed in the perpendicular part `E_1 … E_{n-1}` of the frame.
//!
//! Velocity and frame vectors are stored in metric-normalized components
//! `ŵ_k = √g_kk · w^k` (all metrics here are diagonal). Chart components of a
//! unit vector can be as small as `1/cosh r`, which would drown in the
//! absolute error tolerance; normalized components stay of order one.

use crate::error::{GeomError, Result};
use crate::flow::geodesic::PhaseState;
use crate::geometry::{riemann_from_jet, MetricModel, Point};
use crate::linalg::Mat;
use crate::ode::{integrate, OdeOptions, OdeStatus};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Block {
    /// Geodesic only.
    None,
    /// Geodesic and parallel frame.
    Frame,
    /// Jacobi matrix `Y` and its derivative `Y'`, each `(n-1) × cols`.
    Jacobi { cols: usize },
    /// Riccati operator `U`, `(n-1) × (n-1)`.
    Riccati,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct JointSystem<'a, T> {
    pub model: &'a MetricModel<T>,
    pub n: usize,
    pub block: Block,
}

impl<'a, T: Real> JointSystem<'a, T> {
    pub fn new(model: &'a MetricModel<T>, block: Block) -> Self {
        Self { model, n: model.dim(), block }
    }

    fn has_frame(&self) -> bool {
        self.block != Block::None
    }

    pub fn frame_offset(&self) -> usize {
        2 * self.n
    }

    pub fn block_offset(&self) -> usize {
        if self.has_frame() {
            2 * self.n + self.n * self.n
        } else {
            2 * self.n
        }
    }

    pub fn len(&self) -> usize {
        let p = self.n - 1;
        self.block_offset()
            + match self.block {
                Block::None | Block::Frame => 0,
                Block::Jacobi { cols } => 2 * p * cols,
                Block::Riccati => p * p,
            }
    }

    /// Packs position, velocity and an orthonormal frame (chart components)
    /// into a state vector; the matrix block is left at zero.
    pub fn pack(&self, x: &[T], v: &[T], frame: &[Vec<T>]) -> Vec<T> {
        let n = self.n;
        let s: Vec<T> = self.model.metric_diag_unchecked(x).into_iter().map(T::sqrt).collect();
        let mut y = vec![T::zero(); self.len()];
        y[..n].copy_from_slice(x);
        for k in 0..n {
            y[n + k] = v[k] * s[k];
        }
        if self.has_frame() {
            for (a, e) in frame.iter().enumerate() {
                let off = self.frame_offset() + a * n;
                for k in 0..n {
                    y[off + k] = e[k] * s[k];
                }
            }
        }
        y
    }

    fn scales(&self, y: &[T]) -> Vec<T> {
        self.model.metric_diag_unchecked(&y[..self.n]).into_iter().map(T::sqrt).collect()
    }

    /// Position and chart-component velocity of a state.
    pub fn phase(&self, y: &[T]) -> PhaseState<T> {
        let n = self.n;
        let s = self.scales(y);
        PhaseState::new(Point::new(y[..n].to_vec()), (0..n).map(|k| y[n + k] / s[k]).collect())
    }

    /// Frame vectors in chart components.
    pub fn frame(&self, y: &[T]) -> Vec<Vec<T>> {
        let n = self.n;
        let s = self.scales(y);
        (0..n)
            .map(|a| {
                let off = self.frame_offset() + a * n;
                (0..n).map(|k| y[off + k] / s[k]).collect()
            })
            .collect()
    }

    /// Reads a `rows × cols` matrix stored at `offset` inside the block.
    pub fn block_mat(&self, y: &[T], offset: usize, rows: usize, cols: usize) -> Mat<T> {
        let start = self.block_offset() + offset;
        Mat::from_row_slice(rows, cols, &y[start..start + rows * cols])
    }

    pub fn set_block_mat(&self, y: &mut [T], offset: usize, m: &Mat<T>) {
        let start = self.block_offset() + offset;
        y[start..start + m.as_slice().len()].copy_from_slice(m.as_slice());
    }

    pub fn rhs(&self, y: &[T], dy: &mut [T]) {
        let n = self.n;
        let x = &y[..n];
        let curvature = matches!(self.block, Block::Jacobi { .. } | Block::Riccati);
        let jet = if curvature { self.model.diag_jet_unchecked(x) } else { self.model.diag_jet1_unchecked(x) };
        if jet.g.iter().any(|&g| !(g > T::zero()) || !g.is_finite()) {
            dy.iter_mut().for_each(|d| *d = T::nan());
            return;
        }
        let gamma = jet.christoffel();
        let s: Vec<T> = jet.g.iter().map(|g| g.sqrt()).collect();
        let v: Vec<T> = (0..n).map(|k| y[n + k] / s[k]).collect();
        // Logarithmic rate of change of each scale along the geodesic.
        let dlog_s: Vec<T> =
            (0..n).map(|k| (0..n).map(|i| jet.dg(k, i) * v[i]).sum::<T>() / (T::lit(2.0) * jet.g[k])).collect();
        dy[..n].copy_from_slice(&v);
        let acc = gamma.contract(&v, &v);
        for k in 0..n {
            dy[n + k] = -s[k] * acc[k] + y[n + k] * dlog_s[k];
        }
        if !self.has_frame() {
            return;
        }
        let mut frame = Vec::with_capacity(n);
        for a in 0..n {
            let off = self.frame_offset() + a * n;
            let e: Vec<T> = (0..n).map(|k| y[off + k] / s[k]).collect();
            let de = gamma.contract(&v, &e);
            for k in 0..n {
                dy[off + k] = -s[k] * de[k] + y[off + k] * dlog_s[k];
            }
            frame.push(e);
        }
        if matches!(self.block, Block::None | Block::Frame) {
            return;
        }
        let riemann = match riemann_from_jet(&jet.to_full()) {
            Ok(r) => r,
            Err(_) => {
                dy.iter_mut().for_each(|d| *d = T::nan());
                return;
            }
        };
        let m = riemann.jacobi_operator(&frame[1..], &v);
        let p = n - 1;
        let base = self.block_offset();
        match self.block {
            Block::Jacobi { cols } => {
                let yy = self.block_mat(y, 0, p, cols);
                let yp = self.block_mat(y, p * cols, p, cols);
                let ypp = m.matmul(&yy).scale(-T::one());
                dy[base..base + p * cols].copy_from_slice(yp.as_slice());
                dy[base + p * cols..base + 2 * p * cols].copy_from_slice(ypp.as_slice());
            }
            Block::Riccati => {
                let u = self.block_mat(y, 0, p, p);
                let du = u.matmul(&u).scale(-T::one()).sub(&m);
                dy[base..base + p * p].copy_from_slice(du.as_slice());
            }
            Block::None | Block::Frame => {}
        }
    }
}

/// The integrator runs at this fraction of the user tolerance so that
/// invariants such as the speed stay within a small multiple of it.
pub(crate) const TOL_SAFETY: f64 = 0.1;

pub(crate) fn ode_options<T: Real>(tol: T) -> OdeOptions<T> {
    OdeOptions::with_tol(tol * T::lit(TOL_SAFETY))
}

/// Result of integrating the joint system to a list of signed times.
#[derive(Debug, Clone)]
pub(crate) struct SolvedTimes<T> {
    /// State at each requested time, or `None` when the trajectory left the
    /// chart first.
    pub states: Vec<Option<Vec<T>>>,
    /// Time at which the chart was left, if it was.
    pub exit_time: Option<T>,
}

/// Integrates from `t = 0` to every time in `times` (any signs, any order).
/// Negative and positive times are handled by two separate solves.
pub(crate) fn solve_times<T: Real>(sys: &JointSystem<'_, T>, y0: &[T], times: &[T], tol: T) -> Result<SolvedTimes<T>> {
    let opts = ode_options(tol);
    let mut states: Vec<Option<Vec<T>>> = vec![None; times.len()];
    let mut exit_time: Option<T> = None;
    for forward in [false, true] {
        let mut idx: Vec<usize> =
            (0..times.len()).filter(|&i| if forward { times[i] >= T::zero() } else { times[i] < T::zero() }).collect();
        if idx.is_empty() {
            continue;
        }
        idx.sort_by(|&a, &b| times[a].abs().partial_cmp(&times[b].abs()).unwrap());
        let sample_times: Vec<T> = idx.iter().map(|&i| times[i]).collect();
        let t_end = *sample_times.last().unwrap();
        let out = integrate(
            |_t, y: &[T], dy: &mut [T]| sys.rhs(y, dy),
            T::zero(),
            y0,
            t_end,
            &sample_times,
            &opts,
            |y: &[T]| sys.model.in_domain(&y[..sys.n]),
        );
        match out.status {
            OdeStatus::Completed => {}
            OdeStatus::ExitedDomain => {
                let t = out.t;
                exit_time = Some(match exit_time {
                    Some(prev) if prev.abs() < t.abs() => prev,
                    _ => t,
                });
            }
            OdeStatus::StepUnderflow => {
                return Err(GeomError::Integration(format!("step size underflow at t = {}", out.t)))
            }
            OdeStatus::MaxSteps => {
                return Err(GeomError::Integration(format!("step budget exhausted at t = {}", out.t)))
            }
        }
        for (k, (_, state)) in out.samples.into_iter().enumerate() {
            states[idx[k]] = Some(state);
        }
    }
    Ok(SolvedTimes { states, exit_time })
}
