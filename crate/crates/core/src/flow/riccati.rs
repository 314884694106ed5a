//! Stable and unstable Riccati operators along a geodesic.
//!
//! In the perpendicular parallel frame the operators `U = Y' Y⁻¹` of stable
//! and unstable Jacobi tensors solve `U' + U² + M = 0`. The stable one is the
//! limit of solutions started from `U(T) = 0` and integrated back to `0` as
//! `T → ∞`; the unstable one comes from `U(−T) = 0` integrated forward.

use crate::error::{GeomError, Result};
use crate::flow::geodesic::PhaseState;
use crate::flow::jacobi::initial_frame;
use crate::flow::system::{ode_options, solve_times, Block, JointSystem};
use crate::geometry::MetricModel;
use crate::linalg::Mat;
use crate::ode::{integrate, OdeStatus};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiOptions<T> {
    /// Horizon `T_h`; the operators are started at `±T_h`. Truncation error
    /// decays like `e^{-T_h}` but errors in the geodesic itself grow like
    /// `e^{b T_h}`, so very long horizons are counterproductive.
    pub horizon: T,
    pub tol: T,
    /// Largest accepted gap between the horizon-`T_h` and horizon-`T_h/2`
    /// solutions at time 0.
    pub residual_tol: T,
}

impl<T: Real> Default for RiccatiOptions<T> {
    fn default() -> Self {
        Self { horizon: T::lit(14.0), tol: T::lit(1e-10), residual_tol: T::lit(1e-4) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiSplitting<T> {
    /// Operators in the perpendicular frame `frame[1..]` at the start point.
    pub u_stable: Mat<T>,
    pub u_unstable: Mat<T>,
    /// Parallel frame at the start; entry 0 is the unit tangent.
    pub frame: Vec<Vec<T>>,
    /// `‖U_{T_h}(0) − U_{T_h/2}(0)‖_max` for each side.
    pub residual_stable: T,
    pub residual_unstable: T,
    pub converged: bool,
    pub horizon: T,
}

impl<T: Real> RiccatiSplitting<T> {
    /// Eigenvalues (ascending) of the symmetric parts.
    pub fn stable_eigenvalues(&self) -> Vec<T> {
        self.u_stable.symmetric_eigen().0
    }

    pub fn unstable_eigenvalues(&self) -> Vec<T> {
        self.u_unstable.symmetric_eigen().0
    }
}

/// Integrates `U` from time `from` (where `U = 0`) back to time 0, starting
/// from the geodesic state `y_from` at `from`.
fn riccati_to_origin<T: Real>(sys: &JointSystem<'_, T>, y_from: &[T], from: T, tol: T) -> Result<Mat<T>> {
    let p = sys.n - 1;
    let mut y0 = y_from.to_vec();
    y0.resize(sys.len(), T::zero());
    let out = integrate(
        |_t, y: &[T], dy: &mut [T]| sys.rhs(y, dy),
        from,
        &y0,
        T::zero(),
        &[],
        &ode_options(tol),
        |y: &[T]| sys.model.in_domain(&y[..sys.n]),
    );
    match out.status {
        OdeStatus::Completed => Ok(sys.block_mat(&out.y, 0, p, p)),
        OdeStatus::ExitedDomain => Err(GeomError::ExitedDomain(out.t.to_f64_lossy())),
        status => Err(GeomError::Integration(format!(
            "Riccati solve failed at t = {} ({status:?}, {} steps)",
            out.t,
            out.accepted + out.rejected
        ))),
    }
}

/// Stable and unstable Riccati operators at the start of the geodesic.
///
/// Convergence is judged by comparing the solutions obtained from horizons
/// `T_h` and `T_h / 2`; a gap above `residual_tol` clears `converged`.
pub fn riccati_splitting<T: Real>(
    model: &MetricModel<T>,
    start: &PhaseState<T>,
    opts: &RiccatiOptions<T>,
) -> Result<RiccatiSplitting<T>> {
    start.validate(model)?;
    if !(opts.horizon > T::zero()) || !(opts.tol > T::zero()) {
        return Err(GeomError::InvalidArgument("horizon and tolerance must be positive".into()));
    }
    let frame = initial_frame(model, start)?;
    let geo = JointSystem::new(model, Block::Frame);
    let ric = JointSystem::new(model, Block::Riccati);
    let y0 = geo.pack(&start.p.coords, &start.v, &frame);
    let h = opts.horizon;
    let half = h * T::lit(0.5);
    let legs = solve_times(&geo, &y0, &[-h, -half, half, h], opts.tol)?;
    if let Some(t) = legs.exit_time {
        return Err(GeomError::ExitedDomain(t.to_f64_lossy()));
    }
    let state = |i: usize| legs.states[i].as_ref().expect("reached without exit");
    let u_unstable = riccati_to_origin(&ric, state(0), -h, opts.tol)?;
    let u_unstable_half = riccati_to_origin(&ric, state(1), -half, opts.tol)?;
    let u_stable_half = riccati_to_origin(&ric, state(2), half, opts.tol)?;
    let u_stable = riccati_to_origin(&ric, state(3), h, opts.tol)?;
    let residual_stable = u_stable.sub(&u_stable_half).max_abs();
    let residual_unstable = u_unstable.sub(&u_unstable_half).max_abs();
    Ok(RiccatiSplitting {
        converged: residual_stable <= opts.residual_tol && residual_unstable <= opts.residual_tol,
        u_stable,
        u_unstable,
        frame,
        residual_stable,
        residual_unstable,
        horizon: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    #[test]
    fn constant_curvature_fixed_points() {
        for b in [1.0_f64, 1.3] {
            let m = MetricModel::upper_half_space(3, b);
            let start = PhaseState::new(Point::new(vec![0.1, 0.2, 1.0]), vec![b * 0.6, 0.0, b * 0.8]);
            let split = riccati_splitting(&m, &start, &RiccatiOptions::default()).unwrap();
            assert!(split.converged);
            assert!(split.u_stable.sub(&Mat::identity(2).scale(-b)).max_abs() < 1e-7, "{:?}", split.u_stable);
            assert!(split.u_unstable.sub(&Mat::identity(2).scale(b)).max_abs() < 1e-7);
            assert!(split.u_stable.asymmetry() < 1e-9);
        }
    }

    #[test]
    fn short_horizon_flags_non_convergence() {
        let m = MetricModel::upper_half_space(2, 1.0_f64);
        let start = PhaseState::new(Point::new(vec![0.0, 1.0]), vec![1.0, 0.0]);
        let opts = RiccatiOptions { horizon: 1.0, ..RiccatiOptions::default() };
        let split = riccati_splitting(&m, &start, &opts).unwrap();
        assert!(!split.converged);
        assert!(split.residual_stable > 1e-4);
    }
}
