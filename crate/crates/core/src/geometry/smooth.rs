use crate::gtmetric::SmoothingSpec;
use crate::scalar::Real;

/// Value and first two derivatives of a scalar function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet1<T> {
    pub f: T,
    pub df: T,
    pub d2f: T,
}

/// One-variable profile with analytic derivatives (warp factors and the
/// circumferential function of the cone chart).
#[derive(Debug, Clone, PartialEq)]
pub enum SmoothFunction1D<T> {
    /// `sinh(r)`
    Sinh,
    /// `cosh(rate · r)`
    Cosh { rate: T },
    /// Constant value; only used for flat test doubles.
    Constant(T),
    /// Smoothed cone profile interpolating `sinh` and `k·sinh`.
    Smoothed(SmoothingSpec<T>),
}

impl<T: Real> SmoothFunction1D<T> {
    pub fn cosh() -> Self {
        Self::Cosh { rate: T::one() }
    }

    pub fn jet(&self, r: T) -> Jet1<T> {
        match self {
            Self::Sinh => Jet1 { f: r.sinh(), df: r.cosh(), d2f: r.sinh() },
            Self::Cosh { rate } => {
                let a = *rate;
                let (s, c) = ((a * r).sinh(), (a * r).cosh());
                Jet1 { f: c, df: a * s, d2f: a * a * c }
            }
            Self::Constant(c) => Jet1 { f: *c, df: T::zero(), d2f: T::zero() },
            Self::Smoothed(spec) => spec.sigma_jet(r),
        }
    }

    pub fn value(&self, r: T) -> T {
        self.jet(r).f
    }
}
