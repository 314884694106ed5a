use crate::scalar::Real;

/// A point given by its chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<T> {
    pub coords: Vec<T>,
}

impl<T: Real> Point<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Self { coords }
    }

    pub fn from_f64(coords: &[f64]) -> Self {
        Self { coords: coords.iter().map(|&x| T::lit(x)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl<T> From<Vec<T>> for Point<T> {
    fn from(coords: Vec<T>) -> Self {
        Self { coords }
    }
}

/// Tangent vector in the coordinate basis at `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector<T> {
    pub base: Point<T>,
    pub components: Vec<T>,
}

impl<T: Real> TangentVector<T> {
    pub fn new(base: Point<T>, components: Vec<T>) -> Self {
        Self { base, components }
    }

    pub fn zero(base: Point<T>) -> Self {
        let n = base.dim();
        Self { base, components: vec![T::zero(); n] }
    }
}

/// Two tangent vectors at a common base point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentPlane<T> {
    pub base: Point<T>,
    pub u: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Real> TangentPlane<T> {
    pub fn new(base: Point<T>, u: Vec<T>, v: Vec<T>) -> Self {
        Self { base, u, v }
    }

    /// Plane spanned by the coordinate directions `i` and `j`.
    pub fn coordinate(base: Point<T>, i: usize, j: usize) -> Self {
        let n = base.dim();
        let mut u = vec![T::zero(); n];
        let mut v = vec![T::zero(); n];
        u[i] = T::one();
        v[j] = T::one();
        Self { base, u, v }
    }
}
