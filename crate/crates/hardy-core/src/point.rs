//! Fixed-capacity points for dimensions 1..=3.
//!
//! All hot loops (group products, gauge evaluations, quadrature nodes)
//! operate on stack values; `MAX_DIM` bounds the supported dimension.

pub const MAX_DIM: usize = 3;

/// A point of the underlying vector space, dimension `dim <= MAX_DIM`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; MAX_DIM],
    dim: usize,
}

impl Point {
    #[inline]
    pub fn new(coords: &[f64]) -> Self {
        debug_assert!(!coords.is_empty() && coords.len() <= MAX_DIM);
        let mut c = [0.0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Point { coords: c, dim: coords.len() }
    }

    #[inline]
    pub fn zero(dim: usize) -> Self {
        Point { coords: [0.0; MAX_DIM], dim }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        debug_assert!(i < self.dim);
        self.coords[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: f64) {
        debug_assert!(i < self.dim);
        self.coords[i] = v;
    }

    /// Euclidean norm, used for Lipschitz estimates and sampling only.
    #[inline]
    pub fn euclid_norm(&self) -> f64 {
        self.coords()
            .iter()
            .map(|c| c * c)
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|c| c.is_finite())
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
