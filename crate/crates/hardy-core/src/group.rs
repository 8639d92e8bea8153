//! Homogeneous group structure on R^N: group law, dilations, Haar measure.
//!
//! A group here is R^N equipped with a polynomial law and a family of
//! dilations `D_lambda(x) = (lambda^{nu_1} x_1, ..., lambda^{nu_N} x_N)`
//! acting by automorphisms. Haar measure is Lebesgue measure and scales as
//! `|D_lambda(S)| = lambda^Q |S|` with homogeneous dimension `Q = sum nu_i`.
//!
//! Two laws are built in:
//! * `Abelian` — componentwise addition, any positive weights `nu`;
//! * `Heisenberg` — N = 3, weights (1, 1, 2), product
//!   `(x . y)_3 = x_3 + y_3 + (x_1 y_2 - x_2 y_1) / 2`.

use crate::error::{Error, Result};
use crate::point::{Point, MAX_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupLaw {
    Abelian,
    Heisenberg,
}

impl GroupLaw {
    pub fn name(&self) -> &'static str {
        match self {
            GroupLaw::Abelian => "abelian",
            GroupLaw::Heisenberg => "heisenberg",
        }
    }
}

/// A homogeneous group: law, dilation weights and derived quantities.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    law: GroupLaw,
    nu: Vec<f64>,
    homogeneous_dim: f64,
}

impl GroupSpec {
    /// Abelian group on R^N with dilation weights `nu` (N = nu.len() <= 3).
    pub fn abelian(nu: &[f64]) -> Result<Self> {
        if nu.is_empty() || nu.len() > MAX_DIM {
            return Err(Error::input(format!(
                "dilation weights must have length 1..={MAX_DIM}, got {}",
                nu.len()
            )));
        }
        if nu.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::input(format!(
                "dilation weights must be positive and finite, got {nu:?}"
            )));
        }
        Ok(GroupSpec {
            law: GroupLaw::Abelian,
            nu: nu.to_vec(),
            homogeneous_dim: nu.iter().sum(),
        })
    }

    /// The first Heisenberg group: N = 3, weights (1, 1, 2), Q = 4.
    pub fn heisenberg() -> Self {
        GroupSpec {
            law: GroupLaw::Heisenberg,
            nu: vec![1.0, 1.0, 2.0],
            homogeneous_dim: 4.0,
        }
    }

    #[inline]
    pub fn law(&self) -> GroupLaw {
        self.law
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.nu.len()
    }

    #[inline]
    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    /// Homogeneous dimension `Q = sum nu_i`.
    #[inline]
    pub fn homogeneous_dim(&self) -> f64 {
        self.homogeneous_dim
    }

    pub fn min_weight(&self) -> f64 {
        self.nu.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_weight(&self) -> f64 {
        self.nu.iter().cloned().fold(0.0, f64::max)
    }

    fn check_dim(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::input(format!(
                "point dimension {} does not match group dimension {}",
                p.dim(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Group product `x . y`.
    #[inline]
    pub fn mul(&self, x: &Point, y: &Point) -> Point {
        debug_assert_eq!(x.dim(), self.dim());
        debug_assert_eq!(y.dim(), self.dim());
        match self.law {
            GroupLaw::Abelian => {
                let mut out = Point::zero(self.dim());
                for i in 0..self.dim() {
                    out.set(i, x.get(i) + y.get(i));
                }
                out
            }
            GroupLaw::Heisenberg => {
                let twist = 0.5 * (x.get(0) * y.get(1) - x.get(1) * y.get(0));
                Point::new(&[
                    x.get(0) + y.get(0),
                    x.get(1) + y.get(1),
                    x.get(2) + y.get(2) + twist,
                ])
            }
        }
    }

    /// Checked variant of [`mul`](Self::mul) for external callers.
    pub fn mul_checked(&self, x: &Point, y: &Point) -> Result<Point> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(self.mul(x, y))
    }

    /// Group inverse. For both built-in laws this is componentwise negation.
    #[inline]
    pub fn inv(&self, x: &Point) -> Point {
        let mut out = Point::zero(x.dim());
        for i in 0..x.dim() {
            out.set(i, -x.get(i));
        }
        out
    }

    /// Dilation `D_lambda(x)`.
    #[inline]
    pub fn dilate(&self, lambda: f64, x: &Point) -> Point {
        debug_assert_eq!(x.dim(), self.dim());
        let mut out = Point::zero(self.dim());
        for i in 0..self.dim() {
            let nu = self.nu[i];
            let scale = if nu == 1.0 {
                lambda
            } else if nu == 2.0 {
                lambda * lambda
            } else {
                lambda.powf(nu)
            };
            out.set(i, scale * x.get(i));
        }
        out
    }

    /// `y^{-1} . x`, the displacement entering every kernel `|y^{-1} x|`.
    #[inline]
    pub fn left_diff(&self, y: &Point, x: &Point) -> Point {
        self.mul(&self.inv(y), x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_product_and_inverse() {
        let g = GroupSpec::heisenberg();
        let x = Point::new(&[1.0, 0.0, 0.0]);
        let y = Point::new(&[0.0, 1.0, 0.0]);
        let xy = g.mul(&x, &y);
        assert_eq!(xy.coords(), &[1.0, 1.0, 0.5]);
        // Non-commutative: y . x has the opposite twist sign.
        let yx = g.mul(&y, &x);
        assert_eq!(yx.coords(), &[1.0, 1.0, -0.5]);
        // x . x^{-1} = identity (exactly, negation is exact).
        let e = g.mul(&x, &g.inv(&x));
        assert_eq!(e.coords(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn dilations_are_automorphisms() {
        let g = GroupSpec::heisenberg();
        let x = Point::new(&[0.3, -1.2, 0.7]);
        let y = Point::new(&[-0.9, 0.25, -2.0]);
        for lambda in [0.37, 1.0, 2.9] {
            let lhs = g.dilate(lambda, &g.mul(&x, &y));
            let rhs = g.mul(&g.dilate(lambda, &x), &g.dilate(lambda, &y));
            for i in 0..3 {
                assert!((lhs.get(i) - rhs.get(i)).abs() <= 1e-12 * (1.0 + rhs.get(i).abs()));
            }
        }
    }

    #[test]
    fn abelian_weights_validated() {
        assert!(GroupSpec::abelian(&[1.0, 2.0]).is_ok());
        assert!(GroupSpec::abelian(&[]).is_err());
        assert!(GroupSpec::abelian(&[1.0, -2.0]).is_err());
        assert!(GroupSpec::abelian(&[1.0, 2.0, 3.0, 4.0]).is_err());
    }

    #[test]
    fn homogeneous_dimension_sums_weights() {
        assert_eq!(GroupSpec::abelian(&[1.0, 2.0]).unwrap().homogeneous_dim(), 3.0);
        assert_eq!(GroupSpec::heisenberg().homogeneous_dim(), 4.0);
    }
}
