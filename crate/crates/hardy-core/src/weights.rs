//! Weight vocabulary: radial power/Gaussian factors, two-point pair
//! weights, and derived radial weights built from ball averages.
//!
//! User-facing weights all live in the grammar
//! `c * rho^b * exp(-d rho^2)` with `c > 0`, `d >= 0`. The grammar is
//! closed under products and real powers, so ball averages and their
//! negative powers either stay inside it (pure powers, computed exactly)
//! or fall back to a cumulative table behind the same interface.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad::radial::{CumTable, RadialFactor};
use crate::space::Space;

/// Log-segments per decade for ball-average tables.
const AVG_TABLE_PER_DECADE: f64 = 8.0;

/// Build a radial weight, rejecting anything outside the supported
/// grammar: positive coefficient, finite power, non-negative decay.
pub fn radial_weight(coeff: f64, power: f64, decay: f64) -> Result<RadialFactor> {
    if !(coeff > 0.0 && coeff.is_finite()) {
        return Err(Error::input(format!("weight coefficient must be positive, got {coeff}")));
    }
    if !power.is_finite() {
        return Err(Error::input(format!("weight power must be finite, got {power}")));
    }
    if !(decay >= 0.0 && decay.is_finite()) {
        return Err(Error::input(format!("weight decay must be >= 0, got {decay}")));
    }
    Ok(RadialFactor { coeff, power, decay })
}

/// A two-point weight `a(x, y) = fx(|x|) fy(|y|) |y^{-1} x|^{diff_power}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairWeight {
    pub x_factor: RadialFactor,
    pub y_factor: RadialFactor,
    pub diff_power: f64,
}

impl PairWeight {
    pub fn one() -> PairWeight {
        PairWeight { x_factor: RadialFactor::one(), y_factor: RadialFactor::one(), diff_power: 0.0 }
    }

    pub fn is_one(&self) -> bool {
        self.x_factor.is_one() && self.y_factor.is_one() && self.diff_power == 0.0
    }

    pub fn new(x_factor: RadialFactor, y_factor: RadialFactor, diff_power: f64) -> Result<Self> {
        if !diff_power.is_finite() {
            return Err(Error::input(format!(
                "displacement power must be finite, got {diff_power}"
            )));
        }
        Ok(PairWeight { x_factor, y_factor, diff_power })
    }
}

/// A radial function derived from the weight grammar: either an exact
/// grammar member or a table-backed closure, behind one interface.
#[derive(Clone)]
pub struct DerivedRadial {
    closed: Option<RadialFactor>,
    func: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for DerivedRadial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.closed {
            Some(c) => write!(f, "DerivedRadial(closed {c:?})"),
            None => write!(f, "DerivedRadial(table)"),
        }
    }
}

impl DerivedRadial {
    pub fn from_factor(factor: RadialFactor) -> DerivedRadial {
        DerivedRadial { closed: Some(factor), func: Arc::new(move |r| factor.eval(r)) }
    }

    pub fn from_fn<F>(f: F) -> DerivedRadial
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        DerivedRadial { closed: None, func: Arc::new(f) }
    }

    pub fn one() -> DerivedRadial {
        DerivedRadial::from_factor(RadialFactor::one())
    }

    /// The exact grammar form, when the derivation stayed closed.
    pub fn closed_form(&self) -> Option<RadialFactor> {
        self.closed
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        (self.func)(r)
    }

    /// Pointwise product, keeping the closed form when both sides have
    /// one.
    pub fn product(&self, other: &DerivedRadial) -> DerivedRadial {
        match (self.closed, other.closed) {
            (Some(a), Some(b)) => DerivedRadial::from_factor(a.product_pow(&b, 1.0)),
            _ => {
                let (f, g) = (self.func.clone(), other.func.clone());
                DerivedRadial { closed: None, func: Arc::new(move |r| f(r) * g(r)) }
            }
        }
    }

    /// Pointwise product with a grammar factor.
    pub fn product_factor(&self, factor: &RadialFactor) -> DerivedRadial {
        self.product(&DerivedRadial::from_factor(*factor))
    }
}

/// Average of `w` over the quasi-ball of radius `r`, as a function of
/// `r`, raised to the power `e` and multiplied by `outer`:
/// `outer(r) * ((1/|B(r)|) int_{B(r)} w(|y|) dy)^e`.
///
/// Pure powers are exact: the average of `c rho^b` is `c Q/(b+Q) r^b`.
/// Decaying factors go through a cumulative table. Factors whose decay
/// is negative (acquired through a negative power of a Gaussian) are
/// refused: their averages grow exponentially and the downstream
/// sharp-constant tables cannot certify that regime.
pub fn ball_average_pow(
    space: &Space,
    w: &RadialFactor,
    e: f64,
    outer: &RadialFactor,
) -> Result<DerivedRadial> {
    let q_hom = space.q_hom();
    if w.power + q_hom <= 0.0 {
        return Err(Error::condition(format!(
            "ball average diverges: radial power {} needs to exceed {}",
            w.power, -q_hom
        )));
    }
    if w.decay < 0.0 {
        return Err(Error::condition(
            "ball average of an exponentially growing factor is outside the certified grammar",
        ));
    }
    if w.decay == 0.0 {
        let avg = RadialFactor {
            coeff: w.coeff * q_hom / (w.power + q_hom),
            power: w.power,
            decay: 0.0,
        };
        return Ok(DerivedRadial::from_factor(outer.product_pow(&avg, e)));
    }
    // Table route: the window upper edge is where the Gaussian has fully
    // decayed; beyond it the tail model contributes nothing and the
    // average continues exactly as Q * mass / r^Q.
    let w_owned = *w;
    let hi = (710.0 / w.decay).sqrt().max(10.0);
    let lo = hi * 1e-9;
    let table = CumTable::new(
        move |t| w_owned.eval(t) * t.powf(q_hom - 1.0),
        lo,
        hi,
        AVG_TABLE_PER_DECADE,
    )?;
    let outer_owned = *outer;
    Ok(DerivedRadial::from_fn(move |r| {
        let avg = q_hom * table.inner(r) / r.powf(q_hom);
        outer_owned.eval(r) * avg.powf(e)
    }))
}
