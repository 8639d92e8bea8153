//! Quadrature building blocks: Cartesian boxes, polar decomposition,
//! radial cumulative tables and the double singular integral.
//!
//! Every integrator returns an [`IntegralResult`] with a two-refinement
//! error estimate plus any analytically bounded truncation terms, and
//! charges an [`EvalBudget`] so runaway configurations fail loudly
//! instead of spinning.

pub mod cartesian;
pub mod gagliardo;
pub mod gauss;
pub mod polar;
pub mod radial;
pub mod rule1d;

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Value of a numerical integral together with an error estimate
/// (refinement disagreement plus analytic truncation bounds) and the
/// number of integrand evaluations spent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub error_bound: f64,
    pub evaluations: u64,
}

impl IntegralResult {
    pub fn exact(value: f64) -> Self {
        IntegralResult { value, error_bound: 0.0, evaluations: 0 }
    }
}

/// Shared, thread-safe evaluation budget.
///
/// Counts are exact (every integrand call is charged), so totals are
/// deterministic regardless of thread interleaving.
#[derive(Debug)]
pub struct EvalBudget {
    max: u64,
    used: AtomicU64,
}

impl EvalBudget {
    pub fn new(max: u64) -> Self {
        EvalBudget { max, used: AtomicU64::new(0) }
    }

    /// Effectively unlimited budget for internal bootstrap computations.
    pub fn unlimited() -> Self {
        EvalBudget::new(u64::MAX)
    }

    /// Charge `n` evaluations, failing once the budget is exhausted.
    pub fn charge(&self, n: u64) -> Result<()> {
        let before = self.used.fetch_add(n, Ordering::Relaxed);
        if before.saturating_add(n) > self.max {
            return Err(Error::numeric(format!(
                "evaluation budget exceeded ({} allowed)",
                self.max
            )));
        }
        Ok(())
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }
}

/// Guard for integrand values: non-finite results abort the quadrature
/// with the offending point attached.
#[inline]
pub(crate) fn check_finite(v: f64, point: &crate::point::Point) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::numeric_at("integrand returned a non-finite value", point.coords()))
    }
}
