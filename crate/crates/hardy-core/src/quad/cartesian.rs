//! Tensor-product Cartesian quadrature over axis-aligned boxes (dim <= 3).
//!
//! Composite Gauss-Legendre panels per axis. The error bound is the
//! disagreement between the requested grid and one uniform refinement,
//! which is reliable for the smooth and piecewise-smooth integrands used
//! here (indicators converge too, just slowly; callers pick panel counts).

use rayon::prelude::*;

use super::rule1d::{uniform_rule, Rule1D};
use super::{check_finite, EvalBudget, IntegralResult};
use crate::error::Result;
use crate::point::Point;

/// Parameters for one Cartesian pass.
#[derive(Debug, Clone, Copy)]
pub struct CartesianScheme {
    pub panels_per_axis: usize,
    pub order: usize,
    /// Refinement factor for the error estimate; 0 disables the second pass.
    pub refine: usize,
}

impl Default for CartesianScheme {
    fn default() -> Self {
        CartesianScheme { panels_per_axis: 48, order: 4, refine: 2 }
    }
}

/// Integrate `f` over the box given by `bounds` (one `(lo, hi)` per axis).
pub fn integrate_cartesian(
    f: &(dyn Fn(&Point) -> f64 + Sync),
    bounds: &[(f64, f64)],
    scheme: &CartesianScheme,
    budget: &EvalBudget,
) -> Result<IntegralResult> {
    if bounds.is_empty() || bounds.len() > crate::point::MAX_DIM {
        return Err(crate::error::Error::input(format!(
            "cartesian box must have 1..=3 axes, got {}",
            bounds.len()
        )));
    }
    for (lo, hi) in bounds {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(crate::error::Error::input(format!(
                "invalid box axis [{lo}, {hi}]"
            )));
        }
    }
    let coarse = tensor_pass(f, bounds, scheme.panels_per_axis, scheme.order, budget)?;
    if scheme.refine < 2 {
        return Ok(IntegralResult {
            value: coarse.0,
            error_bound: f64::NAN,
            evaluations: coarse.1,
        });
    }
    let fine = tensor_pass(
        f,
        bounds,
        scheme.panels_per_axis * scheme.refine,
        scheme.order,
        budget,
    )?;
    Ok(IntegralResult {
        value: fine.0,
        error_bound: (fine.0 - coarse.0).abs(),
        evaluations: coarse.1 + fine.1,
    })
}

fn tensor_pass(
    f: &(dyn Fn(&Point) -> f64 + Sync),
    bounds: &[(f64, f64)],
    panels: usize,
    order: usize,
    budget: &EvalBudget,
) -> Result<(f64, u64)> {
    let rules: Vec<Rule1D> = bounds
        .iter()
        .map(|(lo, hi)| uniform_rule(*lo, *hi, panels, order))
        .collect();
    let total: u64 = rules.iter().map(|r| r.len() as u64).product();
    budget.charge(total)?;

    let dim = bounds.len();
    let outer = &rules[0];
    // Parallelize over the outer axis; inner sums are sequential and the
    // final reduction follows index order, so results are deterministic.
    let partials: Vec<Result<f64>> = outer
        .nodes
        .par_iter()
        .zip(outer.weights.par_iter())
        .map(|(x0, w0)| -> Result<f64> {
            let mut acc = 0.0;
            match dim {
                1 => {
                    let p = Point::new(&[*x0]);
                    acc = check_finite(f(&p), &p)?;
                }
                2 => {
                    for (x1, w1) in rules[1].nodes.iter().zip(&rules[1].weights) {
                        let p = Point::new(&[*x0, *x1]);
                        acc += w1 * check_finite(f(&p), &p)?;
                    }
                }
                _ => {
                    for (x1, w1) in rules[1].nodes.iter().zip(&rules[1].weights) {
                        let mut inner = 0.0;
                        for (x2, w2) in rules[2].nodes.iter().zip(&rules[2].weights) {
                            let p = Point::new(&[*x0, *x1, *x2]);
                            inner += w2 * check_finite(f(&p), &p)?;
                        }
                        acc += w1 * inner;
                    }
                }
            }
            Ok(w0 * acc)
        })
        .collect();

    let mut sum = 0.0;
    for p in partials {
        sum += p?;
    }
    Ok((sum, total))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_integral_2d() {
        // int exp(-|x|^2) over R^2 = pi; the box [-8, 8]^2 truncates far
        // below the quadrature error.
        let budget = EvalBudget::unlimited();
        let f = |p: &Point| (-p.coords().iter().map(|c| c * c).sum::<f64>()).exp();
        let r = integrate_cartesian(
            &f,
            &[(-8.0, 8.0), (-8.0, 8.0)],
            &CartesianScheme::default(),
            &budget,
        )
        .unwrap();
        assert!(
            (r.value - std::f64::consts::PI).abs() < 1e-4,
            "got {} (err bound {})",
            r.value,
            r.error_bound
        );
        assert!(r.error_bound < 1e-4);
    }

    #[test]
    fn non_finite_integrand_reports_point() {
        let budget = EvalBudget::unlimited();
        let f = |p: &Point| 1.0 / p.get(0);
        // 1/x is evaluated at Gauss nodes only, so force a NaN instead.
        let g = |p: &Point| if p.get(0) > 0.0 { f64::NAN } else { f(p) };
        let err = integrate_cartesian(
            &g,
            &[(-1.0, 1.0)],
            &CartesianScheme { panels_per_axis: 4, order: 2, refine: 0 },
            &budget,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("non-finite") && msg.contains("at point"), "{msg}");
    }

    #[test]
    fn budget_is_enforced() {
        let budget = EvalBudget::new(10);
        let f = |_: &Point| 1.0;
        let err = integrate_cartesian(
            &f,
            &[(0.0, 1.0), (0.0, 1.0)],
            &CartesianScheme { panels_per_axis: 8, order: 4, refine: 0 },
            &budget,
        )
        .unwrap_err();
        assert!(err.to_string().contains("budget"), "{err}");
    }
}
