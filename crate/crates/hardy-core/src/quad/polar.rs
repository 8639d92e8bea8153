//! Single integrals over the group in polar coordinates.
//!
//! Splitting `int_G f` as `int_0^inf int_S f(D_r w) r^{Q-1} dsigma dr`
//! turns every radial or near-radial integrand into a cheap 1-D problem
//! with a precomputed angular rule. The radial window is finite; callers
//! pick `[r_lo, r_hi]` wide enough for their integrand and account for
//! the truncated mass themselves.

use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::AngularRule;
use crate::group::GroupSpec;
use crate::point::Point;
use crate::quad::rule1d::RadialLayout;
use crate::quad::{check_finite, EvalBudget, IntegralResult};

/// Resolution pair for one polar integral. The error bound reported by
/// [`integrate_polar`] is the disagreement between the coarse pass and a
/// pass with the fine angular rule and 3/2 the radial density.
pub struct PolarScheme<'a> {
    pub angular_coarse: &'a AngularRule,
    pub angular_fine: &'a AngularRule,
    pub layout: &'a RadialLayout,
}

/// Integrate `f` over the radial window of the scheme. The integrand
/// receives the evaluation point and its gauge radius.
pub fn integrate_polar<F>(
    group: &GroupSpec,
    scheme: &PolarScheme<'_>,
    f: F,
    budget: &EvalBudget,
) -> Result<IntegralResult>
where
    F: Fn(&Point, f64) -> Result<f64> + Sync,
{
    let coarse = polar_pass(group, scheme.angular_coarse, &scheme.layout.build(), &f, budget)?;
    let fine = polar_pass(
        group,
        scheme.angular_fine,
        &scheme.layout.refined(1.5).build(),
        &f,
        budget,
    )?;
    Ok(IntegralResult {
        value: fine.0,
        error_bound: (fine.0 - coarse.0).abs(),
        evaluations: coarse.1 + fine.1,
    })
}

/// One resolution level of the polar integral.
pub fn polar_pass<F>(
    group: &GroupSpec,
    angular: &AngularRule,
    radial: &crate::quad::rule1d::Rule1D,
    f: &F,
    budget: &EvalBudget,
) -> Result<(f64, u64)>
where
    F: Fn(&Point, f64) -> Result<f64> + Sync,
{
    let evals = (radial.len() * angular.len()) as u64;
    budget.charge(evals)?;
    let q = group.homogeneous_dim();

    let partials: Vec<Result<f64>> = radial
        .nodes
        .par_iter()
        .zip(&radial.weights)
        .map(|(r, wr)| {
            let jac = wr * r.powf(q - 1.0);
            let mut acc = 0.0;
            for (omega, wa) in angular.points.iter().zip(&angular.weights) {
                let x = group.dilate(*r, omega);
                let v = check_finite(f(&x, *r)?, &x)?;
                acc += wa * v;
            }
            Ok(jac * acc)
        })
        .collect();

    let mut total = 0.0;
    for p in partials {
        total += p?;
    }
    Ok((total, evals))
}
