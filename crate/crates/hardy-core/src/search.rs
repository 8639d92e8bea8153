//! Derivative-free maximization of a black-box objective over a box.
//!
//! Used to hunt for near-extremal test functions: the objective is a
//! ratio of certified integrals, so evaluations are expensive and only
//! meaningful to within their error bounds. A small Nelder–Mead with
//! clamped coordinates and seeded restarts is deterministic and good
//! enough to support "no violation found" claims. Objectives may fail
//! on inadmissible parameters; failures count as minus infinity and the
//! search moves on.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Reflection / expansion / contraction / shrink coefficients.
const NM_REFLECT: f64 = 1.0;
const NM_EXPAND: f64 = 2.0;
const NM_CONTRACT: f64 = 0.5;
const NM_SHRINK: f64 = 0.5;
/// Convergence: value spread relative to the best, and simplex size.
const NM_VALUE_TOL: f64 = 1e-10;
const NM_SIZE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SearchSpec {
    /// Inclusive per-parameter bounds; proposals are clamped into them.
    pub bounds: Vec<(f64, f64)>,
    /// Independent starts: the box center first, then seeded samples.
    pub restarts: usize,
    /// Total objective-evaluation cap across all restarts.
    pub max_evals: u64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best_value: f64,
    pub best_params: Vec<f64>,
    pub evaluations: u64,
    /// Every restart ended by meeting the tolerances rather than the
    /// evaluation cap.
    pub converged: bool,
    /// Improvements in evaluation order: `(params, value)`.
    pub trace: Vec<(Vec<f64>, f64)>,
}

fn clamp(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, (lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(*lo, *hi);
    }
}

/// Maximize `f` over the box. Deterministic for a fixed spec.
pub fn maximize<F>(spec: &SearchSpec, mut f: F) -> Result<SearchOutcome>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let dim = spec.bounds.len();
    if dim == 0 || dim > 6 {
        return Err(Error::config(format!(
            "search box must have between 1 and 6 parameters, got {dim}"
        )));
    }
    for (i, (lo, hi)) in spec.bounds.iter().enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::config(format!(
                "search bounds for parameter {i} must be finite and ordered, got [{lo}, {hi}]"
            )));
        }
    }
    if spec.restarts == 0 {
        return Err(Error::config("search needs at least one start"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut used = 0u64;
    let mut best_value = f64::NEG_INFINITY;
    let mut best_params = vec![0.0; dim];
    let mut trace: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut converged = true;

    let mut eval = |x: &[f64], used: &mut u64| -> f64 {
        *used += 1;
        match f(x) {
            Ok(v) if v.is_finite() => v,
            _ => f64::NEG_INFINITY,
        }
    };

    for restart in 0..spec.restarts {
        if used >= spec.max_evals {
            converged = false;
            break;
        }
        let start: Vec<f64> = if restart == 0 {
            spec.bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect()
        } else {
            spec.bounds.iter().map(|(lo, hi)| rng.gen_range(*lo..*hi)).collect()
        };

        // Initial simplex: the start plus one step per coordinate.
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        let v0 = eval(&start, &mut used);
        simplex.push((start.clone(), v0));
        for i in 0..dim {
            let (lo, hi) = spec.bounds[i];
            let step = 0.25 * (hi - lo);
            let mut x = start.clone();
            x[i] = if x[i] + step <= hi { x[i] + step } else { x[i] - step };
            let v = eval(&x, &mut used);
            simplex.push((x, v));
        }

        let mut settled = false;
        while used < spec.max_evals {
            simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite or -inf values"));
            let (best, worst) = (simplex[0].1, simplex[dim].1);
            if best > best_value {
                best_value = best;
                best_params.clone_from(&simplex[0].0);
                trace.push((best_params.clone(), best_value));
            }
            let size = simplex[1..]
                .iter()
                .map(|(x, _)| {
                    x.iter()
                        .zip(&simplex[0].0)
                        .zip(&spec.bounds)
                        .map(|((a, b), (lo, hi))| ((a - b) / (hi - lo)).abs())
                        .fold(0.0f64, f64::max)
                })
                .fold(0.0f64, f64::max);
            if best.is_finite()
                && (best - worst).abs() <= NM_VALUE_TOL * (best.abs() + 1e-12)
                && size <= NM_SIZE_TOL
            {
                settled = true;
                break;
            }

            // Centroid of all but the worst vertex.
            let mut centroid = vec![0.0; dim];
            for (x, _) in &simplex[..dim] {
                for (c, v) in centroid.iter_mut().zip(x) {
                    *c += v / dim as f64;
                }
            }
            let towards = |t: f64| -> Vec<f64> {
                let mut x: Vec<f64> = centroid
                    .iter()
                    .zip(&simplex[dim].0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect();
                clamp(&mut x, &spec.bounds);
                x
            };

            let xr = towards(NM_REFLECT);
            let vr = eval(&xr, &mut used);
            if vr > simplex[0].1 {
                let xe = towards(NM_EXPAND);
                let ve = eval(&xe, &mut used);
                simplex[dim] = if ve > vr { (xe, ve) } else { (xr, vr) };
            } else if vr > simplex[dim - 1].1 {
                simplex[dim] = (xr, vr);
            } else {
                let xc = towards(-NM_CONTRACT);
                let vc = eval(&xc, &mut used);
                if vc > simplex[dim].1 {
                    simplex[dim] = (xc, vc);
                } else {
                    // Shrink towards the current best vertex.
                    let anchor = simplex[0].0.clone();
                    for entry in simplex.iter_mut().skip(1) {
                        let mut x: Vec<f64> = entry
                            .0
                            .iter()
                            .zip(&anchor)
                            .map(|(v, a)| a + NM_SHRINK * (v - a))
                            .collect();
                        clamp(&mut x, &spec.bounds);
                        let v = eval(&x, &mut used);
                        *entry = (x, v);
                    }
                }
            }
        }
        if !settled {
            converged = false;
        }
    }

    if !best_value.is_finite() {
        return Err(Error::numeric(
            "search objective failed on every probed parameter set",
        ));
    }
    Ok(SearchOutcome { best_value, best_params, evaluations: used, converged, trace })
}
