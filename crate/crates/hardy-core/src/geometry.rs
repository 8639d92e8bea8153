//! Quasi-ball volumes, sphere measure and angular quadrature rules.
//!
//! Polar decomposition: for integrable `f`,
//! `int_G f = int_0^inf int_S f(D_r w) r^{Q-1} dsigma(w) dr`,
//! where `S = {|w| = 1}` and `sigma` is the unique Radon measure making the
//! identity hold. Consequently `|B(0, r)| = sigma(S) r^Q / Q`, so the total
//! sphere measure equals `Q` times the unit ball volume.
//!
//! The unit ball volume is computed by Cartesian quadrature over the
//! bounding box `[-1, 1]^N`: the innermost axis section of every built-in
//! gauge is an interval of known length, and the remaining axes use
//! endpoint-graded Gauss panels (root singularities sit exactly at section
//! boundaries). This avoids parametrizing non-smooth quasi-spheres.
//!
//! Angular rules discretize `sigma` directly. Writing a point of the sphere
//! as `w(e) = D_{1/t(e)} e` with `e` on the Euclidean sphere and `t = |e|`,
//! the Jacobian of `(r, angles) -> D_r w` factors as `r^{Q-1} j(angles)`
//! with a density whose `t'`-terms cancel identically:
//!
//! * N = 1: two atoms at +-1 with weight `nu_1` each;
//! * N = 2: `j(theta) = (nu_1 cos^2 + nu_2 sin^2) / t(theta)^Q`;
//! * N = 3: `j(theta, phi) = sin(phi) (sum_i nu_i e_i^2) / t(e)^Q`.
//!
//! The checks in this module compare the independent ball-volume and
//! angular-sum routes; they must agree to `ANGULAR_MATCH_RTOL`.

use crate::error::Result;
use crate::group::GroupSpec;
use crate::point::Point;
use crate::qnorm::{QuasiNormKind, QuasiNormSpec};
use crate::quad::rule1d::{segment_rule, uniform_rule};
use crate::quad::{EvalBudget, IntegralResult};

/// Required relative agreement between the angular-weight sum and the
/// sphere measure computed from the ball volume.
pub const ANGULAR_MATCH_RTOL: f64 = 1e-6;

/// Grading levels toward section boundaries in the ball-volume quadrature.
const SECTION_GRADE_LEVELS: usize = 7;

/// Lebesgue volume of the unit quasi-ball `{ |x| < 1 }`.
///
/// `panels` controls the per-axis resolution; the error bound is the
/// disagreement with a refinement by 3/2.
pub fn unit_ball_volume(
    group: &GroupSpec,
    qnorm: &QuasiNormSpec,
    panels: usize,
    budget: &EvalBudget,
) -> Result<IntegralResult> {
    let coarse = ball_volume_pass(group, qnorm, panels, budget)?;
    let fine = ball_volume_pass(group, qnorm, panels * 3 / 2, budget)?;
    Ok(IntegralResult {
        value: fine.0,
        error_bound: (fine.0 - coarse.0).abs(),
        evaluations: coarse.1 + fine.1,
    })
}

/// One resolution level of the nested-section volume integral.
fn ball_volume_pass(
    group: &GroupSpec,
    qnorm: &QuasiNormSpec,
    panels: usize,
    budget: &EvalBudget,
) -> Result<(f64, u64)> {
    let dim = group.dim();
    match dim {
        1 => {
            // The unit ball is (-1, 1) for every admissible 1-D gauge.
            Ok((2.0, 0))
        }
        2 => {
            let rule = segment_rule(-1.0, 1.0, panels, 8, SECTION_GRADE_LEVELS, SECTION_GRADE_LEVELS);
            budget.charge(rule.len() as u64)?;
            let v = rule.apply(|x1| section_length(group, qnorm, &[x1]));
            Ok((v, rule.len() as u64))
        }
        _ => {
            let outer = segment_rule(-1.0, 1.0, panels, 8, SECTION_GRADE_LEVELS, SECTION_GRADE_LEVELS);
            let mut evals = 0u64;
            let mut v = 0.0;
            for (x1, w1) in outer.nodes.iter().zip(&outer.weights) {
                let b = coord_bound(qnorm, &[*x1]);
                if b <= 0.0 {
                    continue;
                }
                let inner =
                    segment_rule(-b, b, panels, 8, SECTION_GRADE_LEVELS, SECTION_GRADE_LEVELS);
                budget.charge(inner.len() as u64)?;
                evals += inner.len() as u64;
                let slice = inner.apply(|x2| section_length(group, qnorm, &[*x1, x2]));
                v += w1 * slice;
            }
            Ok((v, evals))
        }
    }
}

/// Length of the final-axis section `{ u : |(prefix, u)| < 1 }`.
///
/// All built-in gauges are even and strictly increasing in the last
/// coordinate's absolute value, so the section is an interval `(-u*, u*)`.
fn section_length(group: &GroupSpec, qnorm: &QuasiNormSpec, prefix: &[f64]) -> f64 {
    let nu = group.nu();
    let last = group.dim() - 1;
    debug_assert_eq!(prefix.len(), last);
    match qnorm.kind() {
        QuasiNormKind::Euclidean => {
            let b = 1.0 - prefix.iter().map(|c| c * c).sum::<f64>();
            if b <= 0.0 {
                0.0
            } else {
                2.0 * b.sqrt()
            }
        }
        QuasiNormKind::AnisoMax => {
            if prefix
                .iter()
                .zip(nu)
                .all(|(c, nu_i)| c.abs().powf(1.0 / nu_i) < 1.0)
            {
                2.0
            } else {
                0.0
            }
        }
        QuasiNormKind::AnisoSmooth => {
            let e = qnorm.smooth_exponents();
            let b = 1.0
                - prefix
                    .iter()
                    .zip(e)
                    .map(|(c, ei)| c.abs().powf(*ei))
                    .sum::<f64>();
            if b <= 0.0 {
                0.0
            } else {
                2.0 * b.powf(1.0 / e[last])
            }
        }
        QuasiNormKind::Koranyi => {
            let rho2 = prefix.iter().map(|c| c * c).sum::<f64>();
            let b = 1.0 - rho2 * rho2;
            if b <= 0.0 {
                0.0
            } else {
                2.0 * b.sqrt()
            }
        }
    }
}

/// Bound on coordinate `prefix.len()` so the section stays non-empty.
fn coord_bound(qnorm: &QuasiNormSpec, prefix: &[f64]) -> f64 {
    let k = prefix.len();
    match qnorm.kind() {
        QuasiNormKind::Euclidean => {
            let b = 1.0 - prefix.iter().map(|c| c * c).sum::<f64>();
            if b <= 0.0 {
                0.0
            } else {
                b.sqrt()
            }
        }
        QuasiNormKind::AnisoMax => 1.0,
        QuasiNormKind::AnisoSmooth => {
            let e = qnorm.smooth_exponents();
            let b = 1.0
                - prefix
                    .iter()
                    .zip(e)
                    .map(|(c, ei)| c.abs().powf(*ei))
                    .sum::<f64>();
            if b <= 0.0 {
                0.0
            } else {
                b.powf(1.0 / e[k])
            }
        }
        // Koranyi: the (x1, x2) base region is the Euclidean unit disc.
        QuasiNormKind::Koranyi => {
            let b = 1.0 - prefix.iter().map(|c| c * c).sum::<f64>();
            if b <= 0.0 {
                0.0
            } else {
                b.sqrt()
            }
        }
    }
}

/// Discretization of the sphere measure `sigma`: points on the unit
/// quasi-sphere with positive weights summing to `sigma(S)`.
#[derive(Debug, Clone)]
pub struct AngularRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    /// For N = 3 rules: number of distinct theta nodes per phi node,
    /// used by callers exploiting axial symmetry. 0 otherwise.
    pub theta_per_phi: usize,
    /// For N = 3 rules: polar angle of each point (same length as
    /// `points`). Empty otherwise.
    pub phis: Vec<f64>,
}

impl AngularRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Replace the rule by a single representative direction carrying the
    /// whole sphere measure. Valid when the integrand is known to be
    /// constant on the quasi-sphere (rotation-invariant data on an
    /// isotropic space).
    pub fn collapse_full(&self, group: &GroupSpec) -> AngularRule {
        let mut e = vec![0.0; group.dim()];
        e[0] = 1.0;
        AngularRule {
            points: vec![Point::new(&e)],
            weights: vec![self.weight_sum()],
            theta_per_phi: 0,
            phis: Vec::new(),
        }
    }

    /// Aggregate the azimuthal nodes of an N = 3 rule, keeping one
    /// representative per polar angle. Valid when the integrand is
    /// invariant under rotations about the third axis.
    pub fn collapse_axial(&self, group: &GroupSpec, qnorm: &QuasiNormSpec) -> AngularRule {
        assert!(self.theta_per_phi > 0, "axial collapse needs an N = 3 tensor rule");
        let blocks = self.len() / self.theta_per_phi;
        let mut points = Vec::with_capacity(blocks);
        let mut weights = Vec::with_capacity(blocks);
        let mut phis = Vec::with_capacity(blocks);
        for b in 0..blocks {
            let lo = b * self.theta_per_phi;
            let hi = lo + self.theta_per_phi;
            let phi = self.phis[lo];
            let e = Point::new(&[phi.sin(), 0.0, phi.cos()]);
            let (omega, _) = sphere_point(group, qnorm, &e);
            points.push(omega);
            weights.push(self.weights[lo..hi].iter().sum());
            phis.push(phi);
        }
        AngularRule { points, weights, theta_per_phi: 1, phis }
    }
}

/// Node counts and panel order for an angular rule.
#[derive(Debug, Clone, Copy)]
pub struct AngularResolution {
    /// N = 2: Gauss panels per smooth segment of each quadrant.
    pub seg_panels: usize,
    /// N = 3: Gauss panels across the polar range `[0, pi]`.
    pub phi_panels: usize,
    /// N = 3: Gauss panels per azimuthal quadrant.
    pub theta_panels_per_quadrant: usize,
    /// Gauss order within each panel.
    pub order: usize,
}

impl AngularResolution {
    /// The reference resolution used for sphere-measure computations. The
    /// max gauge gets extra nodes because its kink set in 3-D is not
    /// axis-aligned.
    pub fn reference(level: usize, qnorm: &QuasiNormSpec) -> AngularResolution {
        let level = level.max(1);
        let kf = if qnorm.kind() == QuasiNormKind::AnisoMax { 4 } else { 1 };
        AngularResolution {
            seg_panels: 3 * level,
            phi_panels: 4 * level * kf,
            theta_panels_per_quadrant: 2 * level * kf,
            order: 8,
        }
    }

    /// A deliberately coarse resolution for inner loops of double
    /// integrals, where the angular factor is smooth on the scale of a
    /// panel and the cost is dominated by the node count.
    pub fn coarse(level: usize, qnorm: &QuasiNormSpec) -> AngularResolution {
        let level = level.max(1);
        let kf = if qnorm.kind() == QuasiNormKind::AnisoMax { 2 } else { 1 };
        AngularResolution {
            seg_panels: level * kf,
            phi_panels: (2 * level + 1) * kf,
            theta_panels_per_quadrant: level * kf,
            order: 4,
        }
    }
}

/// Build an angular rule at a given refinement `level` (>= 1).
///
/// Node counts scale linearly with `level`. Kink directions of the max
/// gauge are panel edges in 2-D; in 3-D they are handled by resolution.
pub fn angular_rule(
    group: &GroupSpec,
    qnorm: &QuasiNormSpec,
    level: usize,
) -> Result<AngularRule> {
    angular_rule_with(group, qnorm, &AngularResolution::reference(level, qnorm))
}

/// Build an angular rule at an explicit resolution.
pub fn angular_rule_with(
    group: &GroupSpec,
    qnorm: &QuasiNormSpec,
    res: &AngularResolution,
) -> Result<AngularRule> {
    match group.dim() {
        1 => {
            let nu = group.nu()[0];
            Ok(AngularRule {
                points: vec![Point::new(&[1.0]), Point::new(&[-1.0])],
                weights: vec![nu, nu],
                theta_per_phi: 0,
                phis: Vec::new(),
            })
        }
        2 => angular_rule_2d(group, qnorm, res.seg_panels, res.order),
        _ => angular_rule_3d(group, qnorm, res),
    }
}

fn sphere_point(group: &GroupSpec, qnorm: &QuasiNormSpec, e: &Point) -> (Point, f64) {
    let t = qnorm.eval(group, e);
    (group.dilate(1.0 / t, e), t)
}

fn angular_rule_2d(
    group: &GroupSpec,
    qnorm: &QuasiNormSpec,
    panels_per_seg: usize,
    order: usize,
) -> Result<AngularRule> {
    let nu = group.nu();
    let q = group.homogeneous_dim();
    // The max gauge switches branches where |cos|^{1/nu_1} = |sin|^{1/nu_2};
    // locate the switch in the first quadrant by bisection. In odd quadrants
    // |cos| and |sin| swap roles, mirroring the kink to pi/2 - theta*.
    let kink = if qnorm.kind() == QuasiNormKind::AnisoMax {
        let f = |th: f64| th.cos().powf(1.0 / nu[0]) - th.sin().powf(1.0 / nu[1]);
        let (mut a, mut b) = (1e-12, std::f64::consts::FRAC_PI_2 - 1e-12);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        Some(0.5 * (a + b))
    } else {
        None
    };

    let mut points = Vec::new();
    let mut weights = Vec::new();
    for quadrant in 0..4 {
        let base = quadrant as f64 * std::f64::consts::FRAC_PI_2;
        let mut edges = vec![0.0, std::f64::consts::FRAC_PI_2];
        if let Some(k) = kink {
            edges.insert(1, if quadrant % 2 == 0 { k } else { std::f64::consts::FRAC_PI_2 - k });
        }
        for seg in edges.windows(2) {
            let rule = uniform_rule(base + seg[0], base + seg[1], panels_per_seg, order);
            for (theta, w) in rule.nodes.iter().zip(&rule.weights) {
                let e = Point::new(&[theta.cos(), theta.sin()]);
                let (omega, t) = sphere_point(group, qnorm, &e);
                let density =
                    (nu[0] * e.get(0) * e.get(0) + nu[1] * e.get(1) * e.get(1)) / t.powf(q);
                points.push(omega);
                weights.push(w * density);
            }
        }
    }
    Ok(AngularRule { points, weights, theta_per_phi: 0, phis: Vec::new() })
}

fn angular_rule_3d(
    group: &GroupSpec,
    qnorm: &QuasiNormSpec,
    res: &AngularResolution,
) -> Result<AngularRule> {
    let nu = group.nu();
    let q = group.homogeneous_dim();
    // Tensor rule: Gauss panels in phi (polar) and theta (azimuth).
    let phi_rule = uniform_rule(0.0, std::f64::consts::PI, res.phi_panels, res.order);
    let mut theta_rule = crate::quad::rule1d::Rule1D::default();
    for quadrant in 0..4 {
        let a = quadrant as f64 * std::f64::consts::FRAC_PI_2;
        let r = uniform_rule(
            a,
            a + std::f64::consts::FRAC_PI_2,
            res.theta_panels_per_quadrant,
            res.order,
        );
        theta_rule.nodes.extend(r.nodes);
        theta_rule.weights.extend(r.weights);
    }

    let mut points = Vec::with_capacity(phi_rule.len() * theta_rule.len());
    let mut weights = Vec::with_capacity(points.capacity());
    let mut phis = Vec::with_capacity(points.capacity());
    // phi outermost so theta nodes for one phi are contiguous.
    for (phi, wp) in phi_rule.nodes.iter().zip(&phi_rule.weights) {
        let (sp, cp) = (phi.sin(), phi.cos());
        for (theta, wt) in theta_rule.nodes.iter().zip(&theta_rule.weights) {
            let e = Point::new(&[sp * theta.cos(), sp * theta.sin(), cp]);
            let (omega, t) = sphere_point(group, qnorm, &e);
            let mix: f64 = (0..3).map(|i| nu[i] * e.get(i) * e.get(i)).sum();
            points.push(omega);
            weights.push(wp * wt * sp * mix / t.powf(q));
            phis.push(*phi);
        }
    }
    Ok(AngularRule { points, weights, theta_per_phi: theta_rule.len(), phis })
}
