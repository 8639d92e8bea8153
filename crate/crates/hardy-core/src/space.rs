//! A group/gauge pair with verified, cached quadrature data.
//!
//! [`Space`] is the handle everything downstream works through. Building
//! one computes the unit-ball volume and the angular rule for the chosen
//! gauge and cross-checks them: the total weight of the surface rule must
//! reproduce `Q |B|`, which ties two independently-built discretizations
//! of the same measure to each other. Construction fails rather than
//! handing out rules that disagree.

use crate::error::{Error, Result};
use crate::geometry::{
    angular_rule_with, unit_ball_volume, AngularResolution, AngularRule, ANGULAR_MATCH_RTOL,
};
use crate::group::{GroupLaw, GroupSpec};
use crate::point::Point;
use crate::qnorm::{QuasiNormKind, QuasiNormSpec};
use crate::quad::gagliardo::DoubleRules;
use crate::quad::polar::{integrate_polar, PolarScheme};
use crate::quad::rule1d::RadialLayout;
use crate::quad::{EvalBudget, IntegralResult};

/// Starting per-axis panel count for the ball-volume integral.
const VOLUME_PANELS: usize = 24;

/// How the outer sphere of a double integral can be collapsed for
/// rotation-invariant data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuterSymmetry {
    /// The inner integral is constant on the quasi-sphere: one outer node.
    Full,
    /// Invariance under rotations about the third axis: one node per
    /// polar angle.
    Axial,
    /// No symmetry; the full tensor rule is used on both spheres.
    General,
}

/// Owned angular rules for one double integral, wired for the symmetry
/// of the data.
pub struct DoubleRuleSet {
    pub inner: AngularRule,
    pub inner_fine: AngularRule,
    pub outer: AngularRule,
    pub outer_fine: AngularRule,
    pub probe_inner: bool,
}

impl DoubleRuleSet {
    /// Borrow in the form the double integrator takes.
    pub fn rules(&self) -> DoubleRules<'_> {
        DoubleRules {
            inner: &self.inner,
            inner_fine: &self.inner_fine,
            outer: &self.outer,
            outer_fine: &self.outer_fine,
            probe_inner: self.probe_inner,
        }
    }
}

/// A homogeneous group with a fixed quasi-norm and verified sphere data.
pub struct Space {
    group: GroupSpec,
    qnorm: QuasiNormSpec,
    ball_volume: f64,
    ball_volume_error: f64,
    sphere_measure: f64,
    angular_fine: AngularRule,
    angular_coarse: AngularRule,
    inner_coarse: AngularRule,
    inner_fine: AngularRule,
}

impl Space {
    /// Build the space, escalating resolution until the surface rule and
    /// the volume integral agree to [`ANGULAR_MATCH_RTOL`].
    pub fn new(group: GroupSpec, kind: QuasiNormKind) -> Result<Space> {
        let qnorm = QuasiNormSpec::new(kind, &group)?;
        let budget = EvalBudget::unlimited();
        let q_hom = group.homogeneous_dim();

        let mut level = 2usize;
        let mut panels = VOLUME_PANELS;
        loop {
            let vol = unit_ball_volume(&group, &qnorm, panels, &budget)?;
            let fine =
                angular_rule_with(&group, &qnorm, &AngularResolution::reference(level, &qnorm))?;
            let sphere = q_hom * vol.value;
            let gap = (fine.weight_sum() - sphere).abs();
            if gap <= ANGULAR_MATCH_RTOL * sphere {
                let coarse = angular_rule_with(
                    &group,
                    &qnorm,
                    &AngularResolution::reference(level - 1, &qnorm),
                )?;
                let inner_coarse =
                    angular_rule_with(&group, &qnorm, &AngularResolution::coarse(1, &qnorm))?;
                let inner_fine =
                    angular_rule_with(&group, &qnorm, &AngularResolution::coarse(2, &qnorm))?;
                return Ok(Space {
                    group,
                    qnorm,
                    ball_volume: vol.value,
                    ball_volume_error: vol.error_bound + gap / q_hom,
                    sphere_measure: fine.weight_sum(),
                    angular_fine: fine,
                    angular_coarse: coarse,
                    inner_coarse,
                    inner_fine,
                });
            }
            if level >= 5 {
                return Err(Error::condition(format!(
                    "surface rule and ball volume disagree beyond level {level}: \
                     {} vs {} (rel {:.3e})",
                    fine.weight_sum(),
                    sphere,
                    gap / sphere,
                )));
            }
            level += 1;
            panels = panels * 3 / 2;
        }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn qnorm(&self) -> &QuasiNormSpec {
        &self.qnorm
    }

    pub fn dim(&self) -> usize {
        self.group.dim()
    }

    /// Homogeneous dimension `Q`.
    pub fn q_hom(&self) -> f64 {
        self.group.homogeneous_dim()
    }

    /// Measure of the unit quasi-sphere under the polar decomposition.
    pub fn sphere_measure(&self) -> f64 {
        self.sphere_measure
    }

    /// Lebesgue volume of the unit quasi-ball.
    pub fn ball_volume(&self) -> f64 {
        self.ball_volume
    }

    pub fn ball_volume_error(&self) -> f64 {
        self.ball_volume_error
    }

    /// Volume of the quasi-ball of radius `r`.
    pub fn ball_volume_at(&self, r: f64) -> f64 {
        self.ball_volume * r.powf(self.q_hom())
    }

    pub fn gauge(&self, x: &Point) -> f64 {
        self.qnorm.eval(&self.group, x)
    }

    /// Certified quasi-triangle constant of the gauge.
    pub fn ctri(&self) -> f64 {
        self.qnorm.certified_ctri()
    }

    /// The reference angular rule (used by polar integration fine passes).
    pub fn angular_fine(&self) -> &AngularRule {
        &self.angular_fine
    }

    /// Integrate a radial function: `sigma int f(r) r^{Q-1} dr` over the
    /// layout window, with the error taken from a 3/2 radial refinement.
    pub fn radial_integral<F>(
        &self,
        layout: &RadialLayout,
        f: F,
        budget: &EvalBudget,
    ) -> Result<IntegralResult>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let qm1 = self.q_hom() - 1.0;
        let pass = |rule: &crate::quad::rule1d::Rule1D| -> Result<(f64, u64)> {
            budget.charge(rule.len() as u64)?;
            let mut acc = 0.0;
            for (r, w) in rule.nodes.iter().zip(&rule.weights) {
                acc += w * r.powf(qm1) * f(*r)?;
            }
            Ok((self.sphere_measure * acc, rule.len() as u64))
        };
        let coarse = pass(&layout.build())?;
        let fine = pass(&layout.refined(1.5).build())?;
        Ok(IntegralResult {
            value: fine.0,
            error_bound: (fine.0 - coarse.0).abs(),
            evaluations: coarse.1 + fine.1,
        })
    }

    /// Integrate a general function in polar form over the layout window.
    pub fn polar_integral<F>(
        &self,
        layout: &RadialLayout,
        f: F,
        budget: &EvalBudget,
    ) -> Result<IntegralResult>
    where
        F: Fn(&Point, f64) -> Result<f64> + Sync,
    {
        let scheme = PolarScheme {
            angular_coarse: &self.angular_coarse,
            angular_fine: &self.angular_fine,
            layout,
        };
        integrate_polar(&self.group, &scheme, f, budget)
    }

    /// The outer-sphere symmetry available for data with the given
    /// rotational invariance.
    pub fn outer_symmetry(&self, radial_data: bool) -> OuterSymmetry {
        if !radial_data {
            return OuterSymmetry::General;
        }
        if self.dim() == 1 {
            return OuterSymmetry::Full;
        }
        match (self.group.law(), self.qnorm.kind()) {
            (GroupLaw::Abelian, QuasiNormKind::Euclidean) => OuterSymmetry::Full,
            (GroupLaw::Heisenberg, QuasiNormKind::Koranyi) => OuterSymmetry::Axial,
            _ => OuterSymmetry::General,
        }
    }

    /// Angular rules for a double integral over this space.
    ///
    /// Collapsed outer rules are exact for the symmetry they encode, so
    /// the remaining angular error lives on the inner sphere and is
    /// estimated by probes instead of a full fine pass.
    pub fn double_rule_set(&self, radial_data: bool) -> DoubleRuleSet {
        let inner = self.inner_coarse.clone();
        let inner_fine = self.inner_fine.clone();
        match self.outer_symmetry(radial_data) {
            OuterSymmetry::Full => {
                let outer = inner.collapse_full(&self.group);
                DoubleRuleSet {
                    inner,
                    inner_fine,
                    outer: outer.clone(),
                    outer_fine: outer,
                    probe_inner: true,
                }
            }
            OuterSymmetry::Axial => DoubleRuleSet {
                outer: self.inner_coarse.collapse_axial(&self.group, &self.qnorm),
                outer_fine: self.inner_fine.collapse_axial(&self.group, &self.qnorm),
                inner,
                inner_fine,
                probe_inner: true,
            },
            OuterSymmetry::General => DoubleRuleSet {
                outer: inner.clone(),
                outer_fine: inner_fine.clone(),
                inner,
                inner_fine,
                probe_inner: false,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> Space {
        Space::new(GroupSpec::abelian(&[1.0]).unwrap(), QuasiNormKind::Euclidean).unwrap()
    }

    #[test]
    fn known_sphere_measures_survive_the_cross_check() {
        let cases: Vec<(Space, f64)> = vec![
            (line(), 2.0),
            (
                Space::new(GroupSpec::abelian(&[1.0, 1.0]).unwrap(), QuasiNormKind::Euclidean)
                    .unwrap(),
                std::f64::consts::TAU,
            ),
            (
                Space::new(GroupSpec::abelian(&[1.0, 2.0]).unwrap(), QuasiNormKind::AnisoMax)
                    .unwrap(),
                12.0,
            ),
            (
                Space::new(GroupSpec::heisenberg(), QuasiNormKind::Koranyi).unwrap(),
                2.0 * std::f64::consts::PI * std::f64::consts::PI,
            ),
        ];
        for (space, sigma) in cases {
            assert!(
                (space.sphere_measure() - sigma).abs() <= 1e-5 * sigma,
                "sphere measure {} vs {}",
                space.sphere_measure(),
                sigma
            );
            let vol = space.q_hom() * space.ball_volume();
            assert!((vol - sigma).abs() <= 1e-5 * sigma);
        }
    }

    #[test]
    fn radial_integral_reproduces_a_closed_form() {
        // int_{1 <= |x| <= 10} |x|^{-2} dx on the plane = 2 pi ln 10.
        let space =
            Space::new(GroupSpec::abelian(&[1.0, 1.0]).unwrap(), QuasiNormKind::Euclidean).unwrap();
        let layout = RadialLayout {
            r_lo: 1.0,
            r_hi: 10.0,
            dense_per_decade: 8.0,
            sparse_per_decade: 8.0,
            focus: None,
            order: 8,
            breakpoints: Vec::new(),
            grade_levels: 0,
        };
        let budget = EvalBudget::unlimited();
        let got = space.radial_integral(&layout, |r| Ok(r.powi(-2)), &budget).unwrap();
        let want = std::f64::consts::TAU * 10.0f64.ln();
        assert!((got.value - want).abs() < 1e-9 * want, "{} vs {}", got.value, want);
    }

    #[test]
    fn symmetry_dispatch_matches_the_geometry() {
        assert_eq!(line().outer_symmetry(true), OuterSymmetry::Full);
        assert_eq!(line().outer_symmetry(false), OuterSymmetry::General);
        let h = Space::new(GroupSpec::heisenberg(), QuasiNormKind::Koranyi).unwrap();
        assert_eq!(h.outer_symmetry(true), OuterSymmetry::Axial);
        let aniso =
            Space::new(GroupSpec::abelian(&[1.0, 2.0]).unwrap(), QuasiNormKind::AnisoMax).unwrap();
        assert_eq!(aniso.outer_symmetry(true), OuterSymmetry::General);
        let set = h.double_rule_set(true);
        assert!(set.probe_inner);
        assert!(set.outer.len() < set.inner.len());
        // Collapse redistributes weight but must preserve the total.
        let total: f64 = set.outer.weights.iter().sum();
        let parent = set.inner.weight_sum();
        assert!((total - parent).abs() < 1e-12 * parent);
        // And the coarse rule itself is a usable estimate of the measure.
        assert!((parent - h.sphere_measure()).abs() < 1e-3 * h.sphere_measure());
    }
}
