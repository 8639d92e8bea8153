//! Test functions: compactly supported radial profiles, optionally
//! modulated by a homogeneous-degree-zero angular factor.
//!
//! Every function carries the data the quadrature layer needs to certify
//! its remainder bounds: the support window `[r0, R]` in the gauge, the
//! list of kink radii (quadrature panel edges snap to these), a supremum
//! bound, and a gauge-Lipschitz constant. Profiles are chosen so that
//! dilation acts exactly on the parameters — `u(D_{1/lambda} x)` is again
//! a member of the family — which is what lets scaling tests distinguish
//! quadrature error from genuine covariance defects.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::point::Point;
use crate::qnorm::QuasiNormKind;
use crate::space::Space;

/// Safety factor applied to the sampled Lipschitz estimate when no exact
/// slope bound is available for the gauge.
const SAMPLED_LIP_SAFETY: f64 = 1.5;

/// Sample pairs drawn by the Lipschitz estimator.
const LIP_SAMPLES: usize = 4000;

/// Fixed seed for the Lipschitz estimator; the bound must not change
/// between runs of the same scenario.
const LIP_SEED: u64 = 0x51AB_1E5E;

/// Gaussian-ring profiles are cut to zero where the Gaussian falls below
/// `exp(-64)` of its peak, making the support compact while keeping the
/// profile continuous.
const RING_CUT: f64 = 64.0;

/// Radial profile shapes.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// Piecewise-linear bump: 0 at `foot`, 1 at `peak`, 0 at `head`.
    Tent { foot: f64, peak: f64, head: f64 },
    /// `r^exponent` between two linear ramps; `ramp` is the relative
    /// width of each ramp. The near-extremal families for the sharpness
    /// probes live here.
    TruncatedPower { exponent: f64, foot: f64, head: f64, ramp: f64 },
    /// Truncated Gaussian bump centered at `center` with scale `width`,
    /// supported on `center +- 8 width`.
    GaussianRing { center: f64, width: f64 },
    /// Characteristic function of `[foot, head]`; `foot = 0` gives a
    /// ball. Not Lipschitz; only usable where no smoothness is required.
    Indicator { foot: f64, head: f64 },
    /// Piecewise constant: `values[i]` on `(edges[i], edges[i+1])`, zero
    /// outside. Generalizes the indicator to several levels.
    Steps { edges: Vec<f64>, values: Vec<f64> },
}

impl Profile {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::input(msg));
        if let Profile::Steps { edges, values } = self {
            if edges.len() < 2 || values.len() != edges.len() - 1 {
                return bad(format!(
                    "steps need n+1 edges for n values, got {} edges, {} values",
                    edges.len(),
                    values.len()
                ));
            }
            if !(edges[0] >= 0.0) || !edges.windows(2).all(|w| w[0] < w[1] && w[1].is_finite()) {
                return bad("step edges must be finite, non-negative and increasing".into());
            }
            if !values.iter().all(|v| v.is_finite() && *v >= 0.0) || !values.iter().any(|v| *v > 0.0)
            {
                return bad("step values must be finite, non-negative, not all zero".into());
            }
            return Ok(());
        }
        match *self {
            Profile::Tent { foot, peak, head } => {
                if !(0.0 < foot && foot < peak && peak < head && head.is_finite()) {
                    return bad(format!("tent needs 0 < foot < peak < head, got {self:?}"));
                }
            }
            Profile::TruncatedPower { exponent, foot, head, ramp } => {
                if !exponent.is_finite() {
                    return bad(format!("power profile needs a finite exponent, got {exponent}"));
                }
                if !(0.0 < foot && foot < head && head.is_finite()) {
                    return bad(format!("power profile needs 0 < foot < head, got {self:?}"));
                }
                if !(ramp > 0.0 && ramp < 0.5) {
                    return bad(format!("ramp must lie in (0, 0.5), got {ramp}"));
                }
                if foot * (1.0 + ramp) >= head * (1.0 - ramp) {
                    return bad(format!("ramps overlap: foot {foot}, head {head}, ramp {ramp}"));
                }
            }
            Profile::GaussianRing { center, width } => {
                if !(width > 0.0 && width.is_finite()) {
                    return bad(format!("ring width must be positive, got {width}"));
                }
                if !(center - 8.0 * width > 0.0) {
                    return bad(format!(
                        "ring support must avoid the origin: need center > 8 width, \
                         got center {center}, width {width}"
                    ));
                }
            }
            Profile::Indicator { foot, head } => {
                if !(0.0 <= foot && foot < head && head.is_finite()) {
                    return bad(format!("indicator needs 0 <= foot < head, got {self:?}"));
                }
            }
            Profile::Steps { .. } => unreachable!("handled above"),
        }
        Ok(())
    }

    /// Lower edge of the support.
    fn r0(&self) -> f64 {
        match self {
            Profile::Tent { foot, .. } => *foot,
            Profile::TruncatedPower { foot, .. } => *foot,
            Profile::GaussianRing { center, width } => center - 8.0 * width,
            Profile::Indicator { foot, .. } => *foot,
            Profile::Steps { edges, .. } => edges[0],
        }
    }

    /// Upper edge of the support.
    fn big_r(&self) -> f64 {
        match self {
            Profile::Tent { head, .. } => *head,
            Profile::TruncatedPower { head, .. } => *head,
            Profile::GaussianRing { center, width } => center + 8.0 * width,
            Profile::Indicator { head, .. } => *head,
            Profile::Steps { edges, .. } => *edges.last().unwrap(),
        }
    }

    /// Radii that quadrature panels must not straddle: support edges,
    /// derivative jumps, and the ring peak. Zero is never a panel edge.
    fn kinks(&self) -> Vec<f64> {
        let mut ks = match self {
            Profile::Tent { foot, peak, head } => vec![*foot, *peak, *head],
            Profile::TruncatedPower { foot, head, ramp, .. } => {
                vec![*foot, foot * (1.0 + ramp), head * (1.0 - ramp), *head]
            }
            Profile::GaussianRing { center, width } => {
                vec![center - 8.0 * width, *center, center + 8.0 * width]
            }
            Profile::Indicator { foot, head } => vec![*foot, *head],
            Profile::Steps { edges, .. } => edges.clone(),
        };
        ks.retain(|k| *k > 0.0);
        ks
    }

    fn at(&self, r: f64) -> f64 {
        if let Profile::Steps { edges, values } = self {
            if r < edges[0] || r > *edges.last().unwrap() {
                return 0.0;
            }
            for (i, v) in values.iter().enumerate() {
                if r <= edges[i + 1] {
                    return *v;
                }
            }
            return 0.0;
        }
        match *self {
            Profile::Tent { foot, peak, head } => {
                if r <= foot || r >= head {
                    0.0
                } else if r <= peak {
                    (r - foot) / (peak - foot)
                } else {
                    (head - r) / (head - peak)
                }
            }
            Profile::TruncatedPower { exponent, foot, head, ramp } => {
                let r1 = foot * (1.0 + ramp);
                let r2 = head * (1.0 - ramp);
                if r <= foot || r >= head {
                    0.0
                } else if r < r1 {
                    r1.powf(exponent) * (r - foot) / (r1 - foot)
                } else if r <= r2 {
                    r.powf(exponent)
                } else {
                    r2.powf(exponent) * (head - r) / (head - r2)
                }
            }
            Profile::GaussianRing { center, width } => {
                let tau = (r - center) / width;
                let cut = (-RING_CUT).exp();
                (((-tau * tau).exp() - cut) / (1.0 - cut)).max(0.0)
            }
            Profile::Indicator { foot, head } => {
                if r >= foot && r <= head {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Steps { .. } => unreachable!("handled above"),
        }
    }

    /// Pointwise derivative where defined. Indicators are rejected; at a
    /// kink the one-sided derivative from the left is returned, which is
    /// harmless because kinks are quadrature panel edges of measure zero.
    fn deriv(&self, r: f64) -> Result<f64> {
        Ok(match *self {
            Profile::Tent { foot, peak, head } => {
                if r <= foot || r >= head {
                    0.0
                } else if r <= peak {
                    1.0 / (peak - foot)
                } else {
                    -1.0 / (head - peak)
                }
            }
            Profile::TruncatedPower { exponent, foot, head, ramp } => {
                let r1 = foot * (1.0 + ramp);
                let r2 = head * (1.0 - ramp);
                if r <= foot || r >= head {
                    0.0
                } else if r < r1 {
                    r1.powf(exponent) / (r1 - foot)
                } else if r <= r2 {
                    exponent * r.powf(exponent - 1.0)
                } else {
                    -r2.powf(exponent) / (head - r2)
                }
            }
            Profile::GaussianRing { center, width } => {
                let tau = (r - center) / width;
                let cut = (-RING_CUT).exp();
                if (-tau * tau).exp() <= cut {
                    0.0
                } else {
                    -2.0 * tau * (-tau * tau).exp() / (width * (1.0 - cut))
                }
            }
            Profile::Indicator { .. } | Profile::Steps { .. } => {
                return Err(Error::input(
                    "piecewise-constant profiles have no derivative; use a tent or ramped \
                     power instead",
                ))
            }
        })
    }

    fn sup(&self) -> f64 {
        if let Profile::Steps { values, .. } = self {
            return values.iter().cloned().fold(0.0, f64::max);
        }
        match *self {
            Profile::Tent { .. }
            | Profile::GaussianRing { .. }
            | Profile::Indicator { .. }
            | Profile::Steps { .. } => 1.0,
            Profile::TruncatedPower { exponent, foot, head, ramp } => {
                let r1 = foot * (1.0 + ramp);
                let r2 = head * (1.0 - ramp);
                r1.powf(exponent).max(r2.powf(exponent))
            }
        }
    }

    /// Bound on `|d profile / dr|`; infinite for indicators.
    fn slope_bound(&self) -> f64 {
        match *self {
            Profile::Tent { foot, peak, head } => {
                (1.0 / (peak - foot)).max(1.0 / (head - peak))
            }
            Profile::TruncatedPower { exponent, foot, head, ramp } => {
                let r1 = foot * (1.0 + ramp);
                let r2 = head * (1.0 - ramp);
                let ramps = (r1.powf(exponent) / (r1 - foot)).max(r2.powf(exponent) / (head - r2));
                let mid =
                    exponent.abs() * r1.powf(exponent - 1.0).max(r2.powf(exponent - 1.0));
                ramps.max(mid)
            }
            Profile::GaussianRing { width, .. } => {
                let cut = (-RING_CUT).exp();
                (2.0f64 / std::f64::consts::E).sqrt() / (width * (1.0 - cut))
            }
            Profile::Indicator { .. } | Profile::Steps { .. } => f64::INFINITY,
        }
    }

    /// The profile of `r -> profile(r / lambda)`, which is again in the
    /// family; the returned factor is the amplitude picked up, if any.
    fn dilated(&self, lambda: f64) -> (Profile, f64) {
        match *self {
            Profile::Tent { foot, peak, head } => {
                (Profile::Tent { foot: foot * lambda, peak: peak * lambda, head: head * lambda }, 1.0)
            }
            Profile::TruncatedPower { exponent, foot, head, ramp } => (
                Profile::TruncatedPower {
                    exponent,
                    foot: foot * lambda,
                    head: head * lambda,
                    ramp,
                },
                lambda.powf(-exponent),
            ),
            Profile::GaussianRing { center, width } => {
                (Profile::GaussianRing { center: center * lambda, width: width * lambda }, 1.0)
            }
            Profile::Indicator { foot, head } => {
                (Profile::Indicator { foot: foot * lambda, head: head * lambda }, 1.0)
            }
            Profile::Steps { ref edges, ref values } => (
                Profile::Steps {
                    edges: edges.iter().map(|e| e * lambda).collect(),
                    values: values.clone(),
                },
                1.0,
            ),
        }
    }
}

/// A test function `u(x) = amp * profile(|x|) * (1 + eps * x_1 / |x|^{nu_1})`.
///
/// The modulation factor is homogeneous of degree zero, so dilating the
/// point leaves it unchanged; `eps = 0` gives radial functions.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub id: String,
    profile: Profile,
    amp: f64,
    angular_eps: f64,
}

impl TestFunction {
    pub fn new(
        id: impl Into<String>,
        profile: Profile,
        amp: f64,
        angular_eps: f64,
    ) -> Result<TestFunction> {
        profile.validate()?;
        if !(amp != 0.0 && amp.is_finite()) {
            return Err(Error::input(format!("amplitude must be finite and nonzero, got {amp}")));
        }
        if !(0.0..1.0).contains(&angular_eps) {
            return Err(Error::input(format!(
                "angular modulation must lie in [0, 1), got {angular_eps}"
            )));
        }
        Ok(TestFunction { id: id.into(), profile, amp, angular_eps })
    }

    pub fn radial(id: impl Into<String>, profile: Profile) -> Result<TestFunction> {
        TestFunction::new(id, profile, 1.0, 0.0)
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn amp(&self) -> f64 {
        self.amp
    }

    pub fn angular_eps(&self) -> f64 {
        self.angular_eps
    }

    pub fn is_radial(&self) -> bool {
        self.angular_eps == 0.0
    }

    pub fn r0(&self) -> f64 {
        self.profile.r0()
    }

    pub fn big_r(&self) -> f64 {
        self.profile.big_r()
    }

    pub fn kinks(&self) -> Vec<f64> {
        self.profile.kinks()
    }

    pub fn sup(&self) -> f64 {
        self.amp.abs() * self.profile.sup() * (1.0 + self.angular_eps)
    }

    /// The radial part `amp * profile(r)`.
    pub fn radial_part(&self, r: f64) -> f64 {
        self.amp * self.profile.at(r)
    }

    /// Derivative of the radial part; errors for indicators.
    pub fn radial_deriv(&self, r: f64) -> Result<f64> {
        Ok(self.amp * self.profile.deriv(r)?)
    }

    pub fn eval(&self, space: &Space, x: &Point) -> f64 {
        let rho = space.gauge(x);
        let v = self.amp * self.profile.at(rho);
        if v == 0.0 || self.angular_eps == 0.0 {
            return v;
        }
        let nu1 = space.group().nu()[0];
        v * (1.0 + self.angular_eps * x.coords()[0] / rho.powf(nu1))
    }

    /// Closure form for the quadrature drivers.
    pub fn evaluator<'a>(&'a self, space: &'a Space) -> impl Fn(&Point) -> f64 + Sync + 'a {
        move |x| self.eval(space, x)
    }

    /// A certified gauge-Lipschitz constant: `|u(x) - u(y)| <= L |y^{-1} x|`.
    ///
    /// For radial functions of a gauge satisfying the exact triangle
    /// inequality the profile slope is the constant. Anisotropic gauges
    /// and modulated functions fall back to a seeded sampling estimate
    /// with a safety factor; the estimate is deterministic.
    pub fn lip_bound(&self, space: &Space) -> f64 {
        let slope = self.amp.abs() * self.profile.slope_bound();
        if slope.is_infinite() {
            return f64::INFINITY;
        }
        let exact_gauge = matches!(
            space.qnorm().kind(),
            QuasiNormKind::Euclidean | QuasiNormKind::Koranyi
        );
        if self.is_radial() && exact_gauge {
            return slope;
        }
        self.sampled_lip(space).max(slope)
    }

    fn sampled_lip(&self, space: &Space) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(LIP_SEED);
        let group = space.group();
        let r0 = self.r0();
        let big_r = self.big_r();
        let mut best = 0.0f64;
        let direction = |rng: &mut ChaCha8Rng| loop {
            let mut c = [0.0; 3];
            for v in c.iter_mut().take(space.dim()) {
                *v = rng.gen_range(-1.0..1.0);
            }
            let g = Point::new(&c[..space.dim()]);
            let rho = space.gauge(&g);
            if rho > 0.1 {
                return group.dilate(1.0 / rho, &g);
            }
        };
        for _ in 0..LIP_SAMPLES {
            let t = log_uniform(&mut rng, 0.3 * r0, 2.0 * big_r);
            let x = group.dilate(t, &direction(&mut rng));
            let delta = log_uniform(&mut rng, 1e-4 * r0, 0.5 * r0);
            let w = group.dilate(delta, &direction(&mut rng));
            let x2 = group.mul(&x, &w);
            let du = (self.eval(space, &x2) - self.eval(space, &x)).abs();
            if du > 0.0 {
                best = best.max(du / delta);
            }
        }
        SAMPLED_LIP_SAFETY * best
    }

    /// The function `x -> u(D_{1/lambda} x)`: support scales by `lambda`,
    /// amplitudes absorb any power factor exactly.
    pub fn dilated(&self, lambda: f64) -> Result<TestFunction> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::input(format!("dilation must be positive, got {lambda}")));
        }
        let (profile, factor) = self.profile.dilated(lambda);
        TestFunction::new(
            format!("{}~dil{lambda}", self.id),
            profile,
            self.amp * factor,
            self.angular_eps,
        )
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo * (hi / lo).powf(rng.gen_range(0.0..1.0))
}
