//! Homogeneous quasi-norms and their quasi-triangle constants.
//!
//! A quasi-norm `|.|` satisfies `|x| = |x^{-1}|`, `|D_lambda x| = lambda |x|`
//! and `|x| = 0` iff `x = 0`, together with `|x . y| <= C (|x| + |y|)`.
//! Four gauges are built in:
//!
//! * `Euclidean` — the Euclidean norm; requires all dilation weights 1;
//! * `AnisoMax` — `max_i |x_i|^{1/nu_i}`;
//! * `AnisoSmooth` — `(sum_i |x_i|^{2M/nu_i})^{1/(2M)}` with `M` the smallest
//!   positive integer making every exponent an even integer (capped at 12);
//! * `Koranyi` — `((x_1^2 + x_2^2)^2 + x_3^2)^{1/4}` on the Heisenberg group.
//!
//! Each certified quasi-triangle constant below is provable:
//! * Euclidean / Koranyi: 1. For the Koranyi gauge write
//!   `A(x) = x_1^2 + x_2^2 + i c x_3` with `c = 1/4` after rescaling the
//!   central variable; the group product gives
//!   `A(x . y) = A(x) + A(y) + w` with `|w| <= 2 |z_x| |z_y|`, hence
//!   `|x . y|^2 <= |x|^2 + |y|^2 + 2 |x||y|` exactly as in the Euclidean case.
//! * AnisoMax: componentwise, `(a + b)^{1/nu} <= a^{1/nu} + b^{1/nu}` for
//!   `nu >= 1` and `(a + b)^{1/nu} <= 2^{1/nu - 1} (a^{1/nu} + b^{1/nu})`
//!   otherwise; the Heisenberg twist term obeys
//!   `|x_3 + y_3 + (x_1 y_2 - x_2 y_1)/2| <= (|x| + |y|)^2`.
//! * AnisoSmooth: sandwiched between AnisoMax and `N^{1/(2M)} *` AnisoMax.
//!
//! `estimate_ctri` samples `|x . y| / (|x| + |y|)` and must stay below the
//! certified constant; a unit test enforces this for every built-in pair.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::{GroupLaw, GroupSpec};
use crate::point::Point;

/// Cap on the even-exponent parameter M of the smooth anisotropic gauge.
pub const ANISO_SMOOTH_MAX_M: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuasiNormKind {
    Euclidean,
    AnisoMax,
    AnisoSmooth,
    Koranyi,
}

impl QuasiNormKind {
    pub fn name(&self) -> &'static str {
        match self {
            QuasiNormKind::Euclidean => "euclidean",
            QuasiNormKind::AnisoMax => "aniso_max",
            QuasiNormKind::AnisoSmooth => "aniso_smooth",
            QuasiNormKind::Koranyi => "koranyi",
        }
    }
}

/// A quasi-norm bound to a concrete group (the gauge must be homogeneous
/// for that group's dilations, which constrains the admissible pairs).
#[derive(Debug, Clone)]
pub struct QuasiNormSpec {
    kind: QuasiNormKind,
    /// Exponents `2M/nu_i` of the smooth gauge; empty for other kinds.
    smooth_exponents: Vec<f64>,
    /// The same exponents as integers (they are even integers by
    /// construction), for the fast evaluation path.
    smooth_exponents_int: Vec<i32>,
    /// `2M` for the smooth gauge, 0 otherwise.
    smooth_two_m: f64,
    /// Cached `1/nu_i` for the max gauge.
    inv_nu: Vec<f64>,
    certified_ctri: f64,
}

impl QuasiNormSpec {
    pub fn new(kind: QuasiNormKind, group: &GroupSpec) -> Result<Self> {
        let inv_nu: Vec<f64> = group.nu().iter().map(|nu| 1.0 / nu).collect();
        match kind {
            QuasiNormKind::Euclidean => {
                if group.nu().iter().any(|w| *w != 1.0) {
                    return Err(Error::config(
                        "euclidean gauge is homogeneous only for dilation weights all equal to 1",
                    ));
                }
                Ok(QuasiNormSpec {
                    kind,
                    smooth_exponents: Vec::new(),
                    smooth_exponents_int: Vec::new(),
                    smooth_two_m: 0.0,
                    inv_nu,
                    certified_ctri: 1.0,
                })
            }
            QuasiNormKind::Koranyi => {
                if group.law() != GroupLaw::Heisenberg {
                    return Err(Error::config(
                        "koranyi gauge requires the heisenberg group",
                    ));
                }
                Ok(QuasiNormSpec {
                    kind,
                    smooth_exponents: Vec::new(),
                    smooth_exponents_int: Vec::new(),
                    smooth_two_m: 0.0,
                    inv_nu,
                    certified_ctri: 1.0,
                })
            }
            QuasiNormKind::AnisoMax => Ok(QuasiNormSpec {
                kind,
                smooth_exponents: Vec::new(),
                smooth_exponents_int: Vec::new(),
                smooth_two_m: 0.0,
                inv_nu,
                certified_ctri: aniso_max_ctri(group),
            }),
            QuasiNormKind::AnisoSmooth => {
                let m = smooth_m(group.nu()).ok_or_else(|| {
                    Error::config(format!(
                        "aniso_smooth gauge needs an integer M <= {ANISO_SMOOTH_MAX_M} with all \
                         2M/nu_i even integers; weights {:?} admit none",
                        group.nu()
                    ))
                })?;
                let two_m = f64::from(2 * m);
                let exponents: Vec<f64> = group.nu().iter().map(|nu| two_m / nu).collect();
                let exponents_int: Vec<i32> = exponents.iter().map(|e| e.round() as i32).collect();
                let n = group.dim() as f64;
                Ok(QuasiNormSpec {
                    kind,
                    smooth_exponents: exponents,
                    smooth_exponents_int: exponents_int,
                    smooth_two_m: two_m,
                    inv_nu,
                    certified_ctri: n.powf(1.0 / two_m) * aniso_max_ctri(group),
                })
            }
        }
    }

    #[inline]
    pub fn kind(&self) -> QuasiNormKind {
        self.kind
    }

    /// Exponents `2M/nu_i` of the smooth gauge (empty for other kinds).
    pub fn smooth_exponents(&self) -> &[f64] {
        &self.smooth_exponents
    }

    /// Gauge value `|x|`.
    #[inline]
    pub fn eval(&self, group: &GroupSpec, x: &Point) -> f64 {
        debug_assert_eq!(x.dim(), group.dim());
        match self.kind {
            QuasiNormKind::Euclidean => x.euclid_norm(),
            QuasiNormKind::AnisoMax => {
                let mut best = 0.0f64;
                for i in 0..x.dim() {
                    let a = x.get(i).abs();
                    let inv = self.inv_nu[i];
                    let v = if inv == 1.0 {
                        a
                    } else if inv == 0.5 {
                        a.sqrt()
                    } else {
                        a.powf(inv)
                    };
                    if v > best {
                        best = v;
                    }
                }
                best
            }
            QuasiNormKind::AnisoSmooth => {
                // Coordinates of magnitude below 1e10 stay finite under powi
                // with exponents up to 24 once divided by the largest term, so
                // the common case needs no rescaling.
                let mut big = false;
                let mut sum = 0.0;
                for i in 0..x.dim() {
                    let a = x.get(i).abs();
                    if a > 1e10 {
                        big = true;
                        break;
                    }
                    sum += a.powi(self.smooth_exponents_int[i]);
                }
                if !big {
                    return sum.powf(1.0 / self.smooth_two_m);
                }
                // Factor out the max coordinate scale so huge inputs do not
                // overflow under the large even exponents.
                let mut scale = 0.0f64;
                for i in 0..x.dim() {
                    let v = x.get(i).abs().powf(self.inv_nu[i]);
                    if v > scale {
                        scale = v;
                    }
                }
                if scale == 0.0 || !scale.is_finite() {
                    return scale;
                }
                let mut sum = 0.0;
                for i in 0..x.dim() {
                    let v = x.get(i).abs() / scale.powf(group.nu()[i]);
                    sum += v.powf(self.smooth_exponents[i]);
                }
                scale * sum.powf(1.0 / self.smooth_two_m)
            }
            QuasiNormKind::Koranyi => {
                let r2 = x.get(0) * x.get(0) + x.get(1) * x.get(1);
                let t = x.get(2);
                (r2 * r2 + t * t).sqrt().sqrt()
            }
        }
    }

    /// The shipped quasi-triangle constant (see the module docs for proofs).
    #[inline]
    pub fn certified_ctri(&self) -> f64 {
        self.certified_ctri
    }

    /// Seeded sampling estimate of `sup |x . y| / (|x| + |y|)`.
    ///
    /// Draws both factors from a box whose side spans several dyadic scales,
    /// so that very unbalanced pairs are exercised too. The returned value is
    /// a lower bound on the true constant and must not exceed
    /// [`certified_ctri`](Self::certified_ctri).
    pub fn estimate_ctri(&self, group: &GroupSpec, samples: u32, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = group.dim();
        let mut worst = 0.0f64;
        let draw = |rng: &mut ChaCha8Rng| {
            let scale = 4.0f64.powf(rng.gen_range(-3.0..3.0));
            let mut p = Point::zero(dim);
            for i in 0..dim {
                p.set(i, scale * rng.gen_range(-1.0..1.0));
            }
            p
        };
        for _ in 0..samples {
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            let nx = self.eval(group, &x);
            let ny = self.eval(group, &y);
            if nx + ny == 0.0 {
                continue;
            }
            let ratio = self.eval(group, &group.mul(&x, &y)) / (nx + ny);
            if ratio > worst {
                worst = ratio;
            }
        }
        worst
    }
}

/// `max(1, 2^{1/nu_min - 1})`, valid for AnisoMax on both built-in laws.
fn aniso_max_ctri(group: &GroupSpec) -> f64 {
    let exp = (1.0 / group.min_weight() - 1.0).max(0.0);
    2.0f64.powf(exp)
}

/// Smallest M in 1..=ANISO_SMOOTH_MAX_M with every `2M/nu_i` an even integer.
fn smooth_m(nu: &[f64]) -> Option<u32> {
    // Tolerance for recognizing `2M/nu` as an even integer; the dilation
    // weights are caller-provided floats, so exact divisibility is too strict.
    const EVEN_TOL: f64 = 1e-9;
    (1..=ANISO_SMOOTH_MAX_M).find(|&m| {
        nu.iter().all(|nu_i| {
            let e = f64::from(2 * m) / nu_i;
            let half = e / 2.0;
            e >= 2.0 - EVEN_TOL && (half - half.round()).abs() <= EVEN_TOL
        })
    })
}
