//! Cumulative radial integrals with power-law endpoint extrapolation.
//!
//! Many constants in this crate are suprema over a radius of expressions
//! like `(int_{B_r} g)^{1/q} (int_{complement} h)^{1/p'}`. [`CumTable`]
//! supports that pattern: it tabulates `int phi(t) dt` on a log-uniform
//! grid, estimates the local power behavior at both window edges, and
//! extrapolates the remaining mass on `(0, r_lo]` and `[r_hi, inf)`.
//! A local exponent at or past `-1` marks the corresponding end as
//! divergent, and queries covering it return infinity.

use crate::error::{Error, Result};
use crate::quad::gauss::gauss_legendre;

/// Two local log-log slope probes closer than this to `-1` are treated
/// as exactly `-1` (borderline divergence).
const SLOPE_DIVERGENCE_TOL: f64 = 1e-6;

/// Spacing factor between the two probe radii used for slope estimation.
const SLOPE_PROBE_RATIO: f64 = 1.05;

/// Gauss order for table segments and partial-segment queries.
const TABLE_ORDER: usize = 8;

/// `coeff * rho^power * exp(-decay * rho^2)`: the radial factor grammar
/// shared by all weights in this crate. Closed under products and real
/// powers, which is what lets tail bounds stay analytic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialFactor {
    pub coeff: f64,
    pub power: f64,
    pub decay: f64,
}

impl RadialFactor {
    pub fn one() -> RadialFactor {
        RadialFactor { coeff: 1.0, power: 0.0, decay: 0.0 }
    }

    pub fn is_one(&self) -> bool {
        self.coeff == 1.0 && self.power == 0.0 && self.decay == 0.0
    }

    #[inline]
    pub fn eval(&self, rho: f64) -> f64 {
        if self.power == 0.0 && self.decay == 0.0 {
            return self.coeff;
        }
        if rho.is_infinite() {
            // The exponential wins over any power; avoid inf * 0.
            return if self.decay > 0.0 {
                0.0
            } else if self.decay < 0.0 || self.power > 0.0 {
                self.coeff * f64::INFINITY
            } else {
                0.0
            };
        }
        let mut v = self.coeff;
        if self.power != 0.0 {
            v *= rho.powf(self.power);
        }
        if self.decay != 0.0 {
            v *= (-self.decay * rho * rho).exp();
        }
        v
    }

    /// `self * other^e`, exact under the grammar.
    pub fn product_pow(&self, other: &RadialFactor, e: f64) -> RadialFactor {
        RadialFactor {
            coeff: self.coeff * other.coeff.powf(e),
            power: self.power + e * other.power,
            decay: self.decay + e * other.decay,
        }
    }

    /// `self^e`. A negative `e` on a decaying factor produces a growing
    /// one (negative `decay`), which stays inside the grammar; consumers
    /// that need a certified tail must check the sign themselves.
    pub fn pow(&self, e: f64) -> RadialFactor {
        RadialFactor { coeff: self.coeff.powf(e), power: self.power * e, decay: self.decay * e }
    }

    /// Radius past which the factor is non-increasing.
    pub fn mode(&self) -> f64 {
        if self.decay < 0.0 {
            f64::INFINITY
        } else if self.power <= 0.0 {
            0.0
        } else if self.decay > 0.0 {
            (self.power / (2.0 * self.decay)).sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// Supremum over the interval `[lo, hi]`. The factor is monotone
    /// between the endpoints and the single interior critical point,
    /// which is a maximum only when the exponential part decays.
    pub fn sup_on(&self, lo: f64, hi: f64) -> f64 {
        debug_assert!(lo <= hi);
        let mut best = self.eval(lo).max(self.eval(hi));
        if self.decay > 0.0 {
            let m = self.mode();
            if m > lo && m < hi {
                best = best.max(self.eval(m));
            }
        }
        best
    }
}

/// Local power behavior at one window edge.
#[derive(Debug, Clone, Copy)]
pub struct EdgeModel {
    /// Estimated exponent of `phi(t) ~ c t^slope` at the edge.
    pub slope: f64,
    /// Extrapolated mass beyond the window (infinite when divergent).
    pub integral: f64,
    pub diverges: bool,
    /// `phi` at the window edge.
    value: f64,
    /// Edge radius.
    radius: f64,
}

impl EdgeModel {
    /// Mass of the power model between `r` and the edge (both on the
    /// extrapolated side). `inward` picks the core (`r < edge`) or tail
    /// (`r > edge`) orientation.
    fn partial(&self, r: f64) -> f64 {
        let s1 = self.slope + 1.0;
        let ratio = r / self.radius;
        if s1.abs() <= SLOPE_DIVERGENCE_TOL {
            return self.value * self.radius * (ratio.ln().abs());
        }
        self.value * self.radius * (ratio.powf(s1) - 1.0).abs() / s1.abs()
    }
}

/// Tabulated `int phi` over `[r_lo, r_hi]` with edge extrapolation.
/// `phi` must be non-negative.
pub struct CumTable {
    phi: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    radii: Vec<f64>,
    /// `cum[i] = int_{radii[0]}^{radii[i]} phi`.
    cum: Vec<f64>,
    /// `rcum[i] = int_{radii[i]}^{radii[last]} phi`, kept separately so
    /// outer queries never subtract two large prefixes.
    rcum: Vec<f64>,
    pub core: EdgeModel,
    pub tail: EdgeModel,
}

impl CumTable {
    pub fn new<F>(phi: F, r_lo: f64, r_hi: f64, per_decade: f64) -> Result<CumTable>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        CumTable::with_breakpoints(phi, r_lo, r_hi, per_decade, &[])
    }

    /// Like [`CumTable::new`], but segment edges snap to the given radii
    /// so that jumps or kinks of `phi` never sit inside a segment.
    pub fn with_breakpoints<F>(
        phi: F,
        r_lo: f64,
        r_hi: f64,
        per_decade: f64,
        breakpoints: &[f64],
    ) -> Result<CumTable>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(r_lo > 0.0 && r_hi > r_lo && r_lo.is_finite() && r_hi.is_finite()) {
            return Err(Error::config(format!(
                "cumulative table window must satisfy 0 < r_lo < r_hi, got [{r_lo}, {r_hi}]"
            )));
        }
        let decades = (r_hi / r_lo).log10();
        let segments = ((decades * per_decade).ceil() as usize).max(4);
        let (gl_nodes, gl_weights) = gauss_legendre(TABLE_ORDER);

        let log_lo = r_lo.ln();
        let step = (r_hi.ln() - log_lo) / segments as f64;
        let mut radii = Vec::with_capacity(segments + 1);
        for i in 0..=segments {
            radii.push(if i == segments { r_hi } else { (log_lo + step * i as f64).exp() });
        }
        for b in breakpoints {
            if *b > r_lo && *b < r_hi
                && radii.iter().all(|r| (r / b - 1.0).abs() > 1e-12)
            {
                radii.push(*b);
            }
        }
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let segments = radii.len() - 1;

        let mut masses = Vec::with_capacity(segments);
        for seg in radii.windows(2) {
            masses.push(log_segment(&phi, seg[0], seg[1], &gl_nodes, &gl_weights)?);
        }
        let mut cum = Vec::with_capacity(segments + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for m in &masses {
            acc += m;
            cum.push(acc);
        }
        let mut rcum = vec![0.0; segments + 1];
        let mut acc = 0.0;
        for i in (0..segments).rev() {
            acc += masses[i];
            rcum[i] = acc;
        }

        let core = edge_model(&phi, r_lo, true)?;
        let tail = edge_model(&phi, r_hi, false)?;
        Ok(CumTable { phi: Box::new(phi), radii, cum, rcum, core, tail })
    }

    pub fn window(&self) -> (f64, f64) {
        (self.radii[0], *self.radii.last().unwrap())
    }

    /// Total mass `int_0^inf phi` (infinite when either edge diverges).
    pub fn total(&self) -> f64 {
        if self.core.diverges || self.tail.diverges {
            return f64::INFINITY;
        }
        self.core.integral + self.cum.last().unwrap() + self.tail.integral
    }

    /// `int_0^r phi`.
    pub fn inner(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let (lo, hi) = self.window();
        if r < lo {
            if self.core.diverges {
                return f64::INFINITY;
            }
            // Power model: mass below r scales like r^{slope+1}.
            return self.core.integral * (r / lo).powf(self.core.slope + 1.0);
        }
        if self.core.diverges {
            return f64::INFINITY;
        }
        if r >= hi {
            let beyond = if self.tail.diverges || r > hi {
                self.tail.partial(r)
            } else {
                0.0
            };
            return self.core.integral + self.cum.last().unwrap() + beyond;
        }
        self.core.integral + self.window_partial(r)
    }

    /// `int_r^inf phi`.
    pub fn outer(&self, r: f64) -> f64 {
        if self.tail.diverges {
            return f64::INFINITY;
        }
        let (lo, hi) = self.window();
        if r >= hi {
            let s1 = self.tail.slope + 1.0;
            return self.tail.integral * (r / hi).powf(s1);
        }
        if r <= lo {
            let below = if r < lo { self.core.partial(r) } else { 0.0 };
            return self.rcum[0] + below + self.tail.integral;
        }
        // Forward accumulation from r: suffix sums avoid cancellation when
        // the window mass concentrates at the inner edge.
        let i = match self.radii.binary_search_by(|p| p.partial_cmp(&r).unwrap()) {
            Ok(i) => return self.rcum[i] + self.tail.integral,
            Err(i) => i - 1,
        };
        let (gl_nodes, gl_weights) = gauss_legendre(TABLE_ORDER);
        let piece = log_segment(&self.phi, r, self.radii[i + 1], &gl_nodes, &gl_weights)
            .unwrap_or(0.0);
        piece + self.rcum[i + 1] + self.tail.integral
    }

    /// `int_{r_lo}^{r} phi` for `r` inside the window.
    fn window_partial(&self, r: f64) -> f64 {
        let i = match self.radii.binary_search_by(|p| p.partial_cmp(&r).unwrap()) {
            Ok(i) => return self.cum[i],
            Err(i) => i - 1,
        };
        let (gl_nodes, gl_weights) = gauss_legendre(TABLE_ORDER);
        let piece =
            log_segment(&self.phi, self.radii[i], r, &gl_nodes, &gl_weights).unwrap_or(0.0);
        self.cum[i] + piece
    }
}

/// `int_a^b phi(t) dt` by Gauss quadrature in `u = ln t`.
fn log_segment<F: Fn(f64) -> f64 + ?Sized>(
    phi: &F,
    a: f64,
    b: f64,
    gl_nodes: &[f64],
    gl_weights: &[f64],
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let (ua, ub) = (a.ln(), b.ln());
    let mid = 0.5 * (ua + ub);
    let half = 0.5 * (ub - ua);
    let mut acc = 0.0;
    for (x, w) in gl_nodes.iter().zip(gl_weights) {
        let t = (mid + half * x).exp();
        let v = phi(t);
        if !v.is_finite() || v < 0.0 {
            return Err(Error::numeric(format!(
                "radial table integrand must be finite and non-negative, got {v} at radius {t}"
            )));
        }
        acc += w * v * t;
    }
    Ok(acc * half)
}

/// Probe the local power exponent of `phi` at a window edge and
/// extrapolate the mass beyond it.
fn edge_model<F: Fn(f64) -> f64>(phi: &F, edge: f64, is_core: bool) -> Result<EdgeModel> {
    let other = if is_core { edge * SLOPE_PROBE_RATIO } else { edge / SLOPE_PROBE_RATIO };
    let (v_edge, v_other) = (phi(edge), phi(other));
    for (v, t) in [(v_edge, edge), (v_other, other)] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::numeric(format!(
                "radial table integrand must be finite and non-negative, got {v} at radius {t}"
            )));
        }
    }
    if v_edge == 0.0 || v_other == 0.0 {
        return Ok(EdgeModel { slope: 0.0, integral: 0.0, diverges: false, value: 0.0, radius: edge });
    }
    let slope = (v_other / v_edge).ln() / (other / edge).ln();
    let s1 = slope + 1.0;
    let (diverges, integral) = if is_core {
        if s1 <= SLOPE_DIVERGENCE_TOL {
            (true, f64::INFINITY)
        } else {
            // int_0^edge c t^slope dt with c matched at the edge.
            (false, v_edge * edge / s1)
        }
    } else if s1 >= -SLOPE_DIVERGENCE_TOL {
        (true, f64::INFINITY)
    } else {
        (false, v_edge * edge / (-s1))
    };
    Ok(EdgeModel { slope, integral, diverges, value: v_edge, radius: edge })
}
