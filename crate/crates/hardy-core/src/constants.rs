//! Sharp constants of the inequalities: supremum scans of the
//! cumulative-mass products, their closed forms where those exist, and
//! the admissibility gates and tracking constants built from them.
//!
//! The scanned quantities are products of one outer and one inner
//! cumulative integral, tabulated once over a wide window; the scan
//! itself is a log-spaced grid pass refined by a golden-section step.
//! Divergence is first-class: an infinite table edge surfaces as
//! `diverged` instead of a large number.

use crate::error::{Error, Result};
use crate::functionals::{conjugate, weight_a_frac, weight_a_hs, weight_c};
use crate::quad::radial::{CumTable, RadialFactor};
use crate::space::Space;
use crate::weights::PairWeight;

/// Scan grid size over [`SUP_LO`, `SUP_HI`].
const SUP_GRID: usize = 60;
const SUP_LO: f64 = 1e-4;
const SUP_HI: f64 = 1e4;
/// Width of the bracketing interval, in `ln r`, at which the
/// golden-section refinement stops.
const SUP_LN_TOL: f64 = 1e-8;
/// Window and density of the cumulative tables behind the scans.
const D1_TABLE_LO: f64 = 1e-6;
const D1_TABLE_HI: f64 = 1e6;
const D1_TABLE_PER_DECADE: f64 = 8.0;

/// Result of a supremum scan over radii.
#[derive(Debug, Clone, Copy)]
pub struct SupOutcome {
    pub value: f64,
    /// Radius attaining the reported value.
    pub radius: f64,
    /// The maximum sits on a window edge and still increases into it,
    /// so the true supremum may lie outside the scanned window.
    pub at_edge: bool,
    /// The scanned quantity is infinite somewhere.
    pub diverged: bool,
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c.exp());
    let mut fd = f(d.exp());
    while b - a > SUP_LN_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d.exp());
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Maximize `f` over the fixed radius window.
pub fn sup_scan<F: Fn(f64) -> f64>(f: F) -> SupOutcome {
    let n = SUP_GRID;
    let step = (SUP_HI / SUP_LO).ln() / (n - 1) as f64;
    let u_lo = SUP_LO.ln();
    let mut vals = vec![0.0f64; n];
    let mut best_i = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for (i, slot) in vals.iter_mut().enumerate() {
        let r = (u_lo + step * i as f64).exp();
        let v = f(r);
        if !v.is_finite() {
            return SupOutcome { value: f64::INFINITY, radius: r, at_edge: false, diverged: true };
        }
        *slot = v;
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    // Strict edge test: a constant product must not read as edge growth.
    let at_edge = (best_i == 0 && vals[0] > vals[1] * (1.0 + 1e-12))
        || (best_i == n - 1 && vals[n - 1] > vals[n - 2] * (1.0 + 1e-12));
    let a = u_lo + step * best_i.saturating_sub(1) as f64;
    let b = u_lo + step * (best_i + 1).min(n - 1) as f64;
    let (u, v) = golden_max(&f, a, b);
    let (value, radius) = if v >= best_v {
        (v, u.exp())
    } else {
        (best_v, (u_lo + step * best_i as f64).exp())
    };
    SupOutcome { value, radius, at_edge, diverged: false }
}

/// A cumulative table of `sigma w(t) t^{Q-1}` over the scan window.
fn scan_table<W>(space: &Space, w: W) -> Result<CumTable>
where
    W: Fn(f64) -> f64 + Send + Sync + 'static,
{
    let q_hom = space.q_hom();
    let sigma = space.sphere_measure();
    CumTable::new(
        move |t| sigma * w(t) * t.powf(q_hom - 1.0),
        D1_TABLE_LO,
        D1_TABLE_HI,
        D1_TABLE_PER_DECADE,
    )
}

/// The averaging-inequality constant
/// `sup_r (int_{|x|>r} g)^{1/q} (int_{|x|<r} h^{1-p'})^{1/p'}`.
pub fn d1_integral_hardy(
    space: &Space,
    g: &RadialFactor,
    h: &RadialFactor,
    p: f64,
    q: f64,
) -> Result<SupOutcome> {
    check_exponents(p, q)?;
    let pp = conjugate(p);
    let gw = *g;
    let hw = h.pow(1.0 - pp);
    let g_tab = scan_table(space, move |t| gw.eval(t))?;
    let h_tab = scan_table(space, move |t| hw.eval(t))?;
    Ok(sup_scan(move |r| {
        g_tab.outer(r).powf(1.0 / q) * h_tab.inner(r).powf(1.0 / pp)
    }))
}

/// The difference-inequality constant built from the averaged weight:
/// `sup_r (int_{|y|>r} A |B(|y|)|^{-p} |y|^{-sp})^{1/p}
///        (int_{|y|<r} (A |y|^{-sp})^{1-p'})^{1/p'}`.
pub fn d1_frac(space: &Space, a: &PairWeight, p: f64, s: f64) -> Result<SupOutcome> {
    check_exponents(p, p)?;
    check_order(s)?;
    let aw = weight_a_frac(space, a, p)?;
    let pp = conjugate(p);
    let q_hom = space.q_hom();
    let vol = space.sphere_measure() / q_hom;
    let sp = s * p;
    let a_outer = aw.clone();
    let g_tab = scan_table(space, move |t| {
        a_outer.eval(t) * (vol * t.powf(q_hom)).powf(-p) * t.powf(-sp)
    })?;
    let h_tab = scan_table(space, move |t| (aw.eval(t) * t.powf(-sp)).powf(1.0 - pp))?;
    Ok(sup_scan(move |r| {
        g_tab.outer(r).powf(1.0 / p) * h_tab.inner(r).powf(1.0 / pp)
    }))
}

/// The nested-inequality constant built from the averaged weight and
/// the ball mass of `v`:
/// `sup_r (int_{|y|>r} A C^{-q} |y|^{-sq})^{1/q}
///        (int_{|y|<r} (A v^{-q} |y|^{-sq})^{1-q'})^{1/q'}`.
pub fn d1_hs(
    space: &Space,
    v: &RadialFactor,
    z: &RadialFactor,
    p: f64,
    q: f64,
    s: f64,
) -> Result<SupOutcome> {
    check_exponents(p, q)?;
    if q <= 1.0 {
        return Err(Error::config(format!("outer exponent must exceed 1, got {q}")));
    }
    check_order(s)?;
    let aw = weight_a_hs(space, v, z, p, q)?;
    let cm = weight_c(space, v)?;
    let qq = conjugate(q);
    let sq = s * q;
    let vq = v.pow(-q);
    let a_outer = aw.clone();
    let g_tab = scan_table(space, move |t| {
        a_outer.eval(t) * cm.eval(t).powf(-q) * t.powf(-sq)
    })?;
    let h_tab = scan_table(space, move |t| {
        (aw.eval(t) * vq.eval(t) * t.powf(-sq)).powf(1.0 - qq)
    })?;
    Ok(sup_scan(move |r| {
        g_tab.outer(r).powf(1.0 / q) * h_tab.inner(r).powf(1.0 / qq)
    }))
}

fn check_exponents(p: f64, q: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::config(format!("exponent p must be finite and exceed 1, got {p}")));
    }
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::config(format!("exponent q must be finite and positive, got {q}")));
    }
    Ok(())
}

fn check_order(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::config(format!(
            "fractional order must lie strictly between 0 and 1, got {s}"
        )));
    }
    Ok(())
}

/// Closed form of the averaging constant for the power pair
/// `g = |x|^beta`, `h = |x|^alpha`, subject to the three validity
/// conditions of that display.
pub fn d1_power_weights(
    space: &Space,
    alpha: f64,
    beta: f64,
    p: f64,
    q: f64,
) -> Result<f64> {
    check_exponents(p, q)?;
    let q_hom = space.q_hom();
    let pp = conjugate(p);
    let slack = 1e-9;
    if beta + q_hom >= -slack {
        return Err(Error::condition(format!(
            "outer power weight must decay: beta + Q = {} is not negative",
            beta + q_hom
        )));
    }
    let inner = alpha * (1.0 - pp) + q_hom;
    if inner <= slack {
        return Err(Error::condition(format!(
            "inner power weight is not integrable: alpha(1-p') + Q = {inner} is not positive"
        )));
    }
    let balance = q * (alpha + q_hom) - p * (beta + q_hom) - p * q * q_hom;
    let scale = 1.0 + alpha.abs() + beta.abs() + q_hom;
    if balance.abs() > slack * scale * p.max(q) {
        return Err(Error::condition(format!(
            "power weights do not balance dimensionally: q(alpha+Q) - p(beta+Q) - pqQ = {balance}"
        )));
    }
    let sigma = space.sphere_measure();
    Ok(sigma.powf(1.0 / q + 1.0 / pp)
        / ((beta + q_hom).abs().powf(1.0 / q) * inner.powf(1.0 / pp)))
}

/// Closed form of the difference-inequality constant for the
/// unweighted kernel.
pub fn d1_frac_closed(space: &Space, p: f64, s: f64) -> f64 {
    let q_hom = space.q_hom();
    q_hom * (p - 1.0).powf(1.0 / conjugate(p)) / (s * p + q_hom * p - q_hom)
}

/// Upper end of the two-sided bracket on the averaging constant:
/// `d1 (p')^{1/p'} p^{1/q}`. The same expression is the plain-stated
/// gate of the logarithmic inequalities.
pub fn upper_bracket(d1: f64, p: f64, q: f64) -> f64 {
    d1 * conjugate(p).powf(1.0 / conjugate(p)) * p.powf(1.0 / q)
}

/// The admissibility gate `d1 (e')^{1/e'} e^{1/e}` shared by the
/// difference (`e = p`) and nested (`e = q`) inequalities.
pub fn gate(d1: f64, e: f64) -> f64 {
    d1 * conjugate(e).powf(1.0 / conjugate(e)) * e.powf(1.0 / e)
}

/// Tracking constant `(2c)^{(Q+sp)/p} (sigma/Q)^{-1/p} / (1 - gate)`
/// in front of the difference and nested inequalities; infinite when
/// the gate fails.
pub fn front_constant(space: &Space, p: f64, s: f64, gate: f64) -> f64 {
    if !(gate < 1.0) {
        return f64::INFINITY;
    }
    let q_hom = space.q_hom();
    let c = space.ctri();
    let sigma = space.sphere_measure();
    (2.0 * c).powf((q_hom + s * p) / p) * (sigma / q_hom).powf(-1.0 / p) / (1.0 - gate)
}
