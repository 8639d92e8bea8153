//! Inequality sides as certified numbers.
//!
//! Everything here reduces one side of an inequality to quadratures from
//! [`crate::quad`]: weighted norms and entropies of a test function, the
//! double-integral difference seminorms, and the cumulative-mass form of
//! the averaging inequality. Derived weights come out as
//! [`DerivedRadial`] so exact grammar forms survive wherever the
//! derivation stays closed.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functions::TestFunction;
use crate::quad::gagliardo::{integrate_double, DoubleFunctional, DoubleScheme};
use crate::quad::radial::{CumTable, RadialFactor};
use crate::quad::rule1d::RadialLayout;
use crate::quad::{EvalBudget, IntegralResult};
use crate::space::Space;
use crate::weights::{ball_average_pow, DerivedRadial, PairWeight};

/// Radial panel density for integrals over a test-function support.
const SUPPORT_PER_DECADE: f64 = 24.0;
/// Fraction of the support radius at which data reaching the origin is
/// clipped; the remainder is bounded analytically.
const CORE_CLIP_REL: f64 = 1e-9;
/// Panel density of cumulative-mass tables and the refinement factor of
/// their error-estimation companions.
const MASS_TABLE_PER_DECADE: f64 = 8.0;
const MASS_TABLE_REFINE: f64 = 1.5;

/// The conjugate exponent `p / (p - 1)`.
pub fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

fn require_above(name: &str, value: f64, min: f64) -> Result<()> {
    if value.is_finite() && value > min {
        return Ok(());
    }
    Err(Error::config(format!("{name} must be finite and exceed {min}, got {value}")))
}

/// The averaged weight of the difference inequality: the ball average of
/// `a^{1-p'}` over `B(0, |x|)`, raised to `1-p`, times the factor the
/// pair weight carries at `x`. Exact for pure powers; decaying factors
/// go through a table. The pair weight must not carry a power of the
/// gauge difference, since that part belongs to the kernel, not to the
/// average.
pub fn weight_a_frac(space: &Space, a: &PairWeight, p: f64) -> Result<DerivedRadial> {
    require_above("exponent p", p, 1.0)?;
    if a.diff_power != 0.0 {
        return Err(Error::config(format!(
            "the averaged weight needs a pair weight without a difference power, got exponent {}",
            a.diff_power
        )));
    }
    let w = a.y_factor.pow(1.0 - conjugate(p));
    // (1-p')(1-p) = 1, so the x-side factor passes through unchanged.
    ball_average_pow(space, &w, 1.0 - p, &a.x_factor)
}

/// The ball mass `C(r) = int_{B(0,r)} v`. Exact for pure powers.
pub fn weight_c(space: &Space, v: &RadialFactor) -> Result<DerivedRadial> {
    let q_hom = space.q_hom();
    let sigma = space.sphere_measure();
    if v.power + q_hom <= 0.0 {
        return Err(Error::condition(format!(
            "ball mass diverges: radial power {} needs to exceed {}",
            v.power, -q_hom
        )));
    }
    if v.decay < 0.0 {
        return Err(Error::condition(
            "ball mass of an exponentially growing factor is outside the certified grammar",
        ));
    }
    if v.decay == 0.0 {
        return Ok(DerivedRadial::from_factor(RadialFactor {
            coeff: sigma * v.coeff / (v.power + q_hom),
            power: v.power + q_hom,
            decay: 0.0,
        }));
    }
    let vv = *v;
    let hi = (710.0 / v.decay).sqrt().max(10.0);
    let table = CumTable::new(
        move |t| vv.eval(t) * t.powf(q_hom - 1.0),
        hi * 1e-9,
        hi,
        MASS_TABLE_PER_DECADE,
    )?;
    Ok(DerivedRadial::from_fn(move |r| sigma * table.inner(r)))
}

/// The averaged weight of the nested inequality:
/// `W(r)^{-q/p'} (C(r)/|B(r)|)^q v(r)` with `W` the ball average of
/// `(v^p/z)^{1/(p-1)}` and `C` the ball mass of `v`.
pub fn weight_a_hs(
    space: &Space,
    v: &RadialFactor,
    z: &RadialFactor,
    p: f64,
    q: f64,
) -> Result<DerivedRadial> {
    require_above("exponent p", p, 1.0)?;
    require_above("exponent q", q, 0.0)?;
    let w = v.pow(p).product_pow(z, -1.0).pow(1.0 / (p - 1.0));
    let w_part = ball_average_pow(space, &w, -q / conjugate(p), &RadialFactor::one())?;
    // C(r)/|B(r)| is the ball average of v itself.
    let c_part = ball_average_pow(space, v, q, &RadialFactor::one())?;
    Ok(w_part.product(&c_part).product_factor(v))
}

/// Radial layout covering the support of `u`, with the clip radius used
/// when the data reaches the origin.
fn support_layout(u: &TestFunction) -> (f64, RadialLayout) {
    let lo = if u.r0() > 0.0 { u.r0() } else { CORE_CLIP_REL * u.big_r() };
    let layout = RadialLayout {
        r_lo: lo,
        r_hi: u.big_r(),
        dense_per_decade: SUPPORT_PER_DECADE,
        sparse_per_decade: SUPPORT_PER_DECADE,
        focus: None,
        order: 8,
        breakpoints: u.kinks(),
        grade_levels: 3,
    };
    (lo, layout)
}

/// Bound the mass below the clip radius by a local power model of the
/// integrand taken at two probe radii. Infinite when the model cannot
/// certify convergence.
fn clipped_core_bound<W>(space: &Space, weight: &W, lo: f64, sup: f64) -> f64
where
    W: Fn(f64, f64) -> f64,
{
    let q_hom = space.q_hom();
    let w_lo = weight(lo, sup).abs();
    let w_in = weight(lo * 1e-3, sup).abs();
    if w_lo == 0.0 && w_in == 0.0 {
        return 0.0;
    }
    if !(w_lo.is_finite() && w_in.is_finite()) || w_lo == 0.0 || w_in == 0.0 {
        return f64::INFINITY;
    }
    // w(r) ~ w_lo (r/lo)^gamma; only trust the probes for growth toward
    // the origin, otherwise fall back to the flat bound.
    let gamma = ((w_in / w_lo).ln() / 1e-3f64.ln()).min(0.0);
    if q_hom + gamma <= 1e-9 {
        return f64::INFINITY;
    }
    space.sphere_measure() * lo.powf(q_hom) * w_lo / (q_hom + gamma)
}

/// `int weight(|x|, |u(x)|) dx` over the support of `u`.
fn u_integral<W>(
    space: &Space,
    u: &TestFunction,
    weight: W,
    budget: &EvalBudget,
) -> Result<IntegralResult>
where
    W: Fn(f64, f64) -> f64 + Sync,
{
    let (lo, layout) = support_layout(u);
    let mut out = if u.is_radial() {
        space.radial_integral(&layout, |r| Ok(weight(r, u.radial_part(r).abs())), budget)?
    } else {
        let ev = u.evaluator(space);
        space.polar_integral(&layout, |x, r| Ok(weight(r, ev(x).abs())), budget)?
    };
    if u.r0() == 0.0 {
        out.error_bound += clipped_core_bound(space, &weight, lo, u.sup());
    }
    Ok(out)
}

/// `int (mult(|x|) |u(x)|)^e dx`.
pub fn weighted_norm_power<M>(
    space: &Space,
    u: &TestFunction,
    mult: M,
    e: f64,
    budget: &EvalBudget,
) -> Result<IntegralResult>
where
    M: Fn(f64) -> f64 + Sync,
{
    require_above("norm exponent", e, 0.0)?;
    u_integral(
        space,
        u,
        |r, v| if v > 0.0 { (mult(r).abs() * v).powf(e) } else { 0.0 },
        budget,
    )
}

/// The normalized entropy `I2/I1 - ln I1` of `g = mult |u|`, with
/// `I1 = int g^p` and `I2 = int g^p ln g^p`.
#[derive(Debug, Clone, Copy)]
pub struct EntropyTerm {
    pub value: f64,
    pub error_bound: f64,
    /// `I1 = int g^p`.
    pub mass: IntegralResult,
    /// `I2 = int g^p ln g^p`.
    pub mass_log: IntegralResult,
}

impl EntropyTerm {
    pub fn evaluations(&self) -> u64 {
        self.mass.evaluations + self.mass_log.evaluations
    }
}

pub fn entropy_term<M>(
    space: &Space,
    u: &TestFunction,
    mult: M,
    p: f64,
    budget: &EvalBudget,
) -> Result<EntropyTerm>
where
    M: Fn(f64) -> f64 + Sync,
{
    require_above("entropy exponent", p, 0.0)?;
    let gp = |r: f64, v: f64| if v > 0.0 { (mult(r).abs() * v).powf(p) } else { 0.0 };
    let mass = u_integral(space, u, gp, budget)?;
    let mass_log = u_integral(
        space,
        u,
        |r, v| {
            let t = gp(r, v);
            if t > 0.0 {
                t * t.ln()
            } else {
                0.0
            }
        },
        budget,
    )?;
    if !(mass.value > 0.0) {
        return Err(Error::numeric("entropy needs a function with positive mass"));
    }
    let value = mass_log.value / mass.value - mass.value.ln();
    let error_bound = mass_log.error_bound / mass.value
        + mass_log.value.abs() * mass.error_bound / (mass.value * mass.value)
        + mass.error_bound / mass.value;
    Ok(EntropyTerm { value, error_bound, mass, mass_log })
}

/// The difference seminorm
/// `int int |u(x) - u(y)|^p a(x, y) d(x, y)^{-Q-sp} dx dy`
/// for a pair weight from the certified grammar.
pub fn gagliardo_seminorm(
    space: &Space,
    u: &TestFunction,
    a: &PairWeight,
    p: f64,
    s: f64,
    scheme: &DoubleScheme,
    budget: &EvalBudget,
) -> Result<IntegralResult> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::config(format!("difference power must be >= 1, got {p}")));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::config(format!(
            "fractional order must lie strictly between 0 and 1, got {s}"
        )));
    }
    let lip = u.lip_bound(space);
    if !lip.is_finite() {
        return Err(Error::config(format!(
            "function '{}' has no finite slope bound; the difference seminorm needs one",
            u.id
        )));
    }
    let kinks = u.kinks();
    let func = DoubleFunctional {
        u: u.evaluator(space),
        sup_u: u.sup(),
        lip_u: lip,
        r0: u.r0(),
        big_r: u.big_r(),
        kinks: &kinks,
        inner_exp: p,
        kernel_exp: s * p - a.diff_power,
        outer_exp: 1.0,
        fx: a.x_factor,
        wy: a.y_factor,
    };
    let set = space.double_rule_set(u.is_radial());
    integrate_double(
        space.group(),
        space.qnorm(),
        &func,
        &set.rules(),
        space.sphere_measure(),
        scheme,
        budget,
    )
}

/// The nested double integral
/// `int z(y) ( int |u(x) - u(y)|^p v(x) d(x, y)^{-Q-sp} dx )^{q/p} dy`.
pub fn nested_double(
    space: &Space,
    u: &TestFunction,
    v: &RadialFactor,
    z: &RadialFactor,
    p: f64,
    q: f64,
    s: f64,
    scheme: &DoubleScheme,
    budget: &EvalBudget,
) -> Result<IntegralResult> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::config(format!("difference power must be >= 1, got {p}")));
    }
    require_above("outer exponent", q, 0.0)?;
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::config(format!(
            "fractional order must lie strictly between 0 and 1, got {s}"
        )));
    }
    let lip = u.lip_bound(space);
    if !lip.is_finite() {
        return Err(Error::config(format!(
            "function '{}' has no finite slope bound; the nested double integral needs one",
            u.id
        )));
    }
    let kinks = u.kinks();
    let func = DoubleFunctional {
        u: u.evaluator(space),
        sup_u: u.sup(),
        lip_u: lip,
        r0: u.r0(),
        big_r: u.big_r(),
        kinks: &kinks,
        inner_exp: p,
        kernel_exp: s * p,
        outer_exp: q / p,
        fx: *v,
        wy: *z,
    };
    let set = space.double_rule_set(u.is_radial());
    integrate_double(
        space.group(),
        space.qnorm(),
        &func,
        &set.rules(),
        space.sphere_measure(),
        scheme,
        budget,
    )
}

/// `int |d/dr u|^p dx` for a radial function with a well-defined radial
/// derivative.
pub fn radial_derivative_power(
    space: &Space,
    u: &TestFunction,
    p: f64,
    budget: &EvalBudget,
) -> Result<IntegralResult> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::config(format!("derivative power must be >= 1, got {p}")));
    }
    if !u.is_radial() {
        return Err(Error::config(format!(
            "function '{}' is modulated; the radial derivative norm needs radial data",
            u.id
        )));
    }
    let (_, layout) = support_layout(u);
    space.radial_integral(
        &layout,
        |r| Ok(u.radial_deriv(r)?.abs().powf(p)),
        budget,
    )
}

/// Cumulative mass `r -> int_{B(0,r)} |f|`, as a pair of tables at two
/// resolutions so downstream integrals can estimate their own error.
///
/// The angular modulation `1 + eps x_1 / rho^{nu_1}` integrates to one
/// over every quasi-sphere (the odd part cancels) and stays positive,
/// so only the radial part enters.
pub struct MassTable {
    coarse: Arc<CumTable>,
    fine: Arc<CumTable>,
    pub evaluations: u64,
}

impl MassTable {
    /// `int_{B(0,r)} |f|` from the fine table.
    pub fn eval(&self, r: f64) -> f64 {
        self.fine.inner(r)
    }
}

/// Rough node count of a cumulative table, for budget accounting.
fn table_evals(lo: f64, hi: f64, per_decade: f64, breaks: usize) -> u64 {
    let segs = ((hi / lo).log10() * per_decade).ceil().max(4.0) as u64 + breaks as u64;
    segs * 8 + 4
}

pub fn cumulative_mass(
    space: &Space,
    f: &TestFunction,
    budget: &EvalBudget,
) -> Result<MassTable> {
    let q_hom = space.q_hom();
    let sigma = space.sphere_measure();
    let fc = f.clone();
    let phi = move |t: f64| sigma * fc.radial_part(t).abs() * t.powf(q_hom - 1.0);
    let lo = if f.r0() > 0.0 { 0.5 * f.r0() } else { 1e-6 * f.big_r() };
    let hi = 2.0 * f.big_r();
    let breaks = f.kinks();
    let evaluations = table_evals(lo, hi, MASS_TABLE_PER_DECADE, breaks.len())
        + table_evals(lo, hi, MASS_TABLE_PER_DECADE * MASS_TABLE_REFINE, breaks.len());
    budget.charge(evaluations)?;
    let coarse =
        CumTable::with_breakpoints(phi.clone(), lo, hi, MASS_TABLE_PER_DECADE, &breaks)?;
    let fine = CumTable::with_breakpoints(
        phi,
        lo,
        hi,
        MASS_TABLE_PER_DECADE * MASS_TABLE_REFINE,
        &breaks,
    )?;
    Ok(MassTable { coarse: Arc::new(coarse), fine: Arc::new(fine), evaluations })
}

/// `int F(|x|)^q g(|x|) dx` with `F` the cumulative mass of `|f|`: the
/// strong side of the averaging inequality, before the outer root.
pub fn hardy_lhs(
    space: &Space,
    f: &TestFunction,
    mass: &MassTable,
    g: &RadialFactor,
    q: f64,
    budget: &EvalBudget,
) -> Result<IntegralResult> {
    require_above("outer power", q, 0.0)?;
    if g.decay < 0.0 {
        return Err(Error::condition(
            "exponentially growing outer weight is outside the certified grammar",
        ));
    }
    let q_hom = space.q_hom();
    let sigma = space.sphere_measure();
    let big_r = f.big_r();
    let t_lo = if f.r0() > 0.0 { 0.5 * f.r0() } else { 1e-6 * big_r };
    let t_hi = if g.decay > 0.0 {
        (710.0 / g.decay).sqrt().max(4.0 * big_r)
    } else {
        1e3 * big_r
    };
    let mut breaks = f.kinks();
    breaks.push(big_r);

    let gw = *g;
    let route = |tab: Arc<CumTable>| {
        move |t: f64| sigma * tab.inner(t).powf(q) * gw.eval(t) * t.powf(q_hom - 1.0)
    };
    // Each table node queries a mass table, which costs one quadrature
    // segment of the integrand there.
    let evaluations = (table_evals(t_lo, t_hi, MASS_TABLE_PER_DECADE, breaks.len())
        + table_evals(t_lo, t_hi, MASS_TABLE_PER_DECADE * MASS_TABLE_REFINE, breaks.len()))
        * 9;
    budget.charge(evaluations)?;
    let coarse = CumTable::with_breakpoints(
        route(mass.coarse.clone()),
        t_lo,
        t_hi,
        MASS_TABLE_PER_DECADE,
        &breaks,
    )?;
    let fine = CumTable::with_breakpoints(
        route(mass.fine.clone()),
        t_lo,
        t_hi,
        MASS_TABLE_PER_DECADE * MASS_TABLE_REFINE,
        &breaks,
    )?;
    let value = fine.total();
    if !value.is_finite() {
        return Ok(IntegralResult { value: f64::INFINITY, error_bound: f64::INFINITY, evaluations });
    }
    Ok(IntegralResult {
        value,
        error_bound: (value - coarse.total()).abs(),
        evaluations,
    })
}

/// `int h |f|^p dx`: the weak side of the averaging inequality, before
/// the outer root.
pub fn hardy_rhs(
    space: &Space,
    f: &TestFunction,
    h: &RadialFactor,
    p: f64,
    budget: &EvalBudget,
) -> Result<IntegralResult> {
    require_above("norm exponent", p, 0.0)?;
    if h.decay < 0.0 {
        return Err(Error::condition(
            "exponentially growing weight is outside the certified grammar",
        ));
    }
    let hp = h.pow(1.0 / p);
    weighted_norm_power(space, f, move |r| hp.eval(r), p, budget)
}
