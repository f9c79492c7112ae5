//! The pricing forms. Each builds the same [`PriceReport`] layout; the
//! doc comment of every function states which conceptual legs land in
//! which report fields.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::market::CallCurve;
use crate::math::kahan_sum;
use crate::payoff::{ConvexDecomposition, Payoff};

use super::{adaptive_refine, tail_scan, CachedCurve, PriceError, PriceReport, QuadConfig};

/// Runs the admissibility checks every unbounded-domain form shares and
/// returns the truncation strike with its tail estimate.
fn ensure_admissible(
    p: &Payoff,
    c: &dyn CallCurve,
    cfg: &QuadConfig,
) -> Result<(f64, f64), PriceError> {
    let integ = c.integrability(p);
    if !integ.ok {
        return Err(PriceError::TailConditionFailed(format!(
            "integrability probe failed: {}",
            integ.detail
        )));
    }
    let tail = tail_scan(p, c, cfg);
    if !tail.decayed {
        return Err(PriceError::TailConditionFailed(tail.detail));
    }
    Ok((tail.a_max.expect("decayed implies a cut"), tail.tail_bound))
}

/// Strictly increasing partition of `[lo, hi]` forced at every payoff kink
/// and curve grid strike inside the domain.
pub(crate) fn forced_nodes(lo: f64, hi: f64, p: &Payoff, c: &dyn CallCurve) -> Vec<f64> {
    let mut v = vec![lo, hi];
    for &s in p.boundaries() {
        if s > lo && s < hi {
            v.push(s);
        }
    }
    if let Some(grid) = c.strike_grid() {
        for s in grid {
            if s > lo && s < hi {
                v.push(s);
            }
        }
    }
    v.sort_unstable_by(f64::total_cmp);
    v.dedup();
    v
}

/// The two discounted jump sums: value breaks from the left paired with
/// `Q(X_T ≥ s)`, breaks from the right with `Q(X_T > s)`.
fn jump_terms(p: &Payoff, c: &dyn CallCurve) -> (f64, f64) {
    let jumps = p.jumps();
    let disc = c.discount();
    let left = kahan_sum(jumps.iter().map(|j| j.left * c.digital_ge(j.strike)));
    let right = kahan_sum(jumps.iter().map(|j| j.right * c.digital_gt(j.strike)));
    (disc * left, disc * right)
}

/// Stieltjes form: `value = B_T⁻¹f(0) − ∫₀^{a_max} f′ dλ + jump sums`.
///
/// The integral is a midpoint-in-`f′` sum against exact curve increments,
/// refined adaptively with partition nodes forced at every kink. Report
/// mapping: `cash_term = B_T⁻¹f(0)`, `integral_term = −∫f′dλ`, jump sums
/// in the two jump fields.
pub fn price_theorem1(
    p: &Payoff,
    c: &dyn CallCurve,
    cfg: &QuadConfig,
) -> Result<PriceReport, PriceError> {
    cfg.validate();
    let (a_max, tail_bound) = ensure_admissible(p, c, cfg)?;
    let forced = forced_nodes(0.0, a_max, p, c);
    let cached = CachedCurve::new(c);
    let mut cell =
        |a: f64, b: f64| p.derivative(0.5 * (a + b)) * (cached.lambda(b) - cached.lambda(a));
    let out = adaptive_refine(&forced, cfg.tol, cfg.max_nodes, &mut cell)?;
    let (jl, jr) = jump_terms(p, c);
    Ok(PriceReport::assemble(
        c.discount() * p.eval(0.0),
        -out.value,
        jl,
        jr,
        a_max,
        tail_bound,
        out.cells,
    ))
}

/// Lebesgue form: the Stieltjes integral rewritten against the digital
/// curve, `integral_term = +∫₀^{a_max} f′(a)·B_T⁻¹·Q(X_T > a) da`, by
/// adaptive midpoint quadrature on the integrand itself. Other report
/// fields as in [`price_theorem1`].
pub fn price_lebesgue(
    p: &Payoff,
    c: &dyn CallCurve,
    cfg: &QuadConfig,
) -> Result<PriceReport, PriceError> {
    cfg.validate();
    let (a_max, tail_bound) = ensure_admissible(p, c, cfg)?;
    let forced = forced_nodes(0.0, a_max, p, c);
    let disc = c.discount();
    let mut cell = |a: f64, b: f64| {
        let m = 0.5 * (a + b);
        p.derivative(m) * disc * c.digital_gt(m) * (b - a)
    };
    let out = adaptive_refine(&forced, cfg.tol, cfg.max_nodes, &mut cell)?;
    let (jl, jr) = jump_terms(p, c);
    Ok(PriceReport::assemble(
        disc * p.eval(0.0),
        out.value,
        jl,
        jr,
        a_max,
        tail_bound,
        out.cells,
    ))
}

/// Twice-integrated-by-parts form:
/// `value = B_T⁻¹f(0) + ∫f″(a)λ(a) da + Σ(f′(s⁺)−f′(s⁻))λ(s) + jump sums`,
/// where the slope-break sum runs over every kink including `s = 0` with
/// `f′(0⁻) := 0`. Report mapping: the quadrature and the slope-break sum
/// together form `integral_term`; cash and jump fields as in
/// [`price_theorem1`].
///
/// Requires second derivatives on every smooth piece.
pub fn price_bick(
    p: &Payoff,
    c: &dyn CallCurve,
    cfg: &QuadConfig,
) -> Result<PriceReport, PriceError> {
    cfg.validate();
    if !p.has_second() {
        return Err(PriceError::SecondDerivativeUnavailable(format!(
            "payoff `{}` carries no second derivative on at least one piece",
            p.label()
        )));
    }
    let (a_max, tail_bound) = ensure_admissible(p, c, cfg)?;
    let forced = forced_nodes(0.0, a_max, p, c);
    let cached = CachedCurve::new(c);
    let mut cell = |a: f64, b: f64| {
        let m = 0.5 * (a + b);
        let f2 = p.second(m).expect("checked has_second");
        f2 * cached.lambda(m) * (b - a)
    };
    let out = adaptive_refine(&forced, cfg.tol, cfg.max_nodes, &mut cell)?;
    let slope_breaks = kahan_sum(p.boundaries().iter().map(|&s| {
        let dl = if s == 0.0 { 0.0 } else { p.deriv_left(s) };
        (p.deriv_right(s) - dl) * cached.lambda(s)
    }));
    let (jl, jr) = jump_terms(p, c);
    Ok(PriceReport::assemble(
        c.discount() * p.eval(0.0),
        out.value + slope_breaks,
        jl,
        jr,
        a_max,
        tail_bound,
        out.cells,
    ))
}

/// Density form: `value = ∫₀^{a_max} f(a)·λ″(a) da` against the curve's
/// closed-form density. The whole value sits in `integral_term`; the other
/// three fields are zero. Only works on backends exposing `λ″`.
pub fn price_bl(
    p: &Payoff,
    c: &dyn CallCurve,
    cfg: &QuadConfig,
) -> Result<PriceReport, PriceError> {
    cfg.validate();
    if c.lambda_second(c.forward()).is_none() {
        return Err(PriceError::DensityUnavailable(
            "curve backend exposes no closed-form density λ″ \
             (quoted and sampled curves have atoms and kinks)"
                .into(),
        ));
    }
    let (a_max, tail_bound) = ensure_admissible(p, c, cfg)?;
    let forced = forced_nodes(0.0, a_max, p, c);
    let mut cell = |a: f64, b: f64| {
        let m = 0.5 * (a + b);
        let dens = c.lambda_second(m).expect("probed above");
        p.eval(m) * dens * (b - a)
    };
    let out = adaptive_refine(&forced, cfg.tol, cfg.max_nodes, &mut cell)?;
    Ok(PriceReport::assemble(
        0.0,
        out.value,
        0.0,
        0.0,
        a_max,
        tail_bound,
        out.cells,
    ))
}

/// Convex-decomposition form:
/// `value = B_T⁻¹f(0) + f′₊(0)·λ(0) + Σ mᵢ·λ(aᵢ) + ∫λ(a) μ_ac(da)`.
/// Report mapping: `cash_term = B_T⁻¹f(0)`, `jump_left_term` is the
/// forward leg `f′₊(0)·λ(0)`, `jump_right_term` the atom calls
/// `Σ mᵢ·λ(aᵢ)`, and `integral_term` the curvature integral.
pub fn price_convex(
    d: &ConvexDecomposition<'_>,
    c: &dyn CallCurve,
    cfg: &QuadConfig,
) -> Result<PriceReport, PriceError> {
    cfg.validate();
    let p = d.payoff();
    let (a_max, tail_bound) = ensure_admissible(p, c, cfg)?;
    let forced = forced_nodes(0.0, a_max, p, c);
    let cached = CachedCurve::new(c);
    let mut cell = |a: f64, b: f64| {
        let m = 0.5 * (a + b);
        d.density(m) * cached.lambda(m) * (b - a)
    };
    let out = adaptive_refine(&forced, cfg.tol, cfg.max_nodes, &mut cell)?;
    let forward_leg = d.slope0 * cached.lambda(0.0);
    let atom_legs = kahan_sum(d.atoms.iter().map(|&(s, m)| m * cached.lambda(s)));
    Ok(PriceReport::assemble(
        c.discount() * d.f0,
        out.value,
        forward_leg,
        atom_legs,
        a_max,
        tail_bound,
        out.cells,
    ))
}

/// Prices `f(x)·1{x ∈ window}` for a window `[α, β]` whose two endpoints
/// are each either closed or open.
///
/// `value = B_T⁻¹f(α)·Q(X_T ≥ α) − B_T⁻¹f(β)·Q(X_T > β) − ∫_α^β f′ dλ`
/// for the closed window; an open endpoint swaps the digital flavor and
/// uses the one-sided payoff limit from inside the window. Report mapping:
/// `jump_left_term` and `jump_right_term` are the two boundary legs,
/// `integral_term = −∫_α^β f′dλ`, `cash_term = 0`, `truncation = β`,
/// `tail_bound = 0`.
///
/// The payoff must be continuous on the window (kinks are fine, value
/// jumps are not).
pub fn price_windowed(
    p: &Payoff,
    alpha: f64,
    beta: f64,
    closed: (bool, bool),
    c: &dyn CallCurve,
    cfg: &QuadConfig,
) -> Result<PriceReport, PriceError> {
    cfg.validate();
    if !(alpha >= 0.0 && alpha.is_finite() && beta.is_finite() && alpha < beta) {
        return Err(PriceError::BadWindow(format!(
            "need 0 ≤ α < β < ∞, got α = {alpha}, β = {beta}"
        )));
    }
    for j in p.jumps() {
        if j.strike >= alpha && j.strike <= beta && (j.left != 0.0 || j.right != 0.0) {
            return Err(PriceError::BadWindow(format!(
                "payoff must be continuous on the window; it jumps at {}",
                j.strike
            )));
        }
    }
    let disc = c.discount();
    let forced = forced_nodes(alpha, beta, p, c);
    let cached = CachedCurve::new(c);
    let mut cell =
        |a: f64, b: f64| p.derivative(0.5 * (a + b)) * (cached.lambda(b) - cached.lambda(a));
    let out = adaptive_refine(&forced, cfg.tol, cfg.max_nodes, &mut cell)?;
    let left_leg = if closed.0 {
        disc * p.eval(alpha) * c.digital_ge(alpha)
    } else {
        disc * p.value_right(alpha) * c.digital_gt(alpha)
    };
    let right_leg = if closed.1 {
        -disc * p.eval(beta) * c.digital_gt(beta)
    } else {
        -disc * p.value_left(beta) * c.digital_ge(beta)
    };
    Ok(PriceReport::assemble(
        0.0,
        -out.value,
        left_leg,
        right_leg,
        beta,
        0.0,
        out.cells,
    ))
}
